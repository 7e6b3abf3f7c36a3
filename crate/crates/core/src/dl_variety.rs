//! Points of the parabolic Deligne-Lusztig variety `Y(w)` for GL_n over
//! finite fields, through canonical representatives of the Lang torsor
//! `{g : g^{-1} σ(g) w^{-1} ∈ U_{μ<0}}`.
//!
//! Matrix conventions: the root `e_i - e_j` is the `(i, j)` slot, `σ` is the
//! entrywise `q`-power and `Ad(wσ)(g) = w σ(g) w^{-1}`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::finite_field::{Fq, GaloisField};
use crate::finite_linear::{self, enumerate_group, gl_order, FqMatrix};
use crate::lambda::{image_of_roots, LambdaData, ShimuraDatum};
use crate::matrix::{self, Matrix};
use crate::root_datum::{gl_root_pair, pairing};
use crate::scalar::Ring;
use crate::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YwPoint {
    pub rep: FqMatrix,
    pub level: u32,
}

/// Coordinates of a unipotent element along an ordered root list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnipotentFactorization {
    pub order: Vec<usize>,
    pub components: Vec<Fq>,
}

impl UnipotentFactorization {
    pub fn component(&self, root: usize) -> Option<Fq> {
        self.order.iter().position(|&r| r == root).map(|k| self.components[k])
    }
}

/// Everything needed to work with `Y(w)` over `F_{q^m}`.
#[derive(Clone, Debug)]
pub struct DlContext {
    pub sd: ShimuraDatum,
    pub ld: LambdaData,
    pub field: GaloisField,
    pub n: usize,
    pub w: FqMatrix,
    pub w_inv: FqMatrix,
    /// `(i, j)` slot of each root.
    slots: Vec<(usize, usize)>,
    /// `wσ Φ(N)`, sorted by `<α, wσλ>` then index.
    pub psi: Vec<usize>,
    /// `Φ(N) ∩ wσ Φ(N)`, in `psi` order.
    pub phi0: Vec<usize>,
    /// `Φ_{μ<0}`.
    pub k_roots: Vec<usize>,
    /// `Φ(N)`, sorted by `<α, λ>` then index.
    pub n_roots: Vec<usize>,
}

fn sorted_by_height(set: impl IntoIterator<Item = usize>, key: impl Fn(usize) -> Rat) -> Vec<usize> {
    let mut v: Vec<(Rat, usize)> = set.into_iter().map(|i| (key(i), i)).collect();
    v.sort();
    v.into_iter().map(|(_, i)| i).collect()
}

impl DlContext {
    pub fn new(sd: &ShimuraDatum, ld: &LambdaData, m: u32) -> Result<Self> {
        let d = &sd.datum;
        let n = d.rank();
        if !d.is_split() {
            return Err(Error::Unsupported("matrix-level work needs a split datum".into()));
        }
        if d.num_roots() != n * (n - 1) {
            return Err(Error::Unsupported("matrix-level work needs a GL_n datum".into()));
        }
        let mut slots = Vec::with_capacity(d.num_roots());
        for a in d.roots() {
            slots.push(gl_root_pair(a).ok_or_else(|| Error::Unsupported("not a GL_n datum".into()))?);
        }
        let q = sd.q;
        let field = GaloisField::new(q.p as u32, q.f, m)?;
        let w = finite_linear::permutation_matrix(&field, &sd.w.aut)?;
        let w_inv = finite_linear::permutation_matrix(&field, &sd.w.aut.inverse())?;
        let ws = sd.wsigma();
        let nu = ws.apply_rat(&ld.lambda);
        let psi_set = image_of_roots(d, &ws, &ld.phi_n);
        let psi = sorted_by_height(psi_set.iter().copied(), |i| pairing(d.root(i), &nu).unwrap());
        let n_set: BTreeSet<usize> = ld.phi_n.iter().copied().collect();
        let phi0: Vec<usize> = psi.iter().copied().filter(|i| n_set.contains(i)).collect();
        let n_roots = sorted_by_height(ld.phi_n.iter().copied(), |i| pairing(d.root(i), &ld.lambda).unwrap());
        let ctx = DlContext {
            sd: sd.clone(),
            ld: ld.clone(),
            field,
            n,
            w,
            w_inv,
            slots,
            psi,
            phi0,
            k_roots: ld.phi_mu_neg.clone(),
            n_roots,
        };
        ctx.check_structure()?;
        Ok(ctx)
    }

    fn check_structure(&self) -> Result<()> {
        // heights used for peeling must be positive
        let ws = self.sd.wsigma();
        let nu = ws.apply_rat(&self.ld.lambda);
        for &i in &self.psi {
            if !pairing(self.sd.datum.root(i), &nu)?.is_positive() {
                return Err(Error::invariant("dl-structure", "wσλ is not positive on wσΦ(N)"));
            }
        }
        // U_{μ<0} has square-zero Lie algebra
        for &a in &self.k_roots {
            for &b in &self.k_roots {
                if self.slots[a].1 == self.slots[b].0 {
                    return Err(Error::invariant("dl-structure", "U_{μ<0} is not square-zero"));
                }
            }
        }
        let psi: BTreeSet<usize> = self.psi.iter().copied().collect();
        let k: BTreeSet<usize> = self.k_roots.iter().copied().collect();
        let nbar: BTreeSet<usize> = self.ld.phi_nbar.iter().copied().collect();
        let expected: BTreeSet<usize> = psi.intersection(&nbar).copied().collect();
        if expected != k {
            return Err(Error::invariant(
                "N-bar-cap-wsigma-N",
                "Φ(N̄) ∩ wσΦ(N) differs from Φ_{μ<0}",
            ));
        }
        Ok(())
    }

    pub fn slot(&self, root: usize) -> (usize, usize) {
        self.slots[root]
    }

    pub fn identity(&self) -> FqMatrix {
        matrix::identity(&self.field, self.n)
    }

    pub fn mul(&self, a: &FqMatrix, b: &FqMatrix) -> FqMatrix {
        matrix::mul(&self.field, a, b).expect("square matrices")
    }

    pub fn inv(&self, a: &FqMatrix) -> Result<FqMatrix> {
        matrix::inverse(&self.field, a)?.ok_or_else(|| Error::domain("singular matrix"))
    }

    pub fn sigma(&self, a: &FqMatrix) -> FqMatrix {
        finite_linear::frobenius(&self.field, a)
    }

    pub fn root_element(&self, root: usize, c: Fq) -> FqMatrix {
        let mut m = self.identity();
        let (i, j) = self.slots[root];
        m[(i, j)] = c;
        m
    }

    /// `w σ(g) w^{-1}`.
    pub fn ad_wsigma(&self, g: &FqMatrix) -> FqMatrix {
        self.mul(&self.mul(&self.w, &self.sigma(g)), &self.w_inv)
    }

    /// `g^{-1} σ(g) w^{-1}`.
    pub fn lang_value(&self, g: &FqMatrix) -> Result<FqMatrix> {
        let gi = self.inv(g)?;
        Ok(self.mul(&self.mul(&gi, &self.sigma(g)), &self.w_inv))
    }

    /// Whether `x - 1` is supported on the slots of `roots`.
    pub fn in_unipotent(&self, roots: &[usize], x: &FqMatrix) -> bool {
        let allowed: BTreeSet<(usize, usize)> = roots.iter().map(|&r| self.slots[r]).collect();
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let v = x[(i, j)];
                if i == j {
                    v == Fq(1)
                } else {
                    v == Fq(0) || allowed.contains(&(i, j))
                }
            })
        })
    }

    pub fn in_k(&self, x: &FqMatrix) -> bool {
        self.in_unipotent(&self.k_roots, x)
    }

    /// Coordinates of `x ∈ U_{μ<0}` (the fiber key).
    pub fn k_coords(&self, x: &FqMatrix) -> Vec<Fq> {
        self.k_roots
            .iter()
            .map(|&r| {
                let (i, j) = self.slots[r];
                x[(i, j)]
            })
            .collect()
    }

    /// Peel `x = Π i_α(c_α)` along `order` (increasing height).
    pub fn factor(&self, order: &[usize], x: &FqMatrix) -> Result<UnipotentFactorization> {
        let f = &self.field;
        let mut cur = x.clone();
        let mut components = Vec::with_capacity(order.len());
        for &r in order {
            let (i, j) = self.slots[r];
            let c = cur[(i, j)];
            components.push(c);
            if c != Fq(0) {
                cur = self.mul(&self.root_element(r, f.neg(&c)), &cur);
            }
        }
        if !matrix::is_identity(f, &cur) {
            return Err(Error::domain("element lies outside the unipotent subgroup"));
        }
        Ok(UnipotentFactorization {
            order: order.to_vec(),
            components,
        })
    }

    pub fn product(&self, fac: &UnipotentFactorization) -> FqMatrix {
        fac.order
            .iter()
            .zip(&fac.components)
            .fold(self.identity(), |acc, (&r, &c)| self.mul(&acc, &self.root_element(r, c)))
    }

    /// Quotient `Ad(wσ)(N) -> N ∩ Ad(wσ)(N)` by `N̄ ∩ Ad(wσ)(N)`: factor
    /// along `wσΦ(N)` and drop the `Φ_{μ<0}` components.
    pub fn pi_w(&self, x: &FqMatrix) -> Result<FqMatrix> {
        let fac = self.factor(&self.psi, x)?;
        let keep: BTreeSet<usize> = self.phi0.iter().copied().collect();
        Ok(fac
            .order
            .iter()
            .zip(&fac.components)
            .filter(|(r, _)| keep.contains(r))
            .fold(self.identity(), |acc, (&r, &c)| self.mul(&acc, &self.root_element(r, c))))
    }

    /// `φ_w(h) = π_w(Ad(wσ)(h))` on `N ∩ Ad(wσ)(N)`.
    pub fn phi_w(&self, h: &FqMatrix) -> Result<FqMatrix> {
        if !self.in_unipotent(&self.phi0, h) {
            return Err(Error::domain("element outside N ∩ Ad(wσ)(N)"));
        }
        self.pi_w(&self.ad_wsigma(h))
    }

    /// Split `y = a k` with `a ∈ U_S` and `k ∈ U_{μ<0}`, by solving the
    /// linear system `y (1 - Z) ∈ U_S` for `k = 1 + Z`.
    pub fn split_off_k(&self, s_roots: &[usize], y: &FqMatrix) -> Option<(FqMatrix, FqMatrix)> {
        let f = &self.field;
        let n = self.n;
        let allowed: BTreeSet<(usize, usize)> = s_roots.iter().map(|&r| self.slots[r]).collect();
        let kslots: Vec<(usize, usize)> = self.k_roots.iter().map(|&r| self.slots[r]).collect();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && allowed.contains(&(a, b)) {
                    continue;
                }
                // y_ab - Σ_c y_ac Z_cb = δ_ab
                let row: Vec<Fq> = kslots
                    .iter()
                    .map(|&(c, bb)| if bb == b { y[(a, c)] } else { Fq(0) })
                    .collect();
                let target = if a == b { Fq(1) } else { Fq(0) };
                rows.push(row);
                rhs.push(f.sub(&y[(a, b)], &target));
            }
        }
        let z = if kslots.is_empty() {
            Vec::new()
        } else {
            matrix::solve(f, &Matrix::from_rows(rows).unwrap(), &rhs).ok()??
        };
        let mut k = self.identity();
        let mut k_inv = self.identity();
        for (&(c, b), &v) in kslots.iter().zip(&z) {
            k[(c, b)] = v;
            k_inv[(c, b)] = f.neg(&v);
        }
        let a = self.mul(y, &k_inv);
        self.in_unipotent(s_roots, &a).then_some((a, k))
    }

    /// The canonical representative of `gN`, with the number of fixed-point
    /// iterations used.
    pub fn canonicalize_traced(&self, g: &FqMatrix) -> Result<(YwPoint, usize)> {
        let y = self.lang_value(g)?;
        let (n1, _k) = self
            .split_off_k(&self.n_roots, &y)
            .ok_or_else(|| Error::domain("g^{-1}σ(g) is not in N wσ(N)"))?;
        let g1 = self.mul(g, &n1);
        let x = self.pi_w(&self.lang_value(&g1)?)?;
        // h = x φ_w(h)
        let mut h = x.clone();
        let mut steps = 0;
        loop {
            let next = self.mul(&x, &self.phi_w(&h)?);
            if next == h {
                break;
            }
            steps += 1;
            if steps > self.ld.n as usize + 1 {
                return Err(Error::invariant(
                    "phi-w-nilpotent",
                    "fixed-point iteration did not stabilize",
                ));
            }
            h = next;
        }
        let rep = self.mul(&g1, &h);
        debug_assert!(self.in_k(&self.lang_value(&rep)?));
        Ok((
            YwPoint {
                rep,
                level: self.field.m(),
            },
            steps,
        ))
    }

    pub fn canonicalize(&self, g: &FqMatrix) -> Result<YwPoint> {
        Ok(self.canonicalize_traced(g)?.0)
    }

    pub fn is_canonical(&self, g: &FqMatrix) -> bool {
        self.lang_value(g).map(|y| self.in_k(&y)).unwrap_or(false)
    }

    /// Elements `Π i_α(c_α)` of `U_S` over this field.
    pub fn unipotent_elements(&self, roots: &[usize]) -> Vec<FqMatrix> {
        let size = self.field.size() as usize;
        let total = size.pow(roots.len() as u32);
        (0..total)
            .map(|mut idx| {
                let comps: Vec<Fq> = roots
                    .iter()
                    .map(|_| {
                        let c = Fq((idx % size) as u32);
                        idx /= size;
                        c
                    })
                    .collect();
                self.product(&UnipotentFactorization {
                    order: roots.to_vec(),
                    components: comps,
                })
            })
            .collect()
    }

    /// Rational points of `N` over this field.
    pub fn n_elements(&self) -> Vec<FqMatrix> {
        self.unipotent_elements(&self.n_roots)
    }

    pub fn is_sigma_fixed(&self, g: &FqMatrix) -> bool {
        self.sigma(g) == *g
    }

    pub fn is_wsigma_fixed(&self, x: &FqMatrix) -> bool {
        self.ad_wsigma(x) == *x
    }

    /// `diag(ζ^{τ (eλ)_i})` for the pinned `ζ = ζ_e`.
    pub fn inertia_element(&self, tau: i64) -> Result<FqMatrix> {
        let d = inertia_torus_element(&self.field, &self.ld, -tau)?;
        Ok(finite_linear::diagonal(&self.field, &d))
    }

    /// `g0 · rep · mm^{-1} · (ζ_e^τ)^{eλ}`, canonicalized.
    pub fn act(&self, pt: &YwPoint, g0: &FqMatrix, mm: &FqMatrix, tau: i64) -> Result<YwPoint> {
        if !self.is_sigma_fixed(g0) {
            return Err(Error::domain("g0 is not σ-fixed"));
        }
        if !self.is_wsigma_fixed(mm) || !self.in_levi(mm) {
            return Err(Error::domain("m is not in M^{wσ}"));
        }
        let z = self.inertia_element(tau)?;
        let g = self.mul(&self.mul(&self.mul(g0, &pt.rep), &self.inv(mm)?), &z);
        self.canonicalize(&g)
    }

    /// Whether `x` is supported on the diagonal and `Φ(M)` slots.
    pub fn in_levi(&self, x: &FqMatrix) -> bool {
        let allowed: BTreeSet<(usize, usize)> = self.ld.phi_m.iter().map(|&r| self.slots[r]).collect();
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || x[(i, j)] == Fq(0) || allowed.contains(&(i, j))))
    }

    /// `g -> σ^{-1}(g)`, which maps canonical representatives to canonical
    /// representatives in the split case.
    pub fn weil_twist(&self, g: &FqMatrix) -> FqMatrix {
        finite_linear::frobenius_k(&self.field, g, -1)
    }

    pub fn format_matrix(&self, g: &FqMatrix) -> String {
        (0..g.rows())
            .map(|i| {
                g.row(i)
                    .iter()
                    .map(|&x| self.field.fmt_elem(x))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_matrix(&self, line: &str) -> Result<FqMatrix> {
        let rows: Vec<Vec<Fq>> = line
            .trim()
            .split(';')
            .map(|r| r.split_whitespace().map(|t| self.field.parse_elem(t)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
            return Err(Error::Parse(format!("expected a {0}x{0} matrix: {line}", self.n)));
        }
        Matrix::from_rows(rows)
    }
}

#[derive(Clone, Debug)]
pub struct YwEnumeration {
    pub points: Vec<FqMatrix>,
    /// Fiber sizes keyed by the `U_{μ<0}` coordinates of the Lang value.
    pub fibers: BTreeMap<Vec<Fq>, usize>,
    pub group_order: u128,
    pub searched: u128,
}

impl YwEnumeration {
    pub fn all_fibers_are_torsors(&self) -> bool {
        self.fibers.values().all(|&c| c as u128 == self.group_order)
    }
}

/// All `g ∈ GL_n(F_{q^m})` with `g^{-1} σ(g) w^{-1} ∈ U_{μ<0}`.
pub fn enumerate_yw(ctx: &DlContext, budget: u128) -> Result<YwEnumeration> {
    let mut points = Vec::new();
    let mut fibers = BTreeMap::new();
    let mut searched = 0u128;
    for g in enumerate_group(&ctx.field, ctx.n, budget)? {
        searched += 1;
        let y = ctx.lang_value(&g)?;
        if ctx.in_k(&y) {
            *fibers.entry(ctx.k_coords(&y)).or_insert(0) += 1;
            points.push(g);
        }
    }
    Ok(YwEnumeration {
        points,
        fibers,
        group_order: gl_order(ctx.n, ctx.sd.q.q),
        searched,
    })
}

/// The fiber `{g : g^{-1} σ(g) w^{-1} = k}`: its rows solve
/// `σ(r) = r k w`, an `F_q`-space of dimension at most `n`; the fiber is the
/// set of ordered bases of that space when the dimension is `n`.
pub fn lang_fiber(ctx: &DlContext, k: &FqMatrix, budget: u128) -> Result<Vec<FqMatrix>> {
    let n = ctx.n;
    let f = &ctx.field;
    let size = f.size() as u128;
    let total = size
        .checked_pow(n as u32)
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::size("row search", format!("{size}^{n}"), budget))?;
    let y = ctx.mul(k, &ctx.w);
    let mut sols = Vec::new();
    for idx in 0..total {
        let mut v = idx;
        let r: Vec<Fq> = (0..n)
            .map(|_| {
                let c = Fq((v % size) as u32);
                v /= size;
                c
            })
            .collect();
        let lhs: Vec<Fq> = r.iter().map(|&x| f.frobenius(x)).collect();
        if matrix::vec_mat(f, &r, &y)? == lhs {
            sols.push(r);
        }
    }
    let q = ctx.sd.q.q as usize;
    if sols.len() != q.pow(n as u32) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut cur: Vec<Vec<Fq>> = Vec::new();
    fn rec(f: &GaloisField, sols: &[Vec<Fq>], n: usize, cur: &mut Vec<Vec<Fq>>, out: &mut Vec<FqMatrix>) {
        if cur.len() == n {
            out.push(Matrix::from_rows(cur.clone()).unwrap());
            return;
        }
        for r in sols {
            cur.push(r.clone());
            let m = Matrix::from_rows(cur.clone()).unwrap();
            if matrix::rank(f, &m) == cur.len() {
                rec(f, sols, n, cur, out);
            }
            cur.pop();
        }
    }
    rec(f, &sols, n, &mut cur, &mut out);
    Ok(out)
}

/// `Y(w)(F_{q^m})` assembled fiber by fiber over `U_{μ<0}(F_{q^m})`.
pub fn enumerate_yw_by_fibers(ctx: &DlContext, budget: u128) -> Result<YwEnumeration> {
    let size = ctx.field.size() as u128;
    let kcount = size
        .checked_pow(ctx.k_roots.len() as u32)
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::size("U_{μ<0} search", format!("{size}^{}", ctx.k_roots.len()), budget))?;
    let mut points = Vec::new();
    let mut fibers = BTreeMap::new();
    for k in ctx.unipotent_elements(&ctx.k_roots) {
        let fib = lang_fiber(ctx, &k, budget)?;
        if !fib.is_empty() {
            fibers.insert(ctx.k_coords(&k), fib.len());
            points.extend(fib);
        }
    }
    points.sort();
    Ok(YwEnumeration {
        points,
        fibers,
        group_order: gl_order(ctx.n, ctx.sd.q.q),
        searched: kcount,
    })
}

/// Rational points `GL_n(F_q)` inside the context's field.
pub fn rational_group(ctx: &DlContext, budget: u128) -> Result<Vec<FqMatrix>> {
    let base_elems = ctx.field.base_elements();
    let n = ctx.n;
    let total = (base_elems.len() as u128).pow((n * n) as u32);
    if total > budget {
        return Err(Error::size("GL_n(F_q) search", total, budget));
    }
    let mut out = Vec::new();
    let s = base_elems.len();
    for idx in 0..total as usize {
        let mut v = idx;
        let data: Vec<Fq> = (0..n * n)
            .map(|_| {
                let c = base_elems[v % s];
                v /= s;
                c
            })
            .collect();
        let m = Matrix::from_vec(n, n, data)?;
        if matrix::det(&ctx.field, &m)? != Fq(0) {
            out.push(m);
        }
    }
    Ok(out)
}

/// The pinned `ζ_e` raised to `τ eλ` coordinatewise.
pub fn inertia_torus_element(field: &GaloisField, ld: &LambdaData, tau: i64) -> Result<Vec<Fq>> {
    let e = ld.e_u64();
    let zeta = field.root_of_unity(e)?;
    let el = ld.e_lambda_i64();
    Ok(el
        .iter()
        .map(|&x| {
            let k = (tau as i128 * x as i128).rem_euclid(e as i128) as u64;
            field.pow(zeta, k)
        })
        .collect())
}

/// `(ζ_e^{-τ (eλ)_1}, ..., ζ_e^{-τ (eλ)_n})`.
pub fn inertia_torus_inverse(field: &GaloisField, ld: &LambdaData, tau: i64) -> Result<Vec<Fq>> {
    inertia_torus_element(field, ld, -tau)
}

#[derive(Clone, Debug)]
pub struct MwSigmaPoints {
    pub order: usize,
    pub elements: Vec<FqMatrix>,
}

/// `M^{wσ}` over the context's field: elements of the Levi `M` fixed by
/// `Ad(wσ)`.
pub fn m_wsigma_points(ctx: &DlContext, budget: u128) -> Result<MwSigmaPoints> {
    let n = ctx.n;
    let mut support: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    support.extend(ctx.ld.phi_m.iter().map(|&r| ctx.slot(r)));
    support.sort();
    let size = ctx.field.size() as u128;
    let total = size
        .checked_pow(support.len() as u32)
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::size("M(F) search", format!("{size}^{}", support.len()), budget))?;
    let mut elements = Vec::new();
    for idx in 0..total {
        let mut v = idx;
        let mut m = matrix::zeros(&ctx.field, n, n);
        for &(i, j) in &support {
            m[(i, j)] = Fq((v % size) as u32);
            v /= size;
        }
        if ctx.is_wsigma_fixed(&m) && matrix::det(&ctx.field, &m)? != Fq(0) {
            elements.push(m);
        }
    }
    Ok(MwSigmaPoints {
        order: elements.len(),
        elements,
    })
}

/// Whether `h -> h φ_w(h)^{-1}` is a bijection on `N ∩ Ad(wσ)(N)` over the
/// context's field, and whether `φ_w^N` is trivial there.
pub fn check_phi_w(ctx: &DlContext) -> Result<(bool, bool)> {
    let elems = ctx.unipotent_elements(&ctx.phi0);
    let mut nilpotent = true;
    let mut image = BTreeSet::new();
    for h in &elems {
        let mut cur = h.clone();
        for _ in 0..ctx.ld.n {
            cur = ctx.phi_w(&cur)?;
        }
        nilpotent &= matrix::is_identity(&ctx.field, &cur);
        let v = ctx.mul(h, &ctx.inv(&ctx.phi_w(h)?)?);
        image.insert(v);
    }
    Ok((nilpotent, image.len() == elems.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use crate::lambda::compute_lambda;
    use crate::root_datum::gl_datum;

    fn ctx(n: usize, q: u64, m: u32) -> DlContext {
        let mut mu = vec![0; n];
        mu[0] = -1;
        let sd = ShimuraDatum::new(gl_datum(n).unwrap(), q, mu).unwrap();
        let ld = compute_lambda(&sd).unwrap();
        DlContext::new(&sd, &ld, m).unwrap()
    }

    #[test]
    fn gl2_q2_m1_is_empty() {
        let c = ctx(2, 2, 1);
        let e = enumerate_yw(&c, 1_000).unwrap();
        assert!(e.points.is_empty());
        assert!(!c.in_k(&c.w_inv));
    }

    #[test]
    fn gl2_q2_m2_fibers() {
        let c = ctx(2, 2, 2);
        let e = enumerate_yw(&c, 1_000).unwrap();
        assert_eq!(e.searched, 180);
        assert_eq!(e.points.len() % 6, 0);
        assert!(!e.points.is_empty());
        assert!(e.all_fibers_are_torsors());
    }

    #[test]
    fn rational_lang_value_is_w_inverse() {
        let c = ctx(2, 2, 2);
        for g in rational_group(&c, 1_000).unwrap() {
            assert_eq!(c.lang_value(&g).unwrap(), c.w_inv);
        }
    }

    #[test]
    fn canonical_points_are_fixed() {
        let c = ctx(2, 2, 2);
        let e = enumerate_yw(&c, 1_000).unwrap();
        for g in &e.points {
            assert_eq!(&c.canonicalize(g).unwrap().rep, g);
        }
    }

    #[test]
    fn canonicalize_constant_on_cosets() {
        let c = ctx(3, 2, 3);
        let e = enumerate_yw_by_fibers(&c, 1_000_000).unwrap();
        assert!(!e.points.is_empty());
        let ns = c.n_elements();
        for g in e.points.iter().step_by(97) {
            for n in &ns {
                let moved = c.mul(g, n);
                let (pt, steps) = c.canonicalize_traced(&moved).unwrap();
                assert_eq!(&pt.rep, g);
                assert!(steps <= c.ld.n as usize);
            }
        }
    }

    #[test]
    fn fiber_route_matches_exhaustive() {
        for (n, q, m) in [(2, 2, 1), (2, 2, 2), (2, 3, 2), (3, 2, 2)] {
            let c = ctx(n, q, m);
            let mut a = enumerate_yw(&c, 1_000_000).unwrap();
            a.points.sort();
            let b = enumerate_yw_by_fibers(&c, 1_000_000).unwrap();
            assert_eq!(a.points, b.points);
            assert_eq!(a.fibers, b.fibers);
        }
        let c = ctx(3, 2, 3);
        let b = enumerate_yw_by_fibers(&c, 1_000_000).unwrap();
        assert!(b.all_fibers_are_torsors());
        assert!(b.points.iter().all(|g| c.is_canonical(g)));
    }

    #[test]
    fn phi_w_identity_and_nilpotence() {
        let c = ctx(3, 2, 2);
        assert_eq!(c.phi_w(&c.identity()).unwrap(), c.identity());
        assert_eq!(check_phi_w(&c).unwrap(), (true, true));
    }

    #[test]
    fn torus_fixed_points() {
        let c = ctx(2, 2, 2);
        assert_eq!(m_wsigma_points(&c, 1_000_000).unwrap().order, 3);
        let c = ctx(3, 2, 3);
        assert_eq!(m_wsigma_points(&c, 1_000_000).unwrap().order, 7);
    }

    #[test]
    fn inertia_examples() {
        let c = ctx(2, 2, 2);
        let z = c.field.root_of_unity(3).unwrap();
        let t = inertia_torus_inverse(&c.field, &c.ld, 1).unwrap();
        assert_eq!(t, vec![c.field.inv(&z).unwrap(), c.field.pow(c.field.inv(&z).unwrap(), 2)]);
        assert_eq!(inertia_torus_inverse(&c.field, &c.ld, 0).unwrap(), vec![Fq(1), Fq(1)]);
        assert_eq!(inertia_torus_inverse(&c.field, &c.ld, 3).unwrap(), vec![Fq(1), Fq(1)]);
    }

    #[test]
    fn point_format_round_trip() {
        let c = ctx(2, 2, 2);
        let e = enumerate_yw(&c, 1_000).unwrap();
        for g in &e.points {
            assert_eq!(&c.parse_matrix(&c.format_matrix(g)).unwrap(), g);
        }
    }
}
