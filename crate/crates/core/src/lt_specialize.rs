//! Specialization of GL_n Lubin-Tate level vectors `z_1 = (t_1, …, t_n)`:
//! break normal form, the flag built from the breaks, and the independent
//! exterior-power oracle.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::dl_variety::DlContext;
use crate::error::{Error, Result};
use crate::finite_field::{Fq, GaloisField};
use crate::finite_linear::{moore_det_with, FqMatrix};
use crate::matrix::{self, Matrix};
use crate::puiseux::{solve_sigma_lift, Puiseux, PuiseuxMatrix, PuiseuxRing};
use crate::root_datum::rat;
use crate::scalar::{Field, Ring};
use crate::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelVector {
    pub t: Vec<Puiseux>,
}

impl LevelVector {
    /// Every coordinate must have a visible term of positive valuation.
    pub fn new(t: Vec<Puiseux>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::domain("empty level vector"));
        }
        for (i, x) in t.iter().enumerate() {
            match x.val() {
                None => return Err(Error::domain(format!("coordinate {} vanishes to precision", i + 1))),
                Some(v) if !v.is_positive() => {
                    return Err(Error::domain(format!("coordinate {} has valuation {v} ≤ 0", i + 1)))
                }
                _ => {}
            }
        }
        Ok(LevelVector { t })
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn valuations(&self) -> Vec<Rat> {
        self.t.iter().map(|x| x.val().unwrap()).collect()
    }

    fn leading(&self) -> Vec<Fq> {
        self.t.iter().map(|x| x.leading().unwrap().1).collect()
    }
}

/// `p♭ z_1 = σ^n(z_1) + Σ_{1≤i≤n-1} u_{i+1} σ^i(z_1)` coordinatewise.
pub fn verify_level_equation(ring: &PuiseuxRing, z1: &LevelVector, u_flats: &[Puiseux], p_flat: &Puiseux) -> Result<bool> {
    let n = z1.n();
    if u_flats.len() + 1 != n {
        return Err(Error::Dimension {
            expected: n - 1,
            got: u_flats.len(),
        });
    }
    for t in &z1.t {
        let lhs = ring.mul(p_flat, t);
        let mut rhs = ring.qpower(t, n as u32);
        for (i, ui) in u_flats.iter().enumerate() {
            rhs = ring.add(&rhs, &ring.mul(ui, &ring.qpower(t, i as u32 + 1)));
        }
        let diff = ring.sub(&lhs, &rhs);
        let v = lhs.val().unwrap_or_else(Rat::zero);
        match diff.trunc() {
            Some(tr) if tr <= v => {
                return Err(Error::precision(format!("comparison only up to u^{tr}, below the valuation {v}")))
            }
            _ => {}
        }
        if !diff.is_zero_to_precision() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest `j` with `a_j` in the `F_q`-span of `a_0..a_{j-1}`, with the
/// coefficients.
pub fn fq_dependency(field: &GaloisField, a: &[Fq]) -> Option<(usize, Vec<Fq>)> {
    let base = field.base_elements();
    for j in 0..a.len() {
        if a[j] == Fq(0) {
            return Some((j, vec![Fq(0); j]));
        }
        let total = base.len().pow(j as u32);
        for idx in 1..total {
            let mut v = idx;
            let coeffs: Vec<Fq> = (0..j)
                .map(|_| {
                    let c = base[v % base.len()];
                    v /= base.len();
                    c
                })
                .collect();
            let s = coeffs
                .iter()
                .zip(a)
                .fold(Fq(0), |acc, (c, x)| field.add(&acc, &field.mul(c, x)));
            if s == a[j] {
                return Some((j, coeffs));
            }
        }
    }
    None
}

pub fn fq_independent(field: &GaloisField, a: &[Fq]) -> bool {
    fq_dependency(field, a).is_none()
}

#[derive(Clone, Debug)]
pub struct Normalized {
    /// `t_normalized = t · gamma`, with `gamma ∈ GL_n(F_q)`.
    pub gamma: FqMatrix,
    pub t: LevelVector,
}

/// Right-translate by `GL_n(F_q)` until valuations are sorted and leading
/// coefficients within each valuation group are `F_q`-independent.
pub fn normalize_breaks(ring: &PuiseuxRing, t: &LevelVector) -> Result<Normalized> {
    let f = &ring.field;
    let n = t.n();
    let mut cur = t.t.clone();
    let mut gamma = matrix::identity(f, n);
    let mut steps = 0usize;
    loop {
        // stable sort by valuation, permuting gamma's columns alongside
        let mut order: Vec<usize> = (0..n).collect();
        let vals: Vec<Rat> = cur
            .iter()
            .map(|x| {
                x.val()
                    .ok_or_else(|| Error::precision("a coordinate vanished to the working precision"))
            })
            .collect::<Result<_>>()?;
        order.sort_by(|&a, &b| vals[a].cmp(&vals[b]));
        cur = order.iter().map(|&i| cur[i].clone()).collect();
        let g_old = gamma.clone();
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                gamma[(r, new)] = g_old[(r, old)];
            }
        }
        let vals: Vec<Rat> = order.iter().map(|&i| vals[i].clone()).collect();
        // first dependent coordinate in any group
        let mut fix = None;
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end < n && vals[end] == vals[start] {
                end += 1;
            }
            let lead: Vec<Fq> = cur[start..end].iter().map(|x| x.leading().unwrap().1).collect();
            if let Some((j, coeffs)) = fq_dependency(f, &lead) {
                fix = Some((start, j, coeffs));
                break;
            }
            start = end;
        }
        let Some((start, j, coeffs)) = fix else {
            return Ok(Normalized {
                gamma,
                t: LevelVector { t: cur },
            });
        };
        let target = start + j;
        for (k, c) in coeffs.iter().enumerate() {
            if *c == Fq(0) {
                continue;
            }
            let src = start + k;
            cur[target] = ring.sub(&cur[target], &ring.scalar_mul(*c, &cur[src]));
            for r in 0..n {
                let d = f.mul(c, &gamma[(r, src)]);
                gamma[(r, target)] = f.sub(&gamma[(r, target)], &d);
            }
        }
        if cur[target].is_zero_to_precision() {
            return Err(Error::precision(format!(
                "coordinate {} eliminated to zero within the working precision",
                target + 1
            )));
        }
        steps += 1;
        if steps > 64 * n * n {
            return Err(Error::invariant("normalize-breaks", "elimination did not terminate"));
        }
    }
}

/// Whether conditions (1) and (2) hold: sorted valuations and independent
/// leading coefficients inside each group.
pub fn is_normalized(field: &GaloisField, t: &LevelVector) -> bool {
    let vals = t.valuations();
    if vals.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    let lead = t.leading();
    let mut start = 0;
    while start < vals.len() {
        let mut end = start;
        while end < vals.len() && vals[end] == vals[start] {
            end += 1;
        }
        if !fq_independent(field, &lead[start..end]) {
            return false;
        }
        start = end;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakData {
    pub n: usize,
    /// `0 = i_0 < i_1 < … < i_k = n`.
    pub breaks: Vec<usize>,
    pub lengths: Vec<usize>,
    /// `p̄_j`: residues `t_s / t_{i_j}` for `i_{j-1} < s ≤ i_j`.
    pub residues: Vec<Vec<Fq>>,
}

impl BreakData {
    pub fn stratum(&self) -> Vec<usize> {
        self.lengths.clone()
    }
}

pub fn breaks(ring: &PuiseuxRing, t: &LevelVector) -> Result<BreakData> {
    let f = &ring.field;
    if !is_normalized(f, t) {
        return Err(Error::domain("level vector is not in break normal form"));
    }
    let n = t.n();
    let vals = t.valuations();
    let lead = t.leading();
    let mut bks = vec![0];
    for s in 1..n {
        if vals[s] != vals[s - 1] {
            bks.push(s);
        }
    }
    bks.push(n);
    let mut residues = Vec::new();
    let mut lengths = Vec::new();
    for w in bks.windows(2) {
        let last = lead[w[1] - 1];
        let li = f.inv(&last).unwrap();
        let p: Vec<Fq> = (w[0]..w[1]).map(|s| f.mul(&lead[s], &li)).collect();
        if moore_det_with(f, &p, ring.q())? == Fq(0) {
            return Err(Error::invariant("moore-criterion", "independent residues gave a singular Moore matrix"));
        }
        residues.push(p);
        lengths.push(w[1] - w[0]);
    }
    Ok(BreakData {
        n,
        breaks: bks,
        lengths,
        residues,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagPoint {
    /// `Λ_s` as reduced row-echelon bases, `s = 1..n`.
    pub spaces: Vec<FqMatrix>,
}

impl FlagPoint {
    /// `σ(Λ_{s-1}) ⊆ Λ_s` for all `s`.
    pub fn is_sigma_compatible(&self, field: &GaloisField) -> bool {
        self.spaces.windows(2).all(|w| {
            let s = w[0].map(|&x| field.frobenius(x));
            matrix::row_space_contained(field, &s, &w[1])
        })
    }

    pub fn is_nested(&self, field: &GaloisField) -> bool {
        self.spaces
            .windows(2)
            .all(|w| matrix::row_space_contained(field, &w[0], &w[1]))
            && self.spaces.iter().enumerate().all(|(i, s)| s.rows() == i + 1)
    }
}

fn rref_rows(field: &GaloisField, rows: Vec<Vec<Fq>>, n: usize) -> FqMatrix {
    let m = Matrix::from_vec(rows.len(), n, rows.into_iter().flatten().collect()).unwrap();
    matrix::row_space_basis(field, &m)
}

/// `Λ_s = Λ_{s-1} + σ^{s - i_{j-1} - 1}(p̄_j)`.
pub fn flag_from_breaks(ring: &PuiseuxRing, bd: &BreakData) -> Result<FlagPoint> {
    let f = &ring.field;
    let n = bd.n;
    let mut vecs: Vec<Vec<Fq>> = Vec::new();
    let mut spaces = Vec::new();
    for (j, w) in bd.breaks.windows(2).enumerate() {
        for s in w[0] + 1..=w[1] {
            let k = (s - w[0] - 1) as i64;
            let mut v = vec![Fq(0); n];
            for (idx, &c) in bd.residues[j].iter().enumerate() {
                v[w[0] + idx] = f.frobenius_k(c, k);
            }
            vecs.push(v);
            let basis = rref_rows(f, vecs.clone(), n);
            if basis.rows() != s {
                return Err(Error::invariant("moore-criterion", format!("Λ_{s} has dimension {}", basis.rows())));
            }
            spaces.push(basis);
        }
    }
    Ok(FlagPoint { spaces })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant by cofactor expansion along the first row.
fn det_series(ring: &PuiseuxRing, m: &[Vec<Puiseux>]) -> Puiseux {
    let k = m.len();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = ring.zero();
    for c in 0..k {
        let minor: Vec<Vec<Puiseux>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = ring.mul(&m[0][c], &det_series(ring, &minor));
        acc = if c % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
    }
    acc
}

/// Reduce `(ϖ'_i)^{-1} (z_1 ∧ … ∧ z_i)` with `z_k = σ^{k-1}(z_1)` and read
/// off `Λ_i = {v : v ∧ ω_i = 0}`.
pub fn wedge_oracle(ring: &PuiseuxRing, t: &LevelVector) -> Result<FlagPoint> {
    let f = &ring.field;
    let n = t.n();
    let q = ring.q();
    let z: Vec<Vec<Puiseux>> = (0..n).map(|k| t.t.iter().map(|x| ring.qpower(x, k as u32)).collect()).collect();
    let vals = t.valuations();
    let lead = t.leading();
    let mut spaces = Vec::with_capacity(n);
    for i in 1..=n {
        // ϖ'_i = Π_{j ≤ i} σ^{i-j}(t_j): valuation and leading coefficient
        let mut v = Rat::zero();
        let mut lc = Fq(1);
        for j in 1..=i {
            let e = q.pow((i - j) as u32);
            v += &vals[j - 1] * rat(e as i64);
            lc = f.mul(&lc, &f.pow(lead[j - 1], e));
        }
        let lci = f.inv(&lc).unwrap();
        let cols = subsets(n, i);
        let mut omega = Vec::with_capacity(cols.len());
        for s in &cols {
            let sub: Vec<Vec<Puiseux>> = (0..i).map(|r| s.iter().map(|&c| z[r][c].clone()).collect()).collect();
            let d = det_series(ring, &sub);
            if let Some(dv) = d.val() {
                if dv < v {
                    return Err(Error::invariant(
                        "orderwedge-integral",
                        format!("minor {s:?} has valuation {dv} below {v}"),
                    ));
                }
            }
            omega.push(f.mul(&d.coeff(&v)?, &lci));
        }
        if omega.iter().all(|&x| x == Fq(0)) {
            return Err(Error::invariant("orderwedge-nonzero", format!("reduction of the {i}-th wedge vanishes")));
        }
        let space = if i == n {
            matrix::identity(f, n)
        } else {
            // v ∧ ω over (i+1)-subsets: e_a ∧ e_S = (-1)^{#{s ∈ S : s < a}} e_{S ∪ a}
            let big = subsets(n, i + 1);
            let mut rows = Vec::with_capacity(big.len());
            for tset in &big {
                let mut row = vec![Fq(0); n];
                for &a in tset {
                    let rest: Vec<usize> = tset.iter().copied().filter(|&x| x != a).collect();
                    let idx = cols.iter().position(|c| *c == rest).unwrap();
                    let sign = tset.iter().filter(|&&x| x < a).count();
                    row[a] = if sign % 2 == 0 { omega[idx] } else { f.neg(&omega[idx]) };
                }
                rows.push(row);
            }
            let m = Matrix::from_vec(rows.len(), n, rows.into_iter().flatten().collect()).unwrap();
            let ker = matrix::kernel(f, &m);
            if ker.len() != i {
                return Err(Error::invariant(
                    "orderwedge-decomposable",
                    format!("reduced {i}-vector is not decomposable"),
                ));
            }
            rref_rows(f, ker, n)
        };
        spaces.push(space);
    }
    Ok(FlagPoint { spaces })
}

/// Both specializations of a level vector after normalization.
#[derive(Clone, Debug)]
pub struct SpecializationReport {
    pub normalized: Normalized,
    pub breaks: BreakData,
    pub flag: FlagPoint,
    pub oracle: FlagPoint,
}

impl SpecializationReport {
    pub fn agrees(&self) -> bool {
        self.flag == self.oracle
    }
}

pub fn specialize(ring: &PuiseuxRing, t: &LevelVector) -> Result<SpecializationReport> {
    let normalized = normalize_breaks(ring, t)?;
    let bd = breaks(ring, &normalized.t)?;
    let flag = flag_from_breaks(ring, &bd)?;
    let oracle = wedge_oracle(ring, &normalized.t)?;
    Ok(SpecializationReport {
        normalized,
        breaks: bd,
        flag,
        oracle,
    })
}

/// `3 · max valuation + 3`.
pub fn default_trunc(vals: &[Rat]) -> Rat {
    let m = vals.iter().max().cloned().unwrap_or_else(Rat::zero);
    m * rat(3) + rat(3)
}

/// Run `f` at `t`, and once more at `2t` after a precision error.
pub fn with_precision_retry<T>(t: &Rat, mut f: impl FnMut(&Rat) -> Result<T>) -> Result<T> {
    match f(t) {
        Err(Error::Precision(_)) => f(&(t * rat(2))),
        other => other,
    }
}

/// A random level vector whose valuation groups have `F_q`-independent
/// leading coefficients, mixed by a random element of `GL_n(F_q)`.
pub fn random_level_vector<R: rand::Rng>(ring: &PuiseuxRing, n: usize, rng: &mut R) -> Result<LevelVector> {
    let f = &ring.field;
    if (f.m() as usize) < n {
        return Err(Error::domain("coefficient field too small for independent groups"));
    }
    let ram = (ring.q().pow(n as u32) - 1).max(1);
    // composition of n into groups
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.gen_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    let mut val_num = 0i64;
    let mut lead_vals = Vec::new();
    let mut leads = Vec::new();
    for &s in &sizes {
        val_num += rng.gen_range(1..=ram as i64);
        loop {
            let cand: Vec<Fq> = (0..s).map(|_| Fq(rng.gen_range(1..f.size()))).collect();
            if fq_independent(f, &cand) {
                leads.extend(cand);
                break;
            }
        }
        lead_vals.extend(std::iter::repeat(val_num).take(s));
    }
    let vals: Vec<Rat> = lead_vals.iter().map(|&k| Rat::new(k.into(), (ram as i64).into())).collect();
    let trunc = default_trunc(&vals);
    let tnum = (&trunc * rat(ram as i64)).ceil().to_integer().to_i64().unwrap();
    let mut t = Vec::with_capacity(n);
    for (k, &lv) in lead_vals.iter().enumerate() {
        let mut terms = vec![(lv, leads[k])];
        for _ in 0..rng.gen_range(0..4) {
            let e = rng.gen_range(lv + 1..tnum.max(lv + 2));
            terms.push((e, Fq(rng.gen_range(0..f.size()))));
        }
        t.push(Puiseux::from_terms(ram, Some(tnum), terms));
    }
    let gamma = random_gl_fq(f, n, rng);
    let mixed: Vec<Puiseux> = (0..n)
        .map(|j| {
            (0..n).fold(ring.zero(), |acc, i| ring.add(&acc, &ring.scalar_mul(gamma[(i, j)], &t[i])))
        })
        .collect();
    LevelVector::new(mixed)
}

/// A uniformly random element of `GL_n(F_q)` inside the coefficient field.
pub fn random_gl_fq<R: rand::Rng>(f: &GaloisField, n: usize, rng: &mut R) -> FqMatrix {
    let base = f.base_elements();
    loop {
        let data: Vec<Fq> = (0..n * n).map(|_| base[rng.gen_range(0..base.len())]).collect();
        let m = Matrix::from_vec(n, n, data).unwrap();
        if matrix::det(f, &m).unwrap() != Fq(0) {
            return m;
        }
    }
}

/// Level data attached to a point of `Y(w)`.
#[derive(Clone, Debug)]
pub struct PointLevel {
    pub z1: LevelVector,
    /// `u_2, …, u_n`.
    pub u_flats: Vec<Puiseux>,
    pub h: PuiseuxMatrix,
    pub defects: Vec<Rat>,
}

/// Lubin-Tate case: with `u_α = u^{r_α}(k_α + extra_α)`, solve
/// `h σ(h)^{-1} = Π i_α(u^{-r_α} u_α) w` from `h ≡ g0^{-1}` and return
/// `z_1`, the first row of `(u^{1/e})^{eλ} h`.
pub fn level_vector_from_point(
    ctx: &DlContext,
    g0: &FqMatrix,
    extra: &[Puiseux],
    trunc: &Rat,
) -> Result<PointLevel> {
    let n = ctx.n;
    let f = &ctx.field;
    let ring = PuiseuxRing::new(f.clone());
    let slots: Vec<(usize, usize)> = ctx.k_roots.iter().map(|&r| ctx.slot(r)).collect();
    if slots.len() + 1 != n || slots.iter().any(|&(i, _)| i != 0) {
        return Err(Error::Unsupported("level vectors need μ = (-1, 0, …, 0)".into()));
    }
    if extra.len() != slots.len() {
        return Err(Error::Dimension {
            expected: slots.len(),
            got: extra.len(),
        });
    }
    let k = ctx.lang_value(g0)?;
    if !ctx.in_k(&k) {
        return Err(Error::domain("g0 is not a canonical representative"));
    }
    let mut x = vec![ring.zero(); n];
    let mut r_alpha = vec![Rat::zero(); n];
    for ((&root, &(_, j)), ex) in ctx.k_roots.iter().zip(&slots).zip(extra) {
        if ex.val().is_some_and(|v| !v.is_positive()) {
            return Err(Error::domain("extra terms must have positive valuation"));
        }
        x[j] = ring.add(&Puiseux::constant(k[(0, j)]), ex);
        r_alpha[j] = ctx.ld.r_alpha[root].clone();
    }
    let wmat = crate::puiseux::constant_matrix(&ctx.w);
    let mut a0 = matrix::identity(&ring, n);
    for j in 1..n {
        a0[(0, j)] = x[j].clone();
    }
    let a = matrix::mul(&ring, &a0, &wmat)?;
    let a = crate::puiseux::truncate_matrix(&a, trunc);
    let h0 = ctx.inv(g0)?;
    let lift = solve_sigma_lift(&ring, &a, &h0, trunc)?;
    let lam1 = ctx.ld.lambda[0].clone();
    let z1: Vec<Puiseux> = (0..n).map(|j| lift.h[(0, j)].shift(&lam1)).collect();
    let u_flats: Vec<Puiseux> = (1..n).map(|j| x[j].shift(&r_alpha[j])).collect();
    Ok(PointLevel {
        z1: LevelVector::new(z1)?,
        u_flats,
        h: lift.h,
        defects: lift.defects,
    })
}
