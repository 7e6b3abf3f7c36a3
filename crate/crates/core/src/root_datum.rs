//! Based root data with a pinned finite-order automorphism.
//!
//! Roots are covectors on the cocharacter lattice `X_*(T) = Z^rank` and
//! coroots are vectors; the pairing is the coordinate dot product. A lattice
//! map `M` acts on vectors by `x -> M x` and on covectors by `a -> a M^{-1}`,
//! which keeps the pairing invariant.

use std::collections::{HashMap, VecDeque};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::{IntMatrix, Int, Rat, Q, Z};

pub const DEFAULT_WEYL_BOUND: usize = 1_000_000;
const MAX_SIGMA_ORDER: u64 = 10_000;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

/// `<alpha, nu>` for an integral covector and a rational cocharacter.
pub fn pairing(alpha: &[i64], nu: &[Rat]) -> Result<Rat> {
    if alpha.len() != nu.len() {
        return Err(Error::Dimension {
            expected: alpha.len(),
            got: nu.len(),
        });
    }
    Ok(alpha
        .iter()
        .zip(nu)
        .fold(Rat::zero(), |acc, (&a, x)| acc + x * Int::from(a)))
}

pub fn pairing_int(alpha: &[i64], nu: &[i64]) -> i64 {
    alpha.iter().zip(nu).map(|(a, b)| a * b).sum()
}

/// Inverse of an integer matrix with determinant `±1`.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let qm = m.map(|&x| rat(x));
    let inv = matrix::inverse(&Q::new(), &qm)?.ok_or_else(|| Error::domain("singular lattice map"))?;
    let mut data = Vec::with_capacity(inv.data().len());
    for x in inv.data() {
        if !x.is_integer() {
            return Err(Error::domain("lattice map is not invertible over the integers"));
        }
        data.push(i64::try_from(x.to_integer()).map_err(|_| Error::domain("entry overflow"))?);
    }
    Matrix::from_vec(m.rows(), m.cols(), data)
}

/// An automorphism of `X_*(T)` together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeAut {
    pub mat: IntMatrix,
    pub inv: IntMatrix,
}

impl LatticeAut {
    pub fn new(mat: IntMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension {
                expected: mat.rows(),
                got: mat.cols(),
            });
        }
        let inv = unimodular_inverse(&mat)?;
        Ok(LatticeAut { mat, inv })
    }

    pub fn identity(n: usize) -> Self {
        let id = matrix::identity(&Z::new(), n);
        LatticeAut {
            mat: id.clone(),
            inv: id,
        }
    }

    pub fn rank(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_identity(&self) -> bool {
        matrix::is_identity(&Z::new(), &self.mat)
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        matrix::mat_vec(&Z::new(), &self.mat, v).expect("rank mismatch")
    }

    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        let m = self.mat.map(|&x| rat(x));
        matrix::mat_vec(&Q::new(), &m, v).expect("rank mismatch")
    }

    pub fn apply_covector(&self, a: &[i64]) -> Vec<i64> {
        matrix::vec_mat(&Z::new(), a, &self.inv).expect("rank mismatch")
    }

    pub fn inverse(&self) -> Self {
        LatticeAut {
            mat: self.inv.clone(),
            inv: self.mat.clone(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeAut) -> Self {
        let z = Z::new();
        LatticeAut {
            mat: matrix::mul(&z, &self.mat, &other.mat).expect("rank mismatch"),
            inv: matrix::mul(&z, &other.inv, &self.inv).expect("rank mismatch"),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        let z = Z::new();
        LatticeAut {
            mat: matrix::pow(&z, &self.mat, k).expect("square"),
            inv: matrix::pow(&z, &self.inv, k).expect("square"),
        }
    }

    /// Multiplicative order, searching up to `bound`.
    pub fn order(&self, bound: u64) -> Option<u64> {
        let mut cur = self.clone();
        for k in 1..=bound {
            if cur.is_identity() {
                return Some(k);
            }
            cur = cur.compose(self);
        }
        None
    }

    /// For a permutation matrix, the map `i -> j` with `M e_i = e_j`.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let n = self.rank();
        let mut perm = vec![usize::MAX; n];
        for i in 0..n {
            let col = self.mat.column(i);
            let ones: Vec<usize> = (0..n).filter(|&j| col[j] == 1).collect();
            if ones.len() != 1 || col.iter().filter(|&&x| x != 0).count() != 1 {
                return None;
            }
            perm[i] = ones[0];
        }
        Some(perm)
    }

    pub fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Matrix::filled(n, n, 0i64);
        for (i, &j) in perm.iter().enumerate() {
            m[(j, i)] = 1;
        }
        LatticeAut::new(m).expect("permutation matrix")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub aut: LatticeAut,
    /// Reduced word in the simple reflections, indexed by position in
    /// `simple_roots`.
    pub word: Option<Vec<usize>>,
}

impl WeylElement {
    pub fn matrix(&self) -> &IntMatrix {
        &self.aut.mat
    }

    pub fn length(&self) -> Option<usize> {
        self.word.as_ref().map(Vec::len)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub dominant: bool,
    pub minuscule: bool,
}

#[derive(Clone, Debug)]
pub struct BasedRootDatum {
    rank: usize,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    simple: Vec<usize>,
    sigma: LatticeAut,
    sigma_order: u64,
    center: Vec<Vec<i64>>,
    heights: Vec<i64>,
    index: HashMap<Vec<i64>, usize>,
}

impl BasedRootDatum {
    pub fn new(
        rank: usize,
        roots: Vec<Vec<i64>>,
        coroots: Vec<Vec<i64>>,
        simple: Vec<usize>,
        sigma: Option<IntMatrix>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::domain("rank must be positive"));
        }
        if roots.len() != coroots.len() {
            return Err(Error::Dimension {
                expected: roots.len(),
                got: coroots.len(),
            });
        }
        for v in roots.iter().chain(&coroots) {
            if v.len() != rank {
                return Err(Error::Dimension {
                    expected: rank,
                    got: v.len(),
                });
            }
        }
        let mut index = HashMap::new();
        for (i, a) in roots.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::invariant("root-datum", format!("duplicate root {a:?}")));
            }
        }
        for (a, c) in roots.iter().zip(&coroots) {
            if pairing_int(a, c) != 2 {
                return Err(Error::invariant(
                    "root-datum",
                    format!("<{a:?}, {c:?}> != 2"),
                ));
            }
        }
        if simple.iter().any(|&s| s >= roots.len()) {
            return Err(Error::domain("simple root index out of range"));
        }
        let sigma = match sigma {
            Some(m) => LatticeAut::new(m)?,
            None => LatticeAut::identity(rank),
        };
        if sigma.rank() != rank {
            return Err(Error::Dimension {
                expected: rank,
                got: sigma.rank(),
            });
        }
        let sigma_order = sigma
            .order(MAX_SIGMA_ORDER)
            .ok_or_else(|| Error::invariant("root-datum", "sigma is not of finite order"))?;
        let heights = simple_coefficients(&roots, &simple)?;
        let mut d = BasedRootDatum {
            rank,
            roots,
            coroots,
            simple,
            sigma,
            sigma_order,
            center: Vec::new(),
            heights,
            index,
        };
        d.center = d.compute_center();
        d.validate()?;
        Ok(d)
    }

    fn compute_center(&self) -> Vec<Vec<i64>> {
        if self.roots.is_empty() {
            return (0..self.rank)
                .map(|i| (0..self.rank).map(|j| i64::from(i == j)).collect())
                .collect();
        }
        let m = Matrix::from_rows(self.roots.iter().map(|r| rat_vec(r)).collect()).unwrap();
        matrix::kernel(&Q::new(), &m)
            .into_iter()
            .map(|v| primitive_integer_vector(&v))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        for s in 0..self.simple.len() {
            let refl = self.simple_reflection(s);
            for a in &self.roots {
                if self.root_index(&refl.apply_covector(a)).is_none() {
                    return Err(Error::invariant(
                        "root-datum",
                        format!("simple reflection {s} does not permute the roots"),
                    ));
                }
            }
        }
        for (i, a) in self.roots.iter().enumerate() {
            let sa = self.sigma.apply_covector(a);
            let Some(j) = self.root_index(&sa) else {
                return Err(Error::invariant("root-datum", "sigma does not permute the roots"));
            };
            if self.sigma.apply(&self.coroots[i]) != self.coroots[j] {
                return Err(Error::invariant("root-datum", "sigma does not match coroots"));
            }
        }
        for &s in &self.simple {
            let sa = self.sigma.apply_covector(&self.roots[s]);
            if !self.simple.contains(&self.root_index(&sa).unwrap()) {
                return Err(Error::invariant(
                    "root-datum",
                    "sigma does not preserve the simple roots",
                ));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &[i64] {
        &self.roots[i]
    }

    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn simple_roots(&self) -> &[usize] {
        &self.simple
    }

    pub fn sigma(&self) -> &LatticeAut {
        &self.sigma
    }

    pub fn sigma_order(&self) -> u64 {
        self.sigma_order
    }

    pub fn is_split(&self) -> bool {
        self.sigma.is_identity()
    }

    pub fn center_cochars(&self) -> &[Vec<i64>] {
        &self.center
    }

    pub fn root_index(&self, a: &[i64]) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Sum of simple-root coefficients; negative for negative roots.
    pub fn height(&self, i: usize) -> i64 {
        self.heights[i]
    }

    pub fn is_positive(&self, i: usize) -> bool {
        self.heights[i] > 0
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.roots.len()).filter(|&i| self.is_positive(i)).collect()
    }

    pub fn max_height(&self) -> i64 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    pub fn negate(&self, i: usize) -> usize {
        let neg: Vec<i64> = self.roots[i].iter().map(|x| -x).collect();
        self.root_index(&neg).expect("roots closed under negation")
    }

    /// Image of a root under a lattice automorphism (covector action).
    pub fn act_on_root(&self, g: &LatticeAut, i: usize) -> Option<usize> {
        self.root_index(&g.apply_covector(&self.roots[i]))
    }

    pub fn simple_reflection(&self, s: usize) -> LatticeAut {
        let a = &self.roots[self.simple[s]];
        let c = &self.coroots[self.simple[s]];
        let mut m = matrix::identity(&Z::new(), self.rank);
        for i in 0..self.rank {
            for j in 0..self.rank {
                m[(i, j)] -= c[i] * a[j];
            }
        }
        // reflections are involutions
        LatticeAut {
            mat: m.clone(),
            inv: m,
        }
    }

    /// Whether a rational cocharacter lies in `X_*(Z_G)_Q`.
    pub fn is_central(&self, nu: &[Rat]) -> bool {
        self.roots.iter().all(|a| pairing(a, nu).unwrap().is_zero())
    }

    pub fn classify_cocharacter(&self, mu: &[i64]) -> Classification {
        let dominant = self
            .simple
            .iter()
            .all(|&s| pairing_int(&self.roots[s], mu) >= 0);
        let minuscule = self.roots.iter().all(|a| pairing_int(a, mu).abs() <= 1);
        Classification { dominant, minuscule }
    }

    pub fn two_rho(&self) -> Vec<i64> {
        let mut out = vec![0; self.rank];
        for i in self.positive_roots() {
            for (o, x) in out.iter_mut().zip(&self.roots[i]) {
                *o += x;
            }
        }
        out
    }

    pub fn weyl_group(&self) -> Result<Vec<WeylElement>> {
        self.weyl_group_bounded(DEFAULT_WEYL_BOUND)
    }

    /// Breadth-first closure of the simple reflections; words are reduced.
    pub fn weyl_group_bounded(&self, bound: usize) -> Result<Vec<WeylElement>> {
        let gens: Vec<LatticeAut> = (0..self.simple.len()).map(|s| self.simple_reflection(s)).collect();
        let id = LatticeAut::identity(self.rank);
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut out = vec![WeylElement {
            aut: id.clone(),
            word: Some(Vec::new()),
        }];
        seen.insert(id.mat.data().to_vec(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for (s, g) in gens.iter().enumerate() {
                let next = out[k].aut.compose(g);
                let key = next.mat.data().to_vec();
                if seen.contains_key(&key) {
                    continue;
                }
                if out.len() >= bound {
                    return Err(Error::size("Weyl group", format!("> {bound}"), bound));
                }
                let mut word = out[k].word.clone().unwrap();
                word.push(s);
                seen.insert(key, out.len());
                out.push(WeylElement {
                    aut: next,
                    word: Some(word),
                });
                queue.push_back(out.len() - 1);
            }
        }
        Ok(out)
    }

    /// Direct sum of two data; sigma acts blockwise.
    pub fn product(&self, other: &BasedRootDatum) -> Result<BasedRootDatum> {
        let (r1, r2) = (self.rank, other.rank);
        let pad = |v: &[i64], left: bool| -> Vec<i64> {
            let mut out = vec![0; r1 + r2];
            let off = if left { 0 } else { r1 };
            out[off..off + v.len()].copy_from_slice(v);
            out
        };
        let mut roots: Vec<Vec<i64>> = self.roots.iter().map(|r| pad(r, true)).collect();
        roots.extend(other.roots.iter().map(|r| pad(r, false)));
        let mut coroots: Vec<Vec<i64>> = self.coroots.iter().map(|r| pad(r, true)).collect();
        coroots.extend(other.coroots.iter().map(|r| pad(r, false)));
        let mut simple = self.simple.clone();
        simple.extend(other.simple.iter().map(|&s| s + self.roots.len()));
        let mut sig = Matrix::filled(r1 + r2, r1 + r2, 0i64);
        for i in 0..r1 {
            for j in 0..r1 {
                sig[(i, j)] = self.sigma.mat[(i, j)];
            }
        }
        for i in 0..r2 {
            for j in 0..r2 {
                sig[(r1 + i, r1 + j)] = other.sigma.mat[(i, j)];
            }
        }
        BasedRootDatum::new(r1 + r2, roots, coroots, simple, Some(sig))
    }

    /// `self × self` with sigma exchanging the two factors: the datum of a
    /// restriction of scalars along an unramified quadratic extension.
    pub fn swap_square(&self) -> Result<BasedRootDatum> {
        if !self.is_split() {
            return Err(Error::Unsupported("swap_square of a nonsplit datum".into()));
        }
        let d = self.product(self)?;
        let r = self.rank;
        let mut sig = Matrix::filled(2 * r, 2 * r, 0i64);
        for i in 0..r {
            sig[(r + i, i)] = 1;
            sig[(i, r + i)] = 1;
        }
        BasedRootDatum::new(2 * r, d.roots, d.coroots, d.simple, Some(sig))
    }

    pub fn with_sigma(&self, sigma: IntMatrix) -> Result<BasedRootDatum> {
        BasedRootDatum::new(
            self.rank,
            self.roots.clone(),
            self.coroots.clone(),
            self.simple.clone(),
            Some(sigma),
        )
    }
}

/// GL_n with positive roots `e_i - e_j` for `i > j`, so that
/// `(-1, 0, ..., 0)` is dominant. Roots are listed in lexicographic `(i, j)`
/// order; simple roots are `e_{i+1} - e_i`.
pub fn gl_datum(n: usize) -> Result<BasedRootDatum> {
    if n == 0 {
        return Err(Error::domain("GL_0 is not a group"));
    }
    let mut roots = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut a = vec![0; n];
                a[i] = 1;
                a[j] = -1;
                roots.push(a);
                pairs.push((i, j));
            }
        }
    }
    let simple = (0..n.saturating_sub(1))
        .map(|i| pairs.iter().position(|&p| p == (i + 1, i)).unwrap())
        .collect();
    BasedRootDatum::new(n, roots.clone(), roots, simple, None)
}

/// For `e_i - e_j` in GL_n coordinates, the pair `(i, j)`.
pub fn gl_root_pair(alpha: &[i64]) -> Option<(usize, usize)> {
    let i = alpha.iter().position(|&x| x == 1)?;
    let j = alpha.iter().position(|&x| x == -1)?;
    let support = alpha.iter().filter(|&&x| x != 0).count();
    (support == 2).then_some((i, j))
}

fn simple_coefficients(roots: &[Vec<i64>], simple: &[usize]) -> Result<Vec<i64>> {
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    let rank = roots[0].len();
    let q = Q::new();
    // columns are simple roots
    let mut s = Matrix::filled(rank, simple.len(), Rat::zero());
    for (k, &idx) in simple.iter().enumerate() {
        for i in 0..rank {
            s[(i, k)] = rat(roots[idx][i]);
        }
    }
    if !simple.is_empty() && matrix::rank(&q, &s) != simple.len() {
        return Err(Error::invariant("root-datum", "simple roots are dependent"));
    }
    let mut heights = Vec::with_capacity(roots.len());
    for a in roots {
        let c = matrix::solve(&q, &s, &rat_vec(a))?
            .ok_or_else(|| Error::invariant("root-datum", format!("root {a:?} not in the span of simple roots")))?;
        if c.iter().any(|x| !x.is_integer()) {
            return Err(Error::invariant("root-datum", format!("root {a:?} not an integral combination")));
        }
        let pos = c.iter().all(|x| !x.is_negative());
        let neg = c.iter().all(|x| !x.is_positive());
        if pos == neg {
            return Err(Error::invariant("root-datum", format!("root {a:?} has mixed sign")));
        }
        let h: Rat = c.iter().cloned().sum();
        heights.push(i64::try_from(h.to_integer()).unwrap());
    }
    Ok(heights)
}

fn primitive_integer_vector(v: &[Rat]) -> Vec<i64> {
    use num_integer::Integer;
    let l = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Int> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| i64::try_from(x / &g).expect("small center coordinates"))
        .collect()
}
