//! Cartan decomposition `g = g1 · diag(u^{a_1}, …, u^{a_n}) · g2` over the
//! valuation ring of the truncated Puiseux field, and the resulting
//! specialization data.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fan::{locate, FanData, LocatedCone};
use crate::finite_field::Fq;
use crate::matrix::{self, Matrix};
use crate::puiseux::{
    inverse, mat_mul, matrices_agree, residue_matrix, Puiseux, PuiseuxMatrix, PuiseuxRing,
};
use crate::scalar::Ring;
use crate::Rat;

#[derive(Clone, Debug)]
pub struct CartanDecomposition {
    pub g1: PuiseuxMatrix,
    /// Nondecreasing exponents of the monomial middle factor.
    pub exponents: Vec<Rat>,
    pub g2: PuiseuxMatrix,
}

impl CartanDecomposition {
    pub fn middle(&self) -> PuiseuxMatrix {
        let n = self.exponents.len();
        let mut t = Matrix::filled(n, n, Puiseux::zero());
        for (i, a) in self.exponents.iter().enumerate() {
            t[(i, i)] = Puiseux::monomial(Fq(1), 0, 1).shift(a);
        }
        t
    }

    pub fn reassemble(&self, ring: &PuiseuxRing) -> PuiseuxMatrix {
        mat_mul(ring, &mat_mul(ring, &self.g1, &self.middle()), &self.g2)
    }
}

/// Smith-style elimination with least-valuation pivots.
pub fn cartan_decompose(ring: &PuiseuxRing, g: &PuiseuxMatrix) -> Result<CartanDecomposition> {
    let n = g.rows();
    if !g.is_square() {
        return Err(Error::Dimension {
            expected: n,
            got: g.cols(),
        });
    }
    let mut m = g.clone();
    let mut g1 = matrix::identity(ring, n);
    let mut g2 = matrix::identity(ring, n);
    let mut exponents = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(Rat, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if let Some(v) = m[(i, j)].val() {
                    if best.as_ref().map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            let exact = (k..n).all(|i| (k..n).all(|j| ring.is_zero(&m[(i, j)])));
            return Err(if exact {
                Error::domain("singular matrix")
            } else {
                Error::precision("remaining block vanishes to the working precision")
            });
        };
        if pi != k {
            m.swap_rows(k, pi);
            g1.swap_cols(k, pi);
        }
        if pj != k {
            m.swap_cols(k, pj);
            g2.swap_rows(k, pj);
        }
        let p_inv = ring.inv(&m[(k, k)])?;
        for i in k + 1..n {
            if m[(i, k)].is_zero_to_precision() {
                continue;
            }
            // row_i -= c row_k; g1 col_k += c col_i
            let c = ring.mul(&m[(i, k)], &p_inv);
            for j in 0..n {
                m[(i, j)] = ring.sub(&m[(i, j)], &ring.mul(&c, &m[(k, j)]));
                g1[(j, k)] = ring.add(&g1[(j, k)], &ring.mul(&c, &g1[(j, i)]));
            }
        }
        for j in k + 1..n {
            if m[(k, j)].is_zero_to_precision() {
                continue;
            }
            // col_j -= c col_k; g2 row_k += c row_j
            let c = ring.mul(&p_inv, &m[(k, j)]);
            for i in 0..n {
                m[(i, j)] = ring.sub(&m[(i, j)], &ring.mul(&m[(i, k)], &c));
                g2[(k, i)] = ring.add(&g2[(k, i)], &ring.mul(&c, &g2[(j, i)]));
            }
        }
        exponents.push(v);
    }
    // diag(p_i) = t · diag(p_i u^{-a_i}); the unit part joins g2
    for (k, a) in exponents.iter().enumerate() {
        let unit = m[(k, k)].shift(&-a.clone());
        for j in 0..n {
            g2[(k, j)] = ring.mul(&unit, &g2[(k, j)]);
        }
    }
    if exponents.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invariant("cartan-order", "pivot valuations decreased"));
    }
    Ok(CartanDecomposition { g1, exponents, g2 })
}

/// Whether the decomposition multiplies back to `g` and has integral,
/// unit-determinant outer factors.
pub fn check_decomposition(ring: &PuiseuxRing, g: &PuiseuxMatrix, d: &CartanDecomposition) -> Result<bool> {
    let back = d.reassemble(ring);
    if !matrices_agree(ring, &back, g) {
        return Ok(false);
    }
    for h in [&d.g1, &d.g2] {
        let r = residue_matrix(h)?;
        let f = &ring.field;
        if matrix::det(f, &r)? == Fq(0) {
            return Ok(false);
        }
        let hi = inverse(ring, h)?;
        if hi.data().iter().any(|x| x.val().is_some_and(|v| v < Rat::zero())) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct Specialization {
    pub exponents: Vec<Rat>,
    pub orbit: LocatedCone,
    pub g1_bar: Matrix<Fq>,
    pub g2_bar: Matrix<Fq>,
}

/// Residues of the outer factors and the cone of the exponent vector.
pub fn specialize_point(ring: &PuiseuxRing, g: &PuiseuxMatrix, fan: &FanData) -> Result<Specialization> {
    let d = cartan_decompose(ring, g)?;
    let orbit = locate(fan, &d.exponents)?;
    Ok(Specialization {
        g1_bar: residue_matrix(&d.g1)?,
        g2_bar: residue_matrix(&d.g2)?,
        exponents: d.exponents,
        orbit,
    })
}
