//! Base alcove geometry in the apartment `X_*(T/Z_G) ⊗ Q`.
//!
//! The base alcove is the open region `-1 < <α, x> < 0` for all positive
//! roots. A translation by `ν` acts by `x -> x + ν`, so `b = μ(-π) w` acts by
//! `x -> w(x) - μ` and `bσ` by `x -> wσ(x) - μ`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::root_datum::{pairing, rat, rat_vec, BasedRootDatum, LatticeAut, WeylElement};
use crate::{Rat, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApartmentPoint {
    pub coords: Vec<Rat>,
}

impl ApartmentPoint {
    pub fn new(coords: Vec<Rat>) -> Self {
        ApartmentPoint { coords }
    }

    pub fn origin(rank: usize) -> Self {
        ApartmentPoint {
            coords: vec![Rat::zero(); rank],
        }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        ApartmentPoint { coords: rat_vec(v) }
    }

    /// Equality modulo the central subspace.
    pub fn eq_mod_center(&self, other: &ApartmentPoint, datum: &BasedRootDatum) -> bool {
        let diff: Vec<Rat> = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        datum.is_central(&diff)
    }
}

/// Membership in the open (or, with `closed`, the closed) base alcove.
pub fn base_alcove_contains(datum: &BasedRootDatum, x: &ApartmentPoint, closed: bool) -> bool {
    let minus_one = -Rat::one();
    datum.positive_roots().into_iter().all(|i| {
        let v = pairing(datum.root(i), &x.coords).expect("rank mismatch");
        if closed {
            v >= minus_one && !v.is_positive()
        } else {
            v > minus_one && v.is_negative()
        }
    })
}

/// A point of the open base alcove: every simple root pairs to `-1/(H+1)`
/// where `H` is the largest root height.
pub fn interior_point(datum: &BasedRootDatum) -> ApartmentPoint {
    let rank = datum.rank();
    let simple = datum.simple_roots();
    if simple.is_empty() {
        return ApartmentPoint::origin(rank);
    }
    let h = datum.max_height();
    let target = -Rat::new(1.into(), (h + 1).into());
    let m = Matrix::from_rows(simple.iter().map(|&s| rat_vec(datum.root(s))).collect()).unwrap();
    let b = vec![target; simple.len()];
    let x = matrix::solve(&Q::new(), &m, &b)
        .expect("dimensions")
        .expect("simple roots are independent");
    ApartmentPoint::new(x)
}

/// `x -> g(x) - μ` for a lattice map `g`.
pub fn affine_step(g: &LatticeAut, mu: &[i64], x: &ApartmentPoint) -> ApartmentPoint {
    let gx = g.apply_rat(&x.coords);
    ApartmentPoint::new(gx.into_iter().zip(mu).map(|(a, &m)| a - rat(m)).collect())
}

/// The unique `w` with `w(𝔞) - μ = 𝔞`.
pub fn length_zero_w(datum: &BasedRootDatum, mu: &[i64]) -> Result<WeylElement> {
    if mu.len() != datum.rank() {
        return Err(Error::Dimension {
            expected: datum.rank(),
            got: mu.len(),
        });
    }
    let class = datum.classify_cocharacter(mu);
    if !(class.dominant && class.minuscule) {
        return Err(Error::invariant(
            "length-zero",
            format!("{mu:?} is not dominant minuscule"),
        ));
    }
    let x0 = interior_point(datum);
    let mut found: Vec<WeylElement> = datum
        .weyl_group()?
        .into_iter()
        .filter(|w| base_alcove_contains(datum, &affine_step(&w.aut, mu, &x0), false))
        .collect();
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        0 => Err(Error::invariant("length-zero", "no Weyl element stabilizes the base alcove")),
        k => Err(Error::invariant(
            "length-zero",
            format!("{k} Weyl elements stabilize the base alcove"),
        )),
    }
}

/// Whether `x -> w(x) - μ` sends the base alcove to itself.
pub fn stabilizes_base_alcove(datum: &BasedRootDatum, w: &LatticeAut, mu: &[i64]) -> bool {
    base_alcove_contains(datum, &affine_step(w, mu, &interior_point(datum)), false)
}

/// `x_k = (bσ)^k o = -Σ_{j<k} (wσ)^j μ` for `0 <= k <= k_max`.
pub fn b_sigma_orbit(datum: &BasedRootDatum, mu: &[i64], w: &WeylElement, k_max: usize) -> Vec<ApartmentPoint> {
    let ws = w.aut.compose(datum.sigma());
    let mut out = vec![ApartmentPoint::origin(datum.rank())];
    for _ in 0..k_max {
        let next = affine_step(&ws, mu, out.last().unwrap());
        out.push(next);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetRecord {
    pub zero_roots: Vec<usize>,
    pub sample_interior_point: ApartmentPoint,
}

impl FacetRecord {
    /// Whether `x` lies in the closed base alcove and on the facet's span.
    pub fn contains(&self, datum: &BasedRootDatum, x: &ApartmentPoint) -> bool {
        base_alcove_contains(datum, x, true)
            && self
                .zero_roots
                .iter()
                .all(|&i| pairing(datum.root(i), &x.coords).unwrap().is_zero())
    }
}

pub fn is_dominant_rational(datum: &BasedRootDatum, lambda: &[Rat]) -> bool {
    datum
        .simple_roots()
        .iter()
        .all(|&s| !pairing(datum.root(s), lambda).unwrap().is_negative())
}

/// The facet `𝔞 ∩ τ`, with `τ` the face of the codominant chamber holding
/// `-λ` in its interior.
pub fn facet_of_lambda(datum: &BasedRootDatum, lambda: &[Rat]) -> Result<FacetRecord> {
    if lambda.len() != datum.rank() {
        return Err(Error::Dimension {
            expected: datum.rank(),
            got: lambda.len(),
        });
    }
    if !is_dominant_rational(datum, lambda) {
        return Err(Error::invariant("facet", "lambda is not dominant"));
    }
    let zero_roots: Vec<usize> = (0..datum.num_roots())
        .filter(|&i| pairing(datum.root(i), lambda).unwrap().is_zero())
        .collect();
    let top = datum
        .positive_roots()
        .into_iter()
        .map(|i| pairing(datum.root(i), lambda).unwrap())
        .max()
        .unwrap_or_else(Rat::zero);
    let sample = if top.is_zero() {
        ApartmentPoint::origin(datum.rank())
    } else {
        let c = top * Rat::from_integer(2.into());
        ApartmentPoint::new(lambda.iter().map(|x| -x / &c).collect())
    };
    Ok(FacetRecord {
        zero_roots,
        sample_interior_point: sample,
    })
}

fn stack_kernel_dim(rows: Vec<Vec<Rat>>, rank: usize) -> usize {
    if rows.is_empty() {
        return rank;
    }
    let m = Matrix::from_rows(rows).unwrap();
    rank - matrix::rank(&Q::new(), &m)
}

/// Dimension of the `wσ`-fixed part of `X_*(Z_M)_Q / X_*(Z_G)_Q`, computed as
/// `dim {ν ∈ X_*(Z_M)_Q : (wσ - 1)ν ∈ X_*(Z_G)_Q} - dim X_*(Z_G)_Q`.
pub fn central_quotient_fixed_dim(datum: &BasedRootDatum, wsigma: &LatticeAut, phi_m: &[usize]) -> usize {
    let n = datum.rank();
    let mut rows: Vec<Vec<Rat>> = phi_m.iter().map(|&i| rat_vec(datum.root(i))).collect();
    // <α, (wσ - 1)ν> = 0 for all roots α
    for a in datum.roots() {
        let mut row = vec![Rat::zero(); n];
        for (j, r) in row.iter_mut().enumerate() {
            let mut s: i64 = -a[j];
            for (i, &ai) in a.iter().enumerate() {
                s += ai * wsigma.mat[(i, j)];
            }
            *r = rat(s);
        }
        rows.push(row);
    }
    let preimage = stack_kernel_dim(rows, n);
    let center = datum.center_cochars().len();
    preimage - center
}

/// Whether `Z_{M^{wσ}}/Z_G` is anisotropic, with `M` the centralizer of `λ`.
pub fn facet_is_minimal(datum: &BasedRootDatum, w: &WeylElement, lambda: &[Rat]) -> bool {
    let ws = w.aut.compose(datum.sigma());
    let phi_m: Vec<usize> = (0..datum.num_roots())
        .filter(|&i| pairing(datum.root(i), lambda).unwrap().is_zero())
        .collect();
    central_quotient_fixed_dim(datum, &ws, &phi_m) == 0
}
