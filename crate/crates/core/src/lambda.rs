//! The slope cocharacter `λ` and the data derived from it.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::alcove::{is_dominant_rational, length_zero_w};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::root_datum::{pairing, pairing_int, rat, rat_vec, BasedRootDatum, LatticeAut, WeylElement};
use crate::smith;
use crate::{Int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    pub q: u64,
    pub p: u64,
    pub f: u32,
}

impl PrimePower {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::domain(format!("{q} is not a prime power")));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        let mut f = 0;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            f += 1;
        }
        if r != 1 {
            return Err(Error::domain(format!("{q} is not a prime power")));
        }
        Ok(PrimePower { q, p, f })
    }
}

#[derive(Clone, Debug)]
pub struct ShimuraDatum {
    pub datum: BasedRootDatum,
    pub q: PrimePower,
    pub mu: Vec<i64>,
    pub w: WeylElement,
}

impl ShimuraDatum {
    pub fn new(datum: BasedRootDatum, q: u64, mu: Vec<i64>) -> Result<Self> {
        let q = PrimePower::new(q)?;
        let w = length_zero_w(&datum, &mu)?;
        Ok(ShimuraDatum { datum, q, mu, w })
    }

    /// `wσ` as a lattice automorphism.
    pub fn wsigma(&self) -> LatticeAut {
        self.w.aut.compose(self.datum.sigma())
    }
}

#[derive(Clone, Debug)]
pub struct LambdaData {
    pub lambda: Vec<Rat>,
    /// Order of `wσ` on `X_*(T)`.
    pub n: u64,
    pub e: Int,
    /// `<α, qwσλ>` for every root, indexed like the datum's roots.
    pub r_alpha: Vec<Rat>,
    pub phi_mu_neg: Vec<usize>,
    pub phi_mu_pos: Vec<usize>,
    pub phi_m: Vec<usize>,
    pub phi_n: Vec<usize>,
    pub phi_nbar: Vec<usize>,
    pub dim_r: usize,
}

impl LambdaData {
    /// `eλ` as an integral cocharacter.
    pub fn e_lambda(&self) -> Vec<Int> {
        self.lambda.iter().map(|x| (x * &self.e).to_integer()).collect()
    }

    pub fn e_lambda_i64(&self) -> Vec<i64> {
        self.e_lambda().iter().map(|x| x.to_i64().expect("small eλ")).collect()
    }

    pub fn e_u64(&self) -> u64 {
        self.e.to_u64().expect("small e")
    }
}

pub fn compute_lambda(sd: &ShimuraDatum) -> Result<LambdaData> {
    let d = &sd.datum;
    let ws = sd.wsigma();
    let bound = (d.weyl_group()?.len() as u64) * d.sigma_order();
    let n = ws
        .order(bound)
        .ok_or_else(|| Error::invariant("lambda", "wσ is not of finite order"))?;
    let q = Int::from(sd.q.q);
    // Σ_{k<N} (q wσ)^k μ
    let mut acc = vec![Int::zero(); d.rank()];
    let mut term: Vec<i64> = sd.mu.clone();
    let mut qk = Int::one();
    for _ in 0..n {
        for (a, &t) in acc.iter_mut().zip(&term) {
            *a += &qk * Int::from(t);
        }
        term = ws.apply(&term);
        qk *= &q;
    }
    let denom = &qk - Int::one();
    let lambda: Vec<Rat> = acc.into_iter().map(|a| -Rat::new(a, denom.clone())).collect();
    let e = lambda.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));

    let qws_lambda: Vec<Rat> = ws
        .apply_rat(&lambda)
        .into_iter()
        .map(|x| x * Rat::from_integer(q.clone()))
        .collect();
    let mut r_alpha = Vec::with_capacity(d.num_roots());
    let (mut phi_mu_neg, mut phi_mu_pos) = (Vec::new(), Vec::new());
    let (mut phi_m, mut phi_n, mut phi_nbar) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..d.num_roots() {
        let a = d.root(i);
        r_alpha.push(pairing(a, &qws_lambda)?);
        match pairing_int(a, &sd.mu).signum() {
            -1 => phi_mu_neg.push(i),
            1 => phi_mu_pos.push(i),
            _ => {}
        }
        let l = pairing(a, &lambda)?;
        if l.is_zero() {
            phi_m.push(i);
        } else if l.is_positive() {
            phi_n.push(i);
        } else {
            phi_nbar.push(i);
        }
    }
    let dim_r = phi_mu_neg.len();
    let ld = LambdaData {
        lambda,
        n,
        e,
        r_alpha,
        phi_mu_neg,
        phi_mu_pos,
        phi_m,
        phi_n,
        phi_nbar,
        dim_r,
    };
    if !is_dominant_rational(d, &ld.lambda) {
        return Err(Error::invariant("lambda-dominant", "λ is not dominant"));
    }
    Ok(ld)
}

/// Image of a root subset under `g` (covector action).
pub fn image_of_roots(d: &BasedRootDatum, g: &LatticeAut, set: &[usize]) -> BTreeSet<usize> {
    set.iter()
        .map(|&i| d.act_on_root(g, i).expect("lattice map permutes roots"))
        .collect()
}

/// Named verdicts for the identities `λ` is expected to satisfy.
pub fn check_lambda_invariants(sd: &ShimuraDatum, ld: &LambdaData) -> Vec<(String, bool)> {
    let d = &sd.datum;
    let ws = sd.wsigma();
    let q = Rat::from_integer(sd.q.q.into());
    let mut out = Vec::new();

    let qwl = ws.apply_rat(&ld.lambda);
    let lhs: Vec<Rat> = ld.lambda.iter().zip(&qwl).map(|(l, x)| l - x * &q).collect();
    out.push(("lambda-identity".to_string(), lhs == rat_vec(&sd.mu)));
    out.push(("lambda-dominant".to_string(), is_dominant_rational(d, &ld.lambda)));

    let e_integral = ld.lambda.iter().all(|x| (x * &ld.e).is_integer());
    let e_minimal = (1..ld.e.to_u64().unwrap_or(1))
        .filter(|k| ld.e.is_multiple_of(&Int::from(*k)))
        .all(|k| !ld.lambda.iter().all(|x| (x * Int::from(k)).is_integer()));
    out.push(("e-minimal".to_string(), e_integral && e_minimal));
    let qn1 = num_traits::pow(Int::from(sd.q.q), ld.n as usize) - Int::one();
    out.push(("e-divides-qN-1".to_string(), qn1.is_multiple_of(&ld.e)));
    out.push(("e-prime-to-p".to_string(), ld.e.gcd(&Int::from(sd.q.p)).is_one()));

    let lambda_minus_mu: Vec<Rat> = ld.lambda.iter().zip(&sd.mu).map(|(l, &m)| l - rat(m)).collect();
    let r_ok = ld.phi_mu_neg.iter().all(|&i| {
        let r = &ld.r_alpha[i];
        let alt = pairing(d.root(i), &lambda_minus_mu).unwrap();
        r.is_positive() && (r * &ld.e).is_integer() && *r == alt
    });
    out.push(("r-alpha-positive-integral".to_string(), r_ok));

    let m: BTreeSet<usize> = ld.phi_m.iter().copied().collect();
    out.push(("M-stable".to_string(), image_of_roots(d, &ws, &ld.phi_m) == m));

    let n_set: BTreeSet<usize> = ld.phi_n.iter().copied().collect();
    let nbar_img = image_of_roots(d, &ws, &ld.phi_nbar);
    let lhs: BTreeSet<usize> = n_set.intersection(&nbar_img).copied().collect();
    let pos: BTreeSet<usize> = ld.phi_mu_pos.iter().copied().collect();
    out.push(("N-cap-wsigma-Nbar".to_string(), lhs == pos));

    let two_rho_mu = pairing_int(&d.two_rho(), &sd.mu);
    out.push((
        "dim-r".to_string(),
        ld.dim_r == ld.phi_mu_neg.len() && two_rho_mu == ld.dim_r as i64,
    ));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootVerdict {
    pub root: usize,
    /// Sign of `<α, λ>`.
    pub lambda_sign: i8,
    /// First `i > 0` with `<α, (wσ)^{-i} μ> != 0`, and that pairing.
    pub first_nonzero: Option<(u64, i64)>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaPstReport {
    pub verdicts: Vec<RootVerdict>,
    pub pass: bool,
}

/// Sign of `<α, λ>` is opposite to the first nonzero `<α, (wσ)^{-i} μ>`, and
/// zero exactly when all of them vanish.
pub fn lambdapst_check(sd: &ShimuraDatum, ld: &LambdaData) -> LambdaPstReport {
    let d = &sd.datum;
    let inv = sd.wsigma().inverse();
    let mut orbit = Vec::with_capacity(ld.n as usize);
    let mut cur = sd.mu.clone();
    for _ in 0..ld.n {
        cur = inv.apply(&cur);
        orbit.push(cur.clone());
    }
    let verdicts: Vec<RootVerdict> = (0..d.num_roots())
        .map(|i| {
            let a = d.root(i);
            let sign = pairing(a, &ld.lambda).unwrap().signum();
            let lambda_sign = if sign.is_zero() {
                0
            } else if sign.is_positive() {
                1
            } else {
                -1
            };
            let first_nonzero = orbit
                .iter()
                .enumerate()
                .map(|(k, v)| (k as u64 + 1, pairing_int(a, v)))
                .find(|(_, v)| *v != 0);
            let pass = match first_nonzero {
                None => lambda_sign == 0,
                Some((_, v)) => i64::from(lambda_sign) == -v.signum(),
            };
            RootVerdict {
                root: i,
                lambda_sign,
                first_nonzero,
                pass,
            }
        })
        .collect();
    let pass = verdicts.iter().all(|v| v.pass);
    LambdaPstReport { verdicts, pass }
}

/// Invariant factors of `1 - vσ` on `X_*(T)`.
pub fn component_group(v_sigma: &Matrix<i64>) -> Result<Vec<Int>> {
    if !v_sigma.is_square() {
        return Err(Error::Dimension {
            expected: v_sigma.rows(),
            got: v_sigma.cols(),
        });
    }
    Ok(smith::cokernel_of_one_minus(v_sigma))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeilD {
    pub d: u64,
    pub mu_d: Vec<i64>,
}

/// Least `i` with `w^i = 1` and `Σ_{j<i} w^j μ` central; split data only.
pub fn weil_d(sd: &ShimuraDatum) -> Result<WeilD> {
    let d = &sd.datum;
    if !d.is_split() {
        return Err(Error::Unsupported(
            "Weil integer for a nonsplit Frobenius".into(),
        ));
    }
    let w = &sd.w.aut;
    let bound = d.weyl_group()?.len() as u64;
    let order = w
        .order(bound)
        .ok_or_else(|| Error::invariant("weil-d", "w is not of finite order"))?;
    let mut sum = vec![0i64; d.rank()];
    let mut cur = sd.mu.clone();
    for _ in 0..order {
        for (s, c) in sum.iter_mut().zip(&cur) {
            *s += c;
        }
        cur = w.apply(&cur);
    }
    // later multiples of the order only scale the sum
    if !d.is_central(&rat_vec(&sum)) {
        return Err(Error::invariant("weil-d", "Σ w^j μ is not central"));
    }
    Ok(WeilD { d: order, mu_d: sum })
}
