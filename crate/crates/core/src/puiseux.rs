//! Truncated Puiseux series `Σ c_k u^{k/ram}` over a finite field, with the
//! `q`-power Frobenius, and the σ-equation lift `h σ(h)^{-1} = G`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::finite_field::{Fq, GaloisField};
use crate::matrix::{self, Matrix};
use crate::scalar::{Field, Ring};
use crate::root_datum::rat;
use crate::Rat;

/// `Σ c_k u^{k/ram}`, known modulo `u^{trunc/ram}` (`trunc = None`: exact).
#[derive(Clone, PartialEq, Eq)]
pub struct Puiseux {
    ram: u64,
    trunc: Option<i64>,
    terms: BTreeMap<i64, Fq>,
}

pub type PuiseuxMatrix = Matrix<Puiseux>;

const INF: i128 = i128::MAX / 4;

fn ext(t: Option<i64>) -> i128 {
    t.map_or(INF, |x| x as i128)
}

fn unext(t: i128) -> Option<i64> {
    (t < INF / 2).then(|| t as i64)
}

impl Puiseux {
    pub fn zero() -> Self {
        Puiseux {
            ram: 1,
            trunc: None,
            terms: BTreeMap::new(),
        }
    }

    /// `O(u^{trunc/ram})`.
    pub fn big_o(ram: u64, trunc: i64) -> Self {
        Puiseux {
            ram,
            trunc: Some(trunc),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Fq) -> Self {
        Self::monomial(c, 0, 1)
    }

    /// `c u^{k/ram}`, exact.
    pub fn monomial(c: Fq, k: i64, ram: u64) -> Self {
        let mut terms = BTreeMap::new();
        if c != Fq(0) {
            terms.insert(k, c);
        }
        Puiseux {
            ram,
            trunc: None,
            terms,
        }
        .reduced()
    }

    pub fn from_terms(ram: u64, trunc: Option<i64>, terms: impl IntoIterator<Item = (i64, Fq)>) -> Self {
        let mut x = Puiseux {
            ram,
            trunc,
            terms: BTreeMap::new(),
        };
        for (k, c) in terms {
            x.terms.insert(k, c);
        }
        x.clean();
        x.reduced()
    }

    pub fn ram(&self) -> u64 {
        self.ram
    }

    /// Exclusive precision as a rational exponent.
    pub fn trunc(&self) -> Option<Rat> {
        self.trunc.map(|t| rat(t) / rat(self.ram as i64))
    }

    pub fn trunc_num(&self) -> Option<i64> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// `(exponent, coefficient)` pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, Fq)> + '_ {
        self.terms
            .iter()
            .map(move |(&k, &c)| (Rat::new(k.into(), (self.ram as i64).into()), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// No terms below the precision.
    pub fn is_zero_to_precision(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent with a nonzero coefficient.
    pub fn val(&self) -> Option<Rat> {
        self.terms
            .keys()
            .next()
            .map(|&k| Rat::new(k.into(), (self.ram as i64).into()))
    }

    pub fn leading(&self) -> Option<(Rat, Fq)> {
        self.terms().next()
    }

    /// Coefficient of `u^{x}`; a precision error when `x ≥ trunc`.
    pub fn coeff(&self, x: &Rat) -> Result<Fq> {
        if let Some(t) = self.trunc() {
            if *x >= t {
                return Err(Error::precision(format!("coefficient of u^{x} beyond O(u^{t})")));
            }
        }
        let scaled = x * rat(self.ram as i64);
        if !scaled.is_integer() {
            return Ok(Fq(0));
        }
        let k = scaled.to_integer().to_i64().unwrap();
        Ok(self.terms.get(&k).copied().unwrap_or(Fq(0)))
    }

    /// Reduction modulo the maximal ideal; needs nonnegative valuation.
    pub fn residue(&self) -> Result<Fq> {
        if let Some(v) = self.val() {
            if v < Rat::zero() {
                return Err(Error::domain(format!("u^{v} term: not integral")));
            }
        }
        self.coeff(&Rat::zero())
    }

    /// Lowest known exponent numerator: first term, else the precision.
    fn vlow(&self) -> i128 {
        self.terms
            .keys()
            .next()
            .map(|&k| k as i128)
            .unwrap_or(ext(self.trunc))
    }

    fn clean(&mut self) {
        if let Some(t) = self.trunc {
            self.terms.retain(|&k, c| k < t && *c != Fq(0));
        } else {
            self.terms.retain(|_, c| *c != Fq(0));
        }
    }

    /// Same series over the ramification `r`, a multiple of `ram`.
    pub fn with_ram(&self, r: u64) -> Self {
        assert!(r % self.ram == 0, "ramification {r} is not a multiple of {}", self.ram);
        let k = (r / self.ram) as i64;
        Puiseux {
            ram: r,
            trunc: self.trunc.map(|t| t * k),
            terms: self.terms.iter().map(|(&e, &c)| (e * k, c)).collect(),
        }
    }

    /// Smallest ramification representing the same series.
    fn reduced(mut self) -> Self {
        let mut g = self.ram as i64;
        for &k in self.terms.keys() {
            g = g.gcd(&k);
        }
        if let Some(t) = self.trunc {
            g = g.gcd(&t);
        }
        if g > 1 {
            self.ram /= g as u64;
            self.trunc = self.trunc.map(|t| t / g);
            self.terms = self.terms.iter().map(|(&k, &c)| (k / g, c)).collect();
        }
        self
    }

    /// Lower the precision to `u^{t}`.
    pub fn truncate(&self, t: &Rat) -> Self {
        let scaled = t * rat(self.ram as i64);
        let num = scaled.ceil().to_integer().to_i64().expect("precision fits in i64");
        let r = if scaled.is_integer() {
            self.clone()
        } else {
            // refine ramification so that t is representable
            let den = t.denom().to_u64().unwrap();
            self.with_ram(self.ram.lcm(&den))
        };
        let num = if scaled.is_integer() {
            num
        } else {
            (t * rat(r.ram as i64)).to_integer().to_i64().unwrap()
        };
        let mut out = r;
        out.trunc = Some(out.trunc.map_or(num, |old| old.min(num)));
        out.clean();
        out.reduced()
    }

    /// Multiply by `u^{x}`.
    pub fn shift(&self, x: &Rat) -> Self {
        let den = x.denom().to_u64().unwrap();
        let r = self.with_ram(self.ram.lcm(&den));
        let k = (x * rat(r.ram as i64)).to_integer().to_i64().unwrap();
        Puiseux {
            ram: r.ram,
            trunc: r.trunc.map(|t| t + k),
            terms: r.terms.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
        .reduced()
    }
}

fn align(a: &Puiseux, b: &Puiseux) -> (Puiseux, Puiseux) {
    let r = a.ram.lcm(&b.ram);
    (a.with_ram(r), b.with_ram(r))
}

impl fmt::Debug for Puiseux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms().map(|(e, c)| format!("{c:?}*u^({e})")).collect();
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        match self.trunc() {
            Some(t) => write!(f, "{body} + O(u^({t}))"),
            None => write!(f, "{body}"),
        }
    }
}

/// Arithmetic context: coefficients in `field`, Frobenius `x -> x^q`.
#[derive(Clone, Debug)]
pub struct PuiseuxRing {
    pub field: GaloisField,
}

impl PuiseuxRing {
    pub fn new(field: GaloisField) -> Self {
        PuiseuxRing { field }
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn u(&self) -> Puiseux {
        Puiseux::monomial(Fq(1), 1, 1)
    }

    pub fn scalar_mul(&self, c: Fq, x: &Puiseux) -> Puiseux {
        let mut out = x.clone();
        for v in out.terms.values_mut() {
            *v = self.field.mul(&c, v);
        }
        out.clean();
        out
    }

    /// `x^{q^k}`: exponents and precision scale by `q^k`, coefficients are
    /// raised to `q^k`.
    pub fn qpower(&self, x: &Puiseux, k: u32) -> Puiseux {
        let s = self.q().pow(k) as i64;
        Puiseux {
            ram: x.ram,
            trunc: x.trunc.map(|t| t * s),
            terms: x
                .terms
                .iter()
                .map(|(&e, &c)| (e * s, self.field.frobenius_k(c, k as i64)))
                .collect(),
        }
        .reduced()
    }

    /// Inverse, with precision `trunc - 2 val`.
    pub fn inv(&self, x: &Puiseux) -> Result<Puiseux> {
        let (&v, &c) = x
            .terms
            .iter()
            .next()
            .ok_or_else(|| Error::precision(format!("inverse of {x:?}: no term below the precision")))?;
        let ci = self.field.inv(&c).unwrap();
        if x.trunc.is_none() && x.terms.len() == 1 {
            return Ok(Puiseux::monomial(ci, -v, x.ram));
        }
        let t = x
            .trunc
            .ok_or_else(|| Error::precision("inverse of an exact non-monomial needs a precision"))?;
        // x = c u^v (1 + r), val(r) > 0, r known below t - v
        let rel_t = t - v;
        let mut r = Puiseux {
            ram: x.ram,
            trunc: Some(rel_t),
            terms: x
                .terms
                .iter()
                .skip(1)
                .map(|(&e, &cc)| (e - v, self.field.mul(&cc, &ci)))
                .collect(),
        };
        r.clean();
        let minus_r = self.neg(&r);
        let one = Puiseux::from_terms(x.ram, Some(rel_t), [(0, Fq(1))]);
        let mut sum = one.clone();
        let mut term = one;
        // products come back reduced; work at the ramification of x
        loop {
            term = self.mul(&term, &minus_r).with_ram(x.ram);
            term.trunc = Some(rel_t);
            term.clean();
            if term.terms.is_empty() {
                break;
            }
            sum = self.add(&sum, &term);
        }
        let mut sum = sum.with_ram(x.ram);
        sum.trunc = Some(rel_t);
        sum.clean();
        let out = Puiseux {
            ram: sum.ram,
            trunc: Some(rel_t - v),
            terms: sum.terms.iter().map(|(&e, &cc)| (e - v, self.field.mul(&cc, &ci))).collect(),
        };
        Ok(out.reduced())
    }

    /// Whether `a - b` vanishes below the common precision.
    pub fn eq_to_precision(&self, a: &Puiseux, b: &Puiseux) -> bool {
        self.sub(a, b).is_zero_to_precision()
    }

    pub fn format(&self, x: &Puiseux) -> String {
        let mut parts: Vec<String> = x
            .terms()
            .map(|(e, c)| {
                let cs = self.field.fmt_elem(c);
                if e.is_zero() {
                    cs
                } else {
                    format!("{cs}*u^({e})")
                }
            })
            .collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        let mut s = parts.join(" + ");
        if let Some(t) = x.trunc() {
            s.push_str(&format!(" + O(u^({t}))"));
        }
        s
    }

    /// Parse `c*u^(a/b) + c + u^(k) + ... + O(u^(t))`; coefficients in the
    /// field's literal syntax.
    pub fn parse(&self, s: &str) -> Result<Puiseux> {
        let mut acc = Puiseux::zero();
        let mut trunc: Option<Rat> = None;
        for (neg, tok) in split_terms(s)? {
            let tok = tok.trim();
            if let Some(inner) = tok.strip_prefix("O(").and_then(|t| t.strip_suffix(')')) {
                let e = parse_power(inner.trim())?;
                trunc = Some(trunc.map_or(e.clone(), |t: Rat| t.min(e)));
                continue;
            }
            let (coef, power) = match tok.find('u') {
                Some(pos) => {
                    let (c, p) = tok.split_at(pos);
                    let c = c.trim().trim_end_matches('*').trim();
                    let c = if c.is_empty() { Fq(1) } else { self.field.parse_elem(c)? };
                    (c, parse_power(p)?)
                }
                None => (self.field.parse_elem(tok)?, Rat::zero()),
            };
            let coef = if neg { self.field.neg(&coef) } else { coef };
            let den = power.denom().to_u64().unwrap();
            let k = power.numer().to_i64().unwrap();
            acc = self.add(&acc, &Puiseux::monomial(coef, k, den));
        }
        Ok(match trunc {
            Some(t) => acc.truncate(&t),
            None => acc,
        })
    }
}

fn parse_power(p: &str) -> Result<Rat> {
    let p = p.trim();
    if p == "u" {
        return Ok(rat(1));
    }
    let body = p
        .strip_prefix("u^")
        .ok_or_else(|| Error::Parse(format!("expected u^(..): {p}")))?
        .trim();
    let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|e| Error::Parse(format!("{n}: {e}")))?;
    let d: i64 = d.parse().map_err(|e| Error::Parse(format!("{d}: {e}")))?;
    if d <= 0 {
        return Err(Error::Parse(format!("bad denominator {d}")));
    }
    Ok(Rat::new(n.into(), d.into()))
}

/// Split on top-level `+`/`-`, returning (negated, term).
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push((neg, std::mem::take(&mut cur)));
                } else {
                    cur.clear();
                }
                neg = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets: {s}")));
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur));
    }
    if out.is_empty() {
        return Err(Error::Parse("empty series".into()));
    }
    Ok(out)
}

impl Ring for PuiseuxRing {
    type Elem = Puiseux;

    fn zero(&self) -> Puiseux {
        Puiseux::zero()
    }

    fn one(&self) -> Puiseux {
        Puiseux::constant(Fq(1))
    }

    fn add(&self, a: &Puiseux, b: &Puiseux) -> Puiseux {
        let (mut x, y) = align(a, b);
        x.trunc = unext(ext(x.trunc).min(ext(y.trunc)));
        for (k, c) in y.terms {
            let e = x.terms.entry(k).or_insert(Fq(0));
            *e = self.field.add(e, &c);
        }
        x.clean();
        x.reduced()
    }

    fn sub(&self, a: &Puiseux, b: &Puiseux) -> Puiseux {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &Puiseux) -> Puiseux {
        let mut x = a.clone();
        for v in x.terms.values_mut() {
            *v = self.field.neg(v);
        }
        x
    }

    fn mul(&self, a: &Puiseux, b: &Puiseux) -> Puiseux {
        let (x, y) = align(a, b);
        let exact_zero = |p: &Puiseux| p.trunc.is_none() && p.terms.is_empty();
        if exact_zero(&x) || exact_zero(&y) {
            return Puiseux::zero();
        }
        let t = (ext(x.trunc).saturating_add(y.vlow())).min(ext(y.trunc).saturating_add(x.vlow()));
        let t = if t >= INF / 2 { INF } else { t };
        let mut terms: BTreeMap<i64, Fq> = BTreeMap::new();
        for (&i, &c) in &x.terms {
            for (&j, &d) in &y.terms {
                if (i + j) as i128 >= t {
                    break;
                }
                let e = terms.entry(i + j).or_insert(Fq(0));
                *e = self.field.add(e, &self.field.mul(&c, &d));
            }
        }
        let mut out = Puiseux {
            ram: x.ram,
            trunc: unext(t),
            terms,
        };
        out.clean();
        out.reduced()
    }

    fn is_zero(&self, a: &Puiseux) -> bool {
        a.trunc.is_none() && a.terms.is_empty()
    }
}

/// Entrywise `q^k`-power Frobenius on a matrix.
pub fn frobenius_matrix(ring: &PuiseuxRing, m: &PuiseuxMatrix, k: u32) -> PuiseuxMatrix {
    m.map(|x| ring.qpower(x, k))
}

/// Least valuation among entries (`None` if all vanish to precision).
pub fn matrix_val(m: &PuiseuxMatrix) -> Option<Rat> {
    m.data().iter().filter_map(Puiseux::val).min()
}

/// Least precision among entries.
pub fn matrix_trunc(m: &PuiseuxMatrix) -> Option<Rat> {
    m.data().iter().filter_map(Puiseux::trunc).min()
}

pub fn constant_matrix(m: &Matrix<Fq>) -> PuiseuxMatrix {
    m.map(|&c| Puiseux::constant(c))
}

pub fn truncate_matrix(m: &PuiseuxMatrix, t: &Rat) -> PuiseuxMatrix {
    m.map(|x| x.truncate(t))
}

/// Entrywise residues of an integral matrix.
pub fn residue_matrix(m: &PuiseuxMatrix) -> Result<Matrix<Fq>> {
    let data = m.data().iter().map(Puiseux::residue).collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(m.rows(), m.cols(), data)
}

/// Gauss-Jordan inverse with least-valuation pivots.
pub fn inverse(ring: &PuiseuxRing, m: &PuiseuxMatrix) -> Result<PuiseuxMatrix> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::Dimension {
            expected: n,
            got: m.cols(),
        });
    }
    let mut a = m.clone();
    let mut inv = matrix::identity(ring, n);
    for col in 0..n {
        let piv = (col..n)
            .filter_map(|r| a[(r, col)].val().map(|v| (v, r)))
            .min()
            .map(|(_, r)| r)
            .ok_or_else(|| Error::precision("no pivot visible in the working precision"))?;
        a.swap_rows(col, piv);
        inv.swap_rows(col, piv);
        let pi = ring.inv(&a[(col, col)])?;
        for j in 0..n {
            a[(col, j)] = ring.mul(&a[(col, j)], &pi);
            inv[(col, j)] = ring.mul(&inv[(col, j)], &pi);
        }
        for r in 0..n {
            if r == col || a[(r, col)].is_zero_to_precision() && a[(r, col)].is_exact() {
                continue;
            }
            let f = a[(r, col)].clone();
            for j in 0..n {
                a[(r, j)] = ring.sub(&a[(r, j)], &ring.mul(&f, &a[(col, j)]));
                inv[(r, j)] = ring.sub(&inv[(r, j)], &ring.mul(&f, &inv[(col, j)]));
            }
        }
    }
    Ok(inv)
}

pub fn mat_mul(ring: &PuiseuxRing, a: &PuiseuxMatrix, b: &PuiseuxMatrix) -> PuiseuxMatrix {
    matrix::mul(ring, a, b).expect("compatible shapes")
}

/// Whether `a - b` vanishes entrywise below the precision.
pub fn matrices_agree(ring: &PuiseuxRing, a: &PuiseuxMatrix, b: &PuiseuxMatrix) -> bool {
    a.rows() == b.rows()
        && a.cols() == b.cols()
        && a.data().iter().zip(b.data()).all(|(x, y)| ring.eq_to_precision(x, y))
}

#[derive(Clone, Debug)]
pub struct SigmaLift {
    pub h: PuiseuxMatrix,
    /// `val(h_k σ(h_k)^{-1} G^{-1} - 1)` before each correction.
    pub defects: Vec<Rat>,
}

/// The unique `h ≡ h0` with `h σ(h)^{-1} = g` up to `O(u^{trunc})`, by
/// repeated defect correction `h <- d^{-1} h`, `d = h σ(h)^{-1} g^{-1}`.
pub fn solve_sigma_lift(ring: &PuiseuxRing, g: &PuiseuxMatrix, h0: &Matrix<Fq>, trunc: &Rat) -> Result<SigmaLift> {
    let n = g.rows();
    if h0.rows() != n || !g.is_square() {
        return Err(Error::Dimension {
            expected: n,
            got: h0.rows(),
        });
    }
    if let Some(t) = matrix_trunc(g) {
        if t < *trunc {
            return Err(Error::precision(format!("target known only to O(u^{t})")));
        }
    }
    let g = truncate_matrix(g, trunc);
    let g_inv = inverse(ring, &g)?;
    let id = matrix::identity(ring, n);
    let mut h = truncate_matrix(&constant_matrix(h0), trunc);
    let mut defects = Vec::new();
    let defect = |h: &PuiseuxMatrix| -> Result<(PuiseuxMatrix, Option<Rat>)> {
        let sh = frobenius_matrix(ring, h, 1);
        let d = mat_mul(ring, &mat_mul(ring, h, &inverse(ring, &sh)?), &g_inv);
        let diff = matrix::sub(ring, &d, &id)?;
        Ok((d, matrix_val(&diff)))
    };
    let (mut d, mut v) = defect(&h)?;
    match &v {
        Some(v0) if *v0 <= Rat::zero() => {
            return Err(Error::domain("h0 σ(h0)^{-1} is not congruent to G"));
        }
        _ => {}
    }
    while let Some(cur) = v.clone() {
        if let Some(prev) = defects.last() {
            if cur <= *prev {
                return Err(Error::invariant(
                    "sigma-lift-defect",
                    format!("defect valuation {cur} did not increase past {prev}"),
                ));
            }
        }
        defects.push(cur);
        h = mat_mul(ring, &inverse(ring, &d)?, &h);
        let next = defect(&h)?;
        d = next.0;
        v = next.1;
        if defects.len() > 10_000 {
            return Err(Error::invariant("sigma-lift-defect", "no convergence"));
        }
    }
    Ok(SigmaLift { h, defects })
}
