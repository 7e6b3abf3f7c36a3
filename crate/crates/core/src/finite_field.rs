//! Finite fields `F_{q^m}` with `q = p^f`, in a polynomial basis over `F_p`.
//!
//! An element is stored as the integer `Σ c_i p^i` of its coordinates
//! `c_0, ..., c_{k-1}` with respect to `1, x, ..., x^{k-1}`, where `x` is a
//! root of the defining polynomial. The defining polynomial is the least
//! primitive monic polynomial of degree `k = f m` in coordinate order, so `x`
//! generates the multiplicative group and multiplication goes through
//! discrete-log tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u32 = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u32);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    f: u32,
    m: u32,
    k: u32,
    q: u64,
    size: u32,
    modulus: Vec<u32>,
    tables: Arc<Tables>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) [q = {}, m = {}]", self.p, self.k, self.q, self.m)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.m == other.m
    }
}

impl Eq for GaloisField {}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl GaloisField {
    /// `F_{q^m}` with `q = p^f`.
    pub fn new(p: u32, f: u32, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if f == 0 || m == 0 {
            return Err(Error::domain("field degrees must be positive"));
        }
        let k = f * m;
        let size = (p as u64).checked_pow(k).filter(|&s| s <= MAX_FIELD_SIZE as u64).ok_or_else(|| {
            Error::size(
                "finite field",
                format!("{p}^{k}"),
                MAX_FIELD_SIZE,
            )
        })? as u32;
        let q = (p as u64).pow(f);
        let (modulus, tables) = primitive_modulus(p, k, size);
        Ok(GaloisField {
            p,
            f,
            m,
            k,
            q,
            size,
            modulus,
            tables: Arc::new(tables),
        })
    }

    /// `F_q` itself.
    pub fn base(p: u32, f: u32) -> Result<Self> {
        Self::new(p, f, 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Coefficients `a_0, ..., a_{k-1}` of the defining polynomial
    /// `x^k + a_{k-1} x^{k-1} + ... + a_0`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.size).map(Fq)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fq> {
        (1..self.size).map(Fq)
    }

    /// The generator `x` of the multiplicative group.
    pub fn generator(&self) -> Fq {
        Fq(self.tables.exp[1 % (self.size as usize - 1).max(1)])
    }

    pub fn from_int(&self, a: i64) -> Fq {
        Fq(a.rem_euclid(self.p as i64) as u32)
    }

    pub fn coords(&self, x: Fq) -> Vec<u32> {
        let mut v = x.0;
        (0..self.k)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, c: &[u32]) -> Result<Fq> {
        if c.len() > self.k as usize || c.iter().any(|&x| x >= self.p) {
            return Err(Error::Parse(format!("bad coordinates {c:?} for {self:?}")));
        }
        Ok(Fq(c.iter().rev().fold(0, |acc, &x| acc * self.p + x)))
    }

    pub fn contains(&self, x: Fq) -> bool {
        x.0 < self.size
    }

    pub fn log(&self, x: Fq) -> Option<u32> {
        (x.0 != 0).then(|| self.tables.log[x.0 as usize])
    }

    pub fn exp(&self, i: u64) -> Fq {
        Fq(self.tables.exp[(i % (self.size as u64 - 1)) as usize])
    }

    pub fn pow(&self, x: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq(1);
        }
        match self.log(x) {
            None => Fq(0),
            Some(l) => self.exp(l as u64 * (e % (self.size as u64 - 1))),
        }
    }

    /// `x -> x^q`.
    pub fn frobenius(&self, x: Fq) -> Fq {
        self.pow(x, self.q)
    }

    /// `x -> x^{q^k}`; negative `k` gives the inverse power.
    pub fn frobenius_k(&self, x: Fq, k: i64) -> Fq {
        let m = self.m as i64;
        let k = k.rem_euclid(m) as u32;
        self.pow(x, self.q.pow(k))
    }

    /// `x -> x^p`.
    pub fn frobenius_p(&self, x: Fq) -> Fq {
        self.pow(x, self.p as u64)
    }

    /// Whether `x` lies in `F_{p^d}`.
    pub fn in_subfield(&self, x: Fq, d: u32) -> bool {
        self.pow(x, (self.p as u64).pow(d)) == x
    }

    /// Whether `x` lies in `F_q`.
    pub fn is_rational(&self, x: Fq) -> bool {
        self.frobenius(x) == x
    }

    /// Elements of `F_q` inside this field.
    pub fn base_elements(&self) -> Vec<Fq> {
        self.elements().filter(|&x| self.is_rational(x)).collect()
    }

    /// The pinned primitive `e`-th root of unity `x^{(|F|-1)/e}`.
    pub fn root_of_unity(&self, e: u64) -> Result<Fq> {
        let order = self.size as u64 - 1;
        if e == 0 || order % e != 0 {
            return Err(Error::domain(format!(
                "no primitive {e}-th root of unity in {self:?}"
            )));
        }
        Ok(self.exp(order / e))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: Fq) -> Option<u64> {
        let l = self.log(x)? as u64;
        let n = self.size as u64 - 1;
        Some(n / num_integer::gcd(l, n))
    }

    pub fn fmt_elem(&self, x: Fq) -> String {
        let c = self.coords(x);
        if self.k == 1 {
            return c[0].to_string();
        }
        format!(
            "[{}]",
            c.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        )
    }

    pub fn parse_elem(&self, s: &str) -> Result<Fq> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let c: Vec<u32> = inner
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
                .collect::<Result<_>>()?;
            return self.from_coords(&c);
        }
        let v: i64 = s.parse().map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        Ok(self.from_int(v))
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg_raw(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }
}

impl Ring for GaloisField {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq(0)
    }
    fn one(&self) -> Fq {
        Fq(1)
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(self.add_raw(a.0, b.0))
    }
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(self.add_raw(a.0, self.neg_raw(b.0)))
    }
    fn neg(&self, a: &Fq) -> Fq {
        Fq(self.neg_raw(a.0))
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        let t = &self.tables;
        let l = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
        Fq(t.exp[(l % (self.size as u64 - 1)) as usize])
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.0 == 0
    }
    fn is_one(&self, a: &Fq) -> bool {
        a.0 == 1
    }
}

impl Field for GaloisField {
    fn inv(&self, a: &Fq) -> Option<Fq> {
        let l = self.log(*a)? as u64;
        let n = self.size as u64 - 1;
        Some(self.exp(n - l))
    }
}

/// Multiply a coordinate vector by `x` modulo `x^k + Σ a_i x^i`.
fn times_x(c: &mut [u32], modulus: &[u32], p: u32) {
    let k = c.len();
    let top = c[k - 1];
    for i in (1..k).rev() {
        c[i] = c[i - 1];
    }
    c[0] = 0;
    if top != 0 {
        for i in 0..k {
            c[i] = (c[i] + p - (top * modulus[i]) % p) % p;
        }
    }
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Least primitive monic polynomial of degree `k` over `F_p` and its
/// exp/log tables for `x`.
fn primitive_modulus(p: u32, k: u32, size: u32) -> (Vec<u32>, Tables) {
    let order = size - 1;
    if order == 1 {
        // F_2: the modulus x + 1 makes x = 1
        return (
            vec![1],
            Tables {
                exp: vec![1],
                log: vec![0, 0],
            },
        );
    }
    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; size as usize];
    let mut seen = vec![false; size as usize];
    // candidates a_0 + a_1 x + ... in coordinate order, a_0 != 0
    for cand in 0..size {
        let modulus: Vec<u32> = {
            let mut v = cand;
            (0..k)
                .map(|_| {
                    let c = v % p;
                    v /= p;
                    c
                })
                .collect()
        };
        if modulus[0] == 0 {
            continue;
        }
        seen.iter_mut().for_each(|s| *s = false);
        let mut c = vec![0u32; k as usize];
        c[0] = 1;
        let mut ok = true;
        for i in 0..order {
            let idx = encode(&c, p);
            if idx == 0 || seen[idx as usize] {
                ok = false;
                break;
            }
            seen[idx as usize] = true;
            exp[i as usize] = idx;
            log[idx as usize] = i;
            if k == 1 {
                // x is the constant -a_0
                let g = (p - modulus[0]) % p;
                c[0] = (c[0] * g) % p;
            } else {
                times_x(&mut c, &modulus, p);
            }
        }
        if ok && encode(&c, p) == 1 {
            return (modulus, Tables { exp, log });
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}
