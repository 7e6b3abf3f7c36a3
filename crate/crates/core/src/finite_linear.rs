//! Matrices over finite fields: Frobenius, Moore matrices, root-group
//! elements and exhaustive enumeration of `GL_n(F_{q^m})`.

use crate::error::{Error, Result};
use crate::finite_field::{Fq, GaloisField};
use crate::matrix::{self, Matrix};
use crate::root_datum::{gl_root_pair, LatticeAut};
use crate::scalar::{PrimeField, Ring};

pub type FqMatrix = Matrix<Fq>;

pub const DEFAULT_GROUP_BUDGET: u128 = 10_000_000;

/// Entrywise `x -> x^q`.
pub fn frobenius(field: &GaloisField, m: &FqMatrix) -> FqMatrix {
    m.map(|&x| field.frobenius(x))
}

/// Entrywise `x -> x^{q^k}`, `k` possibly negative.
pub fn frobenius_k(field: &GaloisField, m: &FqMatrix, k: i64) -> FqMatrix {
    m.map(|&x| field.frobenius_k(x, k))
}

/// The Moore matrix `(a_j^{e^i})_{i,j}` for the Frobenius `x -> x^e`.
pub fn moore_matrix(field: &GaloisField, a: &[Fq], frob_exp: u64) -> FqMatrix {
    let n = a.len();
    let mut m = Matrix::filled(n, n, Fq(0));
    for (j, &x) in a.iter().enumerate() {
        let mut cur = x;
        for i in 0..n {
            m[(i, j)] = cur;
            cur = field.pow(cur, frob_exp);
        }
    }
    m
}

/// Determinant of the Moore matrix with the `p`-power Frobenius.
pub fn moore_det(field: &GaloisField, a: &[Fq]) -> Result<Fq> {
    moore_det_with(field, a, field.p() as u64)
}

pub fn moore_det_with(field: &GaloisField, a: &[Fq], frob_exp: u64) -> Result<Fq> {
    if a.len() > field.degree() as usize {
        return Err(Error::domain(format!(
            "{} entries exceed the degree {} of {field:?}",
            a.len(),
            field.degree()
        )));
    }
    matrix::det(field, &moore_matrix(field, a, frob_exp))
}

/// Rank over `F_p` of the coordinate vectors of `a`.
pub fn prime_field_rank(field: &GaloisField, a: &[Fq]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let fp = PrimeField::new(field.p());
    let rows: Vec<Vec<u32>> = a.iter().map(|&x| field.coords(x)).collect();
    matrix::rank(&fp, &Matrix::from_rows(rows).unwrap())
}

/// `I + c E_{ij}` for the GL_n root `α = e_i - e_j`.
pub fn root_group_element(field: &GaloisField, n: usize, alpha: &[i64], c: Fq) -> Result<FqMatrix> {
    let (i, j) = gl_root_pair(alpha)
        .filter(|_| alpha.len() == n)
        .ok_or_else(|| Error::domain(format!("{alpha:?} is not a root of GL_{n}")))?;
    let mut m = matrix::identity(field, n);
    m[(i, j)] = c;
    Ok(m)
}

/// Matrix of a permutation lattice map, `M e_i = e_{π(i)}`.
pub fn permutation_matrix(field: &GaloisField, w: &LatticeAut) -> Result<FqMatrix> {
    let perm = w
        .as_permutation()
        .ok_or_else(|| Error::domain("Weyl element is not a permutation matrix"))?;
    let n = perm.len();
    let mut m = matrix::zeros(field, n, n);
    for (i, &j) in perm.iter().enumerate() {
        m[(j, i)] = field.one();
    }
    Ok(m)
}

pub fn diagonal(field: &GaloisField, d: &[Fq]) -> FqMatrix {
    matrix::diagonal(field, d)
}

/// `|GL_n(F_Q)| = Π_{i<n} (Q^n - Q^i)`.
pub fn gl_order(n: usize, big_q: u64) -> u128 {
    let qn = (big_q as u128).pow(n as u32);
    (0..n).map(|i| qn - (big_q as u128).pow(i as u32)).product()
}

/// Every invertible `n × n` matrix over `field`, each exactly once.
pub fn enumerate_group(field: &GaloisField, n: usize, budget: u128) -> Result<GroupEnumerator> {
    enumerate_group_part(field, n, budget, 0, 1)
}

/// The part of the enumeration whose first-row index is `part` mod `parts`.
pub fn enumerate_group_part(
    field: &GaloisField,
    n: usize,
    budget: u128,
    part: u64,
    parts: u64,
) -> Result<GroupEnumerator> {
    let order = gl_order(n, field.size() as u64);
    if order > budget {
        return Err(Error::size(format!("GL_{n}({field:?})"), order, budget));
    }
    let row_count = (field.size() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    Ok(GroupEnumerator {
        field: field.clone(),
        n,
        row_count,
        rows: Vec::with_capacity(n),
        part,
        parts: parts.max(1),
        started: false,
        done: n == 0,
    })
}

pub struct GroupEnumerator {
    field: GaloisField,
    n: usize,
    row_count: u64,
    /// Chosen row indices.
    rows: Vec<u64>,
    part: u64,
    parts: u64,
    started: bool,
    done: bool,
}

impl GroupEnumerator {
    fn row_vector(&self, idx: u64) -> Vec<Fq> {
        let s = self.field.size() as u64;
        let mut v = idx;
        (0..self.n)
            .map(|_| {
                let c = Fq((v % s) as u32);
                v /= s;
                c
            })
            .collect()
    }

    fn independent(&self, candidate: u64) -> bool {
        let mut rows: Vec<Vec<Fq>> = self.rows.iter().map(|&r| self.row_vector(r)).collect();
        rows.push(self.row_vector(candidate));
        let k = rows.len();
        matrix::rank(&self.field, &Matrix::from_rows(rows).unwrap()) == k
    }

    fn first_allowed(&self, level: usize, from: u64) -> Option<u64> {
        let mut c = from;
        if level == 0 {
            // align to the requested residue class
            let r = c % self.parts;
            if r != self.part % self.parts {
                c += (self.part % self.parts + self.parts - r) % self.parts;
            }
        }
        while c < self.row_count {
            if self.independent(c) {
                return Some(c);
            }
            c += if level == 0 { self.parts } else { 1 };
        }
        None
    }

    /// Fill rows from the current depth, backtracking when stuck.
    fn advance(&mut self, mut from: u64) -> bool {
        loop {
            let level = self.rows.len();
            match self.first_allowed(level, from) {
                Some(c) => {
                    self.rows.push(c);
                    if self.rows.len() == self.n {
                        return true;
                    }
                    from = 0;
                }
                None => {
                    let Some(last) = self.rows.pop() else {
                        return false;
                    };
                    from = last + if self.rows.is_empty() { self.parts } else { 1 };
                }
            }
        }
    }

    fn current(&self) -> FqMatrix {
        Matrix::from_rows(self.rows.iter().map(|&r| self.row_vector(r)).collect()).unwrap()
    }
}

impl Iterator for GroupEnumerator {
    type Item = FqMatrix;

    fn next(&mut self) -> Option<FqMatrix> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.advance(0)
        } else {
            let last = self.rows.pop().unwrap();
            let step = if self.rows.is_empty() { self.parts } else { 1 };
            self.advance(last + step)
        };
        if ok {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}
