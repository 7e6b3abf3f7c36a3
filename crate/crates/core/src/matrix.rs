//! Dense matrices over a [`Ring`] context and Gaussian elimination over a
//! [`Field`] context.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elem> {
    let mut m = Matrix::filled(n, n, ring.zero());
    for i in 0..n {
        m[(i, i)] = ring.one();
    }
    m
}

pub fn zeros<R: Ring>(ring: &R, rows: usize, cols: usize) -> Matrix<R::Elem> {
    Matrix::filled(rows, cols, ring.zero())
}

pub fn diagonal<R: Ring>(ring: &R, entries: &[R::Elem]) -> Matrix<R::Elem> {
    let mut m = zeros(ring, entries.len(), entries.len());
    for (i, e) in entries.iter().enumerate() {
        m[(i, i)] = e.clone();
    }
    m
}

pub fn is_identity<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> bool {
    m.is_square()
        && (0..m.rows()).all(|i| {
            (0..m.cols()).all(|j| {
                if i == j {
                    ring.is_one(&m[(i, j)])
                } else {
                    ring.is_zero(&m[(i, j)])
                }
            })
        })
}

pub fn mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    if a.cols != b.rows {
        return Err(Error::Dimension {
            expected: a.cols,
            got: b.rows,
        });
    }
    let mut data = Vec::with_capacity(a.rows * b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = ring.zero();
            for k in 0..a.cols {
                let t = ring.mul(&a[(i, k)], &b[(k, j)]);
                acc = ring.add(&acc, &t);
            }
            data.push(acc);
        }
    }
    Ok(Matrix {
        rows: a.rows,
        cols: b.cols,
        data,
    })
}

pub fn add<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Dimension {
            expected: a.data.len(),
            got: b.data.len(),
        });
    }
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.add(x, y)).collect(),
    })
}

pub fn sub<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Dimension {
            expected: a.data.len(),
            got: b.data.len(),
        });
    }
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.sub(x, y)).collect(),
    })
}

pub fn scale<R: Ring>(ring: &R, c: &R::Elem, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| ring.mul(c, x))
}

pub fn mat_vec<R: Ring>(ring: &R, a: &Matrix<R::Elem>, v: &[R::Elem]) -> Result<Vec<R::Elem>> {
    if a.cols != v.len() {
        return Err(Error::Dimension {
            expected: a.cols,
            got: v.len(),
        });
    }
    Ok((0..a.rows)
        .map(|i| {
            (0..a.cols).fold(ring.zero(), |acc, k| ring.add(&acc, &ring.mul(&a[(i, k)], &v[k])))
        })
        .collect())
}

/// Row vector times matrix.
pub fn vec_mat<R: Ring>(ring: &R, v: &[R::Elem], a: &Matrix<R::Elem>) -> Result<Vec<R::Elem>> {
    if a.rows != v.len() {
        return Err(Error::Dimension {
            expected: a.rows,
            got: v.len(),
        });
    }
    Ok((0..a.cols)
        .map(|j| {
            (0..a.rows).fold(ring.zero(), |acc, k| ring.add(&acc, &ring.mul(&v[k], &a[(k, j)])))
        })
        .collect())
}

pub fn dot<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Result<R::Elem> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a
        .iter()
        .zip(b)
        .fold(ring.zero(), |acc, (x, y)| ring.add(&acc, &ring.mul(x, y))))
}

pub fn pow<R: Ring>(ring: &R, a: &Matrix<R::Elem>, mut e: u64) -> Result<Matrix<R::Elem>> {
    let mut result = identity(ring, a.rows);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(ring, &result, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = mul(ring, &base, &base)?;
        }
    }
    Ok(result)
}

/// Reduced row echelon form; returns the reduced matrix and its pivot columns.
pub fn rref<F: Field>(field: &F, m: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !field.is_zero(&a[(i, c)])) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = field.inv(&a[(r, c)]).expect("nonzero pivot");
        for j in 0..a.cols {
            a[(r, j)] = field.mul(&a[(r, j)], &inv);
        }
        for i in 0..a.rows {
            if i != r && !field.is_zero(&a[(i, c)]) {
                let factor = a[(i, c)].clone();
                for j in 0..a.cols {
                    let t = field.mul(&factor, &a[(r, j)]);
                    a[(i, j)] = field.sub(&a[(i, j)], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    rref(field, m).1.len()
}

/// Nonzero rows of the reduced row echelon form: a canonical basis of the row space.
pub fn row_space_basis<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let (r, pivots) = rref(field, m);
    let rows: Vec<Vec<F::Elem>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
    if rows.is_empty() {
        return zeros(field, 0, m.cols());
    }
    Matrix::from_rows(rows).expect("uniform rows")
}

/// Basis of the right kernel `{x : m x = 0}`.
pub fn kernel<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (r, pivots) = rref(field, m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); m.cols()];
            v[fc] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(&r[(row, fc)]);
            }
            v
        })
        .collect()
}

/// One solution of `m x = b`, or `None` when inconsistent.
pub fn solve<F: Field>(field: &F, m: &Matrix<F::Elem>, b: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension {
            expected: m.rows(),
            got: b.len(),
        });
    }
    let mut aug = zeros(field, m.rows(), m.cols() + 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols())] = b[i].clone();
    }
    let (r, pivots) = rref(field, &aug);
    if pivots.last() == Some(&m.cols()) {
        return Ok(None);
    }
    let mut x = vec![field.zero(); m.cols()];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[(row, m.cols())].clone();
    }
    Ok(Some(x))
}

pub fn det<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<F::Elem> {
    if !m.is_square() {
        return Err(Error::Dimension {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut d = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !field.is_zero(&a[(i, c)])) else {
            return Ok(field.zero());
        };
        if p != c {
            a.swap_rows(p, c);
            d = field.neg(&d);
        }
        let pivot = a[(c, c)].clone();
        d = field.mul(&d, &pivot);
        let inv = field.inv(&pivot).expect("nonzero pivot");
        for i in c + 1..n {
            if field.is_zero(&a[(i, c)]) {
                continue;
            }
            let factor = field.mul(&a[(i, c)], &inv);
            for j in c..n {
                let t = field.mul(&factor, &a[(c, j)]);
                a[(i, j)] = field.sub(&a[(i, j)], &t);
            }
        }
    }
    Ok(d)
}

/// Inverse, or `None` for a singular matrix.
pub fn inverse<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<Option<Matrix<F::Elem>>> {
    if !m.is_square() {
        return Err(Error::Dimension {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let n = m.rows();
    let mut aug = zeros(field, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = field.one();
    }
    let (r, pivots) = rref(field, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Ok(None);
    }
    let mut inv = zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = r[(i, n + j)].clone();
        }
    }
    Ok(Some(inv))
}

/// Whether the row space of `a` is contained in the row space of `b`.
pub fn row_space_contained<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> bool {
    if a.rows() == 0 {
        return true;
    }
    let rb = rank(field, b);
    let mut rows = b.to_rows();
    rows.extend(a.to_rows());
    let stacked = Matrix::from_rows(rows).expect("uniform rows");
    rank(field, &stacked) == rb
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, PrimeField};
    use crate::Rat;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn kernel_of_rank_one_rational_matrix() {
        let f = Exact::<Rat>::new();
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(-1, 1)], vec![q(-2, 1), q(2, 1)]]).unwrap();
        let k = kernel(&f, &m);
        assert_eq!(k, vec![vec![q(1, 1), q(1, 1)]]);
        assert_eq!(rank(&f, &m), 1);
    }

    #[test]
    fn inverse_round_trip_over_f7() {
        let f = PrimeField::new(7);
        let m = Matrix::from_rows(vec![vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]).unwrap();
        let inv = inverse(&f, &m).unwrap().unwrap();
        assert!(is_identity(&f, &mul(&f, &m, &inv).unwrap()));
        assert_eq!(det(&f, &m).unwrap(), 1);
    }

    #[test]
    fn singular_has_no_inverse() {
        let f = PrimeField::new(2);
        let m = Matrix::from_rows(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert!(inverse(&f, &m).unwrap().is_none());
        assert_eq!(det(&f, &m).unwrap(), 0);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f = Exact::<Rat>::new();
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]]).unwrap();
        assert!(solve(&f, &m, &[q(1, 1), q(3, 1)]).unwrap().is_none());
        let x = solve(&f, &m, &[q(1, 1), q(2, 1)]).unwrap().unwrap();
        assert_eq!(mat_vec(&f, &m, &x).unwrap(), vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn integer_matrix_power() {
        let z = Exact::<i64>::new();
        let c = Matrix::from_rows(vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(is_identity(&z, &pow(&z, &c, 3).unwrap()));
        assert!(!is_identity(&z, &pow(&z, &c, 2).unwrap()));
    }
}
