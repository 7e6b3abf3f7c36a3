//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::matrix::Matrix;

/// Invariant factors `d_1 | d_2 | ...` of an integer matrix, one per diagonal
/// slot of the Smith form (`min(rows, cols)` entries). Free summands of the
/// cokernel appear as trailing zeros.
pub fn invariant_factors(m: &Matrix<i64>) -> Vec<BigInt> {
    invariant_factors_big(&m.map(|&x| BigInt::from(x)))
}

pub fn invariant_factors_big(m: &Matrix<BigInt>) -> Vec<BigInt> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let k = rows.min(cols);
    for t in 0..k {
        // pivot: nonzero entry of least absolute value in the trailing block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // trailing block is zero
                return finish(&a, k);
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let p = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let qt = a[(i, t)].div_floor(&p);
                if !qt.is_zero() {
                    for j in t..cols {
                        let v = &a[(t, j)] * &qt;
                        a[(i, j)] -= v;
                    }
                }
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let qt = a[(t, j)].div_floor(&p);
                if !qt.is_zero() {
                    for i in t..rows {
                        let v = &a[(i, t)] * &qt;
                        a[(i, j)] -= v;
                    }
                }
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let mut bad = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[(i, j)].is_multiple_of(&p) {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[(i, j)].clone();
                        a[(t, j)] += v;
                    }
                }
                None => break,
            }
        }
    }
    finish(&a, k)
}

fn finish(a: &Matrix<BigInt>, k: usize) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = (0..k).map(|i| a[(i, i)].abs()).collect();
    let nonzero = out.iter().filter(|d| !d.is_zero()).count();
    out.sort_by(|x, y| match (x.is_zero(), y.is_zero()) {
        (true, true) => std::cmp::Ordering::Equal,
        (true, false) => std::cmp::Ordering::Greater,
        (false, true) => std::cmp::Ordering::Less,
        (false, false) => x.cmp(y),
    });
    debug_assert!(out[..nonzero].windows(2).all(|w| w[1].is_multiple_of(&w[0])));
    out
}

/// Invariant factors of `1 - a` for a square integer matrix `a`.
pub fn cokernel_of_one_minus(a: &Matrix<i64>) -> Vec<BigInt> {
    let n = a.rows();
    let mut m = a.map(|&x| -x);
    for i in 0..n {
        m[(i, i)] += 1;
    }
    invariant_factors(&m)
}
