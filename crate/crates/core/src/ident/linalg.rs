//! Exact rank and null space over the rationals.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::{Matrix, Rational};

/// Rank by fraction-free (Bareiss) elimination. Rows are first cleared of
/// denominators, which does not change the rank.
pub fn rank(m: &Matrix<Rational>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form, returning the pivot columns.
pub fn rref(m: &Matrix<Rational>) -> (Matrix<Rational>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let t = a[(r, j)].clone();
                a[(r, j)] = a[(p, j)].clone();
                a[(p, j)] = t;
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let v = &a[(r, j)] * &f;
                a[(i, j)] = &a[(i, j)] - &v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of `{x : m x = 0}`, one vector per free column, with a 1 in that
/// column.
pub fn null_space(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let cols = m.cols();
    let (r, pivots) = rref(m);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = alloc::vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{a : a^T m = 0}`.
pub fn left_null_space(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    null_space(&m.transpose())
}

/// `m` with `v` appended as an extra column.
pub fn with_column(m: &Matrix<Rational>, v: &[Rational]) -> Matrix<Rational> {
    assert_eq!(m.rows(), v.len());
    Matrix::from_fn(m.rows(), m.cols() + 1, |i, j| {
        if j < m.cols() {
            m[(i, j)].clone()
        } else {
            v[i].clone()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&mat(&[&[0, 1, 2], &[1, 0, 3], &[1, 1, 5]])), 2);
        assert_eq!(rank(&mat(&[&[2, 0, 1], &[0, 3, 1], &[1, 1, 7]])), 3);
        let m = Matrix::from_rows(alloc::vec![
            alloc::vec![rat(1, 3), rat(1, 2)],
            alloc::vec![rat(2, 3), int(1)]
        ])
        .unwrap();
        assert_eq!(rank(&m), 1);
        assert_eq!(rank(&Matrix::from_fn(1, 0, |_, _| int(0))), 0);
    }

    #[test]
    fn left_null_vectors_annihilate() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1], &[2, 2, 4]]);
        let basis = left_null_space(&m);
        assert_eq!(basis.len(), 4 - rank(&m));
        for a in &basis {
            for j in 0..m.cols() {
                let dot = (0..m.rows()).fold(Rational::zero(), |acc, i| acc + &a[i] * &m[(i, j)]);
                assert!(dot.is_zero());
            }
        }
    }
}
