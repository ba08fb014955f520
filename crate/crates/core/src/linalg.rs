//! Exact linear algebra over the integers and rationals.
//!
//! Everything here works on small dense matrices (node counts are in the
//! single digits), so plain Gaussian elimination and textbook Hermite
//! normal form are plenty.

use crate::algebra::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;
pub type RatMat = Vec<Vec<Rational>>;

pub fn int_mat_from_i64(rows: &[Vec<i64>]) -> IntMat {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn rat_mat_from_int(m: &IntMat) -> RatMat {
    m.iter()
        .map(|r| r.iter().map(|x| Rational::from(x.clone())).collect())
        .collect()
}

pub fn mat_mul_int(a: &IntMat, b: &IntMat) -> IntMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                let prod = &a[i][l] * &b[l][j];
                out[i][j] += prod;
            }
        }
    }
    out
}

pub fn mat_mul_rat(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                let prod = &a[i][l] * &b[l][j];
                out[i][j] += prod;
            }
        }
    }
    out
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Rank over the rationals.
pub fn rank_rational(mat: &RatMat) -> usize {
    let mut m = mat.to_vec();
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        let inv = m[row][col].clone().recip();
        for c in col..cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..cols {
                    let v = &m[r][c] - &(&f * &m[row][c]);
                    m[r][c] = v;
                }
            }
        }
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

pub fn rank_int(mat: &IntMat) -> usize {
    rank_rational(&rat_mat_from_int(mat))
}

/// Inverse of a square rational matrix; `None` when singular.
pub fn invert_rational(mat: &RatMat) -> Option<RatMat> {
    let n = mat.len();
    let mut m: RatMat = mat
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            for j in 0..n {
                row.push(if i == j { Rational::one() } else { Rational::zero() });
            }
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].clone().recip();
        for c in 0..2 * n {
            let v = &m[col][c] * &inv;
            m[col][c] = v;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let v = &m[r][c] - &(&f * &m[col][c]);
                    m[r][c] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve `A x = b` exactly. Returns any particular solution (free variables
/// set to zero) or `None` when inconsistent.
pub fn solve_rational(a: &RatMat, b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: RatMat = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].clone().recip();
        for c in col..=cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let v = &m[r][c] - &(&f * &m[row][c]);
                    m[r][c] = v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for &(r, c) in &pivots {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// Row-style Hermite normal form of the lattice spanned by the rows.
/// Pivots are positive, entries above a pivot are reduced into `[0, pivot)`,
/// and zero rows are dropped, so equal lattices yield equal output.
pub fn hnf_rows(mat: &IntMat) -> IntMat {
    let mut m = mat.to_vec();
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        // Clear the column below `row` with gcd steps.
        loop {
            let mut idx: Option<usize> = None;
            for r in row..rows {
                if !m[r][col].is_zero() {
                    idx = match idx {
                        None => Some(r),
                        Some(i) => {
                            if m[r][col].abs() < m[i][col].abs() {
                                Some(r)
                            } else {
                                Some(i)
                            }
                        }
                    };
                }
            }
            let Some(i) = idx else { break };
            m.swap(row, i);
            let mut done = true;
            for r in row + 1..rows {
                if !m[r][col].is_zero() {
                    let q = Integer::div_floor(&m[r][col], &m[row][col]);
                    for c in 0..cols {
                        let v = &m[r][c] - &(&q * &m[row][c]);
                        m[r][c] = v;
                    }
                    if !m[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[row][col].is_zero() {
            continue;
        }
        if m[row][col].is_negative() {
            for c in 0..cols {
                m[row][c] = -m[row][c].clone();
            }
        }
        // Reduce rows above the pivot.
        for r in 0..row {
            if !m[r][col].is_zero() {
                let q = Integer::div_floor(&m[r][col], &m[row][col]);
                for c in 0..cols {
                    let v = &m[r][c] - &(&q * &m[row][c]);
                    m[r][c] = v;
                }
            }
        }
        row += 1;
    }
    m.truncate(row);
    m
}

/// Basis of the full integer kernel lattice `{x : A x = 0}`.
pub fn integer_kernel(a: &IntMat) -> IntMat {
    let rows = a.len();
    if rows == 0 {
        return vec![];
    }
    let n = a[0].len();
    // Work on [A^T | I]; unimodular row operations keep the right block a
    // record of which variable combination each row represents.
    let mut m: IntMat = (0..n)
        .map(|i| {
            let mut row: Vec<BigInt> = a.iter().map(|r| r[i].clone()).collect();
            for j in 0..n {
                row.push(if i == j { BigInt::one() } else { BigInt::zero() });
            }
            row
        })
        .collect();
    let total = rows + n;
    let mut row = 0;
    for col in 0..rows {
        if row == n {
            break;
        }
        loop {
            let mut idx: Option<usize> = None;
            for r in row..n {
                if !m[r][col].is_zero() {
                    idx = match idx {
                        None => Some(r),
                        Some(i) => {
                            if m[r][col].abs() < m[i][col].abs() {
                                Some(r)
                            } else {
                                Some(i)
                            }
                        }
                    };
                }
            }
            let Some(i) = idx else { break };
            m.swap(row, i);
            let mut done = true;
            for r in row + 1..n {
                if !m[r][col].is_zero() {
                    let q = Integer::div_floor(&m[r][col], &m[row][col]);
                    for c in 0..total {
                        let v = &m[r][c] - &(&q * &m[row][c]);
                        m[r][c] = v;
                    }
                    if !m[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !m[row][col].is_zero() {
            row += 1;
        }
    }
    let kernel: IntMat = m[row..]
        .iter()
        .map(|r| r[rows..].to_vec())
        .collect();
    hnf_rows(&kernel)
}

/// Divide by the gcd of the entries and flip signs so the first nonzero
/// entry is positive. The zero vector is returned unchanged.
pub fn content_normalize(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let mut out: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut out {
                *x = -x.clone();
            }
        }
    }
    out
}

/// Lattice equality through canonical Hermite forms.
pub fn lattice_eq(a: &IntMat, b: &IntMat) -> bool {
    hnf_rows(a) == hnf_rows(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_skew_matrix() {
        // Somos-4 exchange matrix has a rank-2 kernel containing
        // (1,1,1,1) and (1,2,3,4).
        let b = int_mat_from_i64(&[
            vec![0, -1, 2, -1],
            vec![1, 0, -3, 2],
            vec![-2, 3, 0, -1],
            vec![1, -2, 1, 0],
        ]);
        let k = integer_kernel(&b);
        assert_eq!(k.len(), 2);
        let expect = int_mat_from_i64(&[vec![1, 1, 1, 1], vec![1, 2, 3, 4]]);
        assert!(lattice_eq(&k, &expect));
    }

    #[test]
    fn inverse_and_rank() {
        let m = int_mat_from_i64(&[vec![2, 1], vec![1, 1]]);
        let r = rat_mat_from_int(&m);
        let inv = invert_rational(&r).unwrap();
        let prod = mat_mul_rat(&r, &inv);
        assert_eq!(prod[0][0], Rational::one());
        assert_eq!(prod[0][1], Rational::zero());
        assert_eq!(rank_int(&m), 2);
    }

    #[test]
    fn solve_underdetermined() {
        let a = vec![vec![Rational::from(BigInt::from(1)), Rational::from(BigInt::from(1))]];
        let b = vec![Rational::from(BigInt::from(3))];
        let x = solve_rational(&a, &b).unwrap();
        let s = &x[0] + &x[1];
        assert_eq!(s, Rational::from(BigInt::from(3)));
    }

    #[test]
    fn solve_inconsistent() {
        let a = vec![
            vec![Rational::from(BigInt::from(1))],
            vec![Rational::from(BigInt::from(1))],
        ];
        let b = vec![Rational::from(BigInt::from(1)), Rational::from(BigInt::from(2))];
        assert!(solve_rational(&a, &b).is_none());
    }
}
