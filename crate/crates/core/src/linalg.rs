//! Exact linear algebra over arbitrary-precision rationals.
//!
//! Everything here is plain Gauss–Jordan elimination on `BigRational`
//! matrices. It is deliberately simple: these routines serve as the exact
//! reference that the combinatorial fast paths are checked against, and as
//! the workhorse of the generic pivoting engine, where basis matrices stay
//! small (`(n+1) × (n+1)`).

use num::BigRational;
use num::{One, Signed, Zero};

/// `BigRational` from an integer.
pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// The `n × n` identity matrix.
pub fn identity(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

/// Matrix–vector product.
pub fn mat_vec(a: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

/// Matrix–matrix product.
pub fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(r, brow)| r * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Solve the square system `A x = b`; `None` when `A` is singular.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut work: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    if reduce(&mut work, n) < n {
        return None;
    }
    Some(work.into_iter().map(|mut row| row.pop().expect("augmented column")).collect())
}

/// Inverse of a square matrix; `None` when singular.
pub fn inverse(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    let mut work: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    if reduce(&mut work, n) < n {
        return None;
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Rank of an arbitrary rectangular matrix.
pub fn rank(a: &[Vec<BigRational>]) -> usize {
    if a.is_empty() || a[0].is_empty() {
        return 0;
    }
    let cols = a[0].len();
    debug_assert!(a.iter().all(|row| row.len() == cols));
    let mut work = a.to_vec();
    reduce(&mut work, cols)
}

/// Gauss–Jordan over the first `cols` columns; returns the rank and leaves
/// `work` in reduced row echelon form (including any extra columns).
fn reduce(work: &mut [Vec<BigRational>], cols: usize) -> usize {
    let rows = work.len();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Exact arithmetic: any nonzero pivot works, but preferring the
        // largest magnitude keeps intermediate numerators small in practice.
        let Some(best) = (pivot_row..rows)
            .filter(|&r| !work[r][col].is_zero())
            .max_by(|&r, &s| work[r][col].abs().cmp(&work[s][col].abs()))
        else {
            continue;
        };
        work.swap(pivot_row, best);
        let inv = work[pivot_row][col].recip();
        for v in work[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !work[r][col].is_zero() {
                let factor = work[r][col].clone();
                let (head, tail) = work.split_at_mut(pivot_row.max(r));
                let (src, dst) = if r < pivot_row {
                    (&tail[0], &mut head[r])
                } else {
                    (&head[pivot_row], &mut tail[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = &*d - &factor * s;
                }
            }
        }
        pivot_row += 1;
    }
    pivot_row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    #[test]
    fn inverse_of_known_matrix() {
        let a = mat(&[&[2, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert_eq!(mat_mul(&inv, &a), identity(3));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(inverse(&a).is_none());
        assert!(solve(&a, &[rat(1), rat(1)]).is_none());
    }

    #[test]
    fn solve_round_trips() {
        let a = mat(&[&[3, 1, -2], &[1, 0, 4], &[0, 5, 1]]);
        let x = vec![rat(2), rat(-1), rat(7)];
        let b = mat_vec(&a, &x);
        assert_eq!(solve(&a, &b).unwrap(), x);
    }

    #[test]
    fn rank_of_rectangular_matrices() {
        assert_eq!(rank(&mat(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(rank(&mat(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]])), 2);
        assert_eq!(rank(&mat(&[&[1, 0], &[0, 1], &[1, 1]])), 2);
        assert_eq!(rank(&identity(4)), 4);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn fractional_pivots_stay_exact() {
        // Hilbert-like matrix: floating point would drift, rationals must not.
        let a: Vec<Vec<BigRational>> = (1..=4)
            .map(|i| (1..=4).map(|j| BigRational::new(1.into(), (i + j - 1).into())).collect())
            .collect();
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(4));
    }
}
