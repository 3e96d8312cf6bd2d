//! Fraction-free Gaussian elimination over the integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Runs Bareiss elimination in place and returns the rank. With full rank
/// the last pivot is the determinant up to the returned row-swap sign.
fn eliminate(a: &mut [Vec<BigInt>]) -> (usize, i32) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut sign = 1;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if piv != rank {
            a.swap(piv, rank);
            sign = -sign;
        }
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    (rank, sign)
}

pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let (rank, sign) = eliminate(&mut a);
    if rank < n {
        return BigInt::zero();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    det(&to_big(m))
}

pub fn rank(m: &[Vec<BigInt>]) -> usize {
    let mut a = m.to_vec();
    eliminate(&mut a).0
}

pub fn rank_i64(m: &[Vec<i64>]) -> usize {
    rank(&to_big(m))
}
