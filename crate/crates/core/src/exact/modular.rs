//! Word-size modular arithmetic: characteristic polynomials by Hessenberg
//! reduction mod p, combined by Chinese remaindering.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::IntPoly;

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below 2^62, largest first.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime_u64(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

fn reduce_matrix(m: &[Vec<i64>], p: u64) -> Vec<Vec<u64>> {
    m.iter()
        .map(|row| row.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect()
}

/// `det(x I - A)` mod p, coefficients from degree 0 upward (monic, length n+1).
pub fn charpoly_mod(m: &[Vec<i64>], p: u64) -> Vec<u64> {
    let n = m.len();
    let mut a = reduce_matrix(m, p);
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| a[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            a.swap(piv, j + 1);
            for row in a.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = invmod(a[j + 1][j], p);
        for k in j + 2..n {
            if a[k][j] == 0 {
                continue;
            }
            let u = mulmod(a[k][j], inv, p);
            // row_k -= u row_{j+1}
            for c in 0..n {
                let t = mulmod(u, a[j + 1][c], p);
                a[k][c] = (a[k][c] + p - t) % p;
            }
            // col_{j+1} += u col_k
            for row in a.iter_mut() {
                let t = mulmod(u, row[k], p);
                row[j + 1] = (row[j + 1] + t) % p;
            }
        }
    }
    // recurrence over leading principal submatrices of the Hessenberg form
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let prev = &polys[k];
        let mut next = vec![0u64; k + 2];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = (next[i] + p - mulmod(a[k][k], c, p)) % p;
        }
        let mut t = 1u64;
        for i in (0..k).rev() {
            t = mulmod(t, a[i + 1][i], p);
            let f = mulmod(t, a[i][k], p);
            if f == 0 {
                continue;
            }
            for (e, &c) in polys[i].iter().enumerate() {
                next[e] = (next[e] + p - mulmod(f, c, p)) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Rank of an integer matrix mod p.
pub fn rank_mod(m: &[Vec<i64>], p: u64) -> usize {
    let mut a = reduce_matrix(m, p);
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = invmod(a[rank][c], p);
        for i in rank + 1..rows {
            if a[i][c] == 0 {
                continue;
            }
            let u = mulmod(a[i][c], inv, p);
            for cc in c..cols {
                let t = mulmod(u, a[rank][cc], p);
                a[i][cc] = (a[i][cc] + p - t) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Exact characteristic polynomial `det(x I - A)` for an integer matrix whose
/// coefficients are bounded in absolute value by `2^bound_bits`.
pub fn charpoly_exact(m: &[Vec<i64>], bound_bits: u64) -> IntPoly {
    let n = m.len();
    // need prod(p) > 2 * bound; each prime carries 61 full bits
    let count = ((bound_bits + 2) / 61 + 1) as usize;
    let ps = primes(count);
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    for &p in &ps {
        let r = charpoly_mod(m, p);
        let pb = BigInt::from(p);
        // acc <- acc + modulus * ((r - acc) * modulus^{-1} mod p)
        let minv = {
            let mm = (&modulus % &pb).to_u64_digits().1.first().copied().unwrap_or(0);
            invmod(mm, p)
        };
        for (e, a) in acc.iter_mut().enumerate() {
            let a_mod = {
                let t = ((&*a % &pb) + &pb) % &pb;
                t.to_u64_digits().1.first().copied().unwrap_or(0)
            };
            let diff = (r[e] + p - a_mod) % p;
            let k = mulmod(diff, minv, p);
            *a += &modulus * BigInt::from(k);
        }
        modulus *= &pb;
    }
    let half = &modulus >> 1;
    let coeffs = acc
        .into_iter()
        .map(|a| if a > half { a - &modulus } else { a })
        .collect();
    IntPoly::from_coeffs(coeffs)
}
