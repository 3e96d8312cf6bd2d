//! Integer kernels by unimodular column operations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Basis of the full integer kernel `{x ∈ Z^n : A x = 0}` of an `m × n`
/// matrix. The basis spans a saturated lattice because it is read off a
/// unimodular transform.
pub fn integer_kernel(a: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut w: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    // u[c] is column c of the transform, stored as a vector
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|c| {
            let mut v = vec![BigInt::zero(); n];
            v[c] = BigInt::one();
            v
        })
        .collect();
    let mut pc = 0;
    for i in 0..m {
        if pc == n {
            break;
        }
        for c in pc + 1..n {
            if w[i][c].is_zero() {
                continue;
            }
            let (x, y) = (w[i][pc].clone(), w[i][c].clone());
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            // [col_pc, col_c] <- [s col_pc + t col_c, -yg col_pc + xg col_c]
            combine(&mut w, i, pc, c, &s, &t, &yg, &xg);
            combine_cols(&mut u, pc, c, &s, &t, &yg, &xg);
        }
        if !w[i][pc].is_zero() {
            pc += 1;
        }
    }
    let mut basis: Vec<Vec<BigInt>> = u.drain(pc..).collect();
    size_reduce(&mut basis);
    basis
}

#[allow(clippy::too_many_arguments)]
fn combine(
    w: &mut [Vec<BigInt>],
    _row: usize,
    p: usize,
    c: usize,
    s: &BigInt,
    t: &BigInt,
    yg: &BigInt,
    xg: &BigInt,
) {
    for r in w.iter_mut() {
        let (a, b) = (r[p].clone(), r[c].clone());
        r[p] = s * &a + t * &b;
        r[c] = xg * &b - yg * &a;
    }
}

fn combine_cols(
    u: &mut [Vec<BigInt>],
    p: usize,
    c: usize,
    s: &BigInt,
    t: &BigInt,
    yg: &BigInt,
    xg: &BigInt,
) {
    let (a, b) = (u[p].clone(), u[c].clone());
    u[p] = a.iter().zip(&b).map(|(x, y)| s * x + t * y).collect();
    u[c] = a.iter().zip(&b).map(|(x, y)| xg * y - yg * x).collect();
}

// Cheap entry-size control before the floating LLL: subtract integer
// multiples of earlier vectors while that shrinks the squared norm.
fn size_reduce(b: &mut [Vec<BigInt>]) {
    let norm = |v: &[BigInt]| v.iter().map(|x| x * x).sum::<BigInt>();
    let dot = |v: &[BigInt], w: &[BigInt]| v.iter().zip(w).map(|(x, y)| x * y).sum::<BigInt>();
    for _ in 0..4 {
        for i in 0..b.len() {
            for j in 0..b.len() {
                if i == j {
                    continue;
                }
                let nj = norm(&b[j]);
                if nj.is_zero() {
                    continue;
                }
                let d = dot(&b[i], &b[j]);
                let q = round_div(&d, &nj);
                if q.is_zero() {
                    continue;
                }
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
            }
        }
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = if b.is_negative() {
        (-a, -b)
    } else {
        (a.clone(), b.clone())
    };
    (a * BigInt::from(2) + &b).div_floor(&(b * BigInt::from(2)))
}

/// Converts a BigInt basis to i64, if every entry fits.
pub fn to_i64(basis: &[Vec<BigInt>]) -> Option<Vec<Vec<i64>>> {
    basis
        .iter()
        .map(|v| v.iter().map(|x| x.to_i64()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
        a.iter()
            .map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    }

    #[test]
    fn kernel_of_single_row() {
        let a = vec![vec![2, 4, 6]];
        let k = to_i64(&integer_kernel(&a)).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(apply(&a, v), vec![0]);
        }
        // saturated iff the 2x2 minors of the basis have gcd 1
        let m = [
            k[0][0] * k[1][1] - k[0][1] * k[1][0],
            k[0][0] * k[1][2] - k[0][2] * k[1][0],
            k[0][1] * k[1][2] - k[0][2] * k[1][1],
        ];
        let g = m.iter().fold(0i64, |g, x| g.gcd(x));
        assert_eq!(g, 1);
    }

    #[test]
    fn kernel_is_finer_than_obvious_generators() {
        // x + y + z = 0 with 2x = 2y: kernel spanned by (1,1,-2)
        let a = vec![vec![1, 1, 1], vec![2, -2, 0]];
        let k = to_i64(&integer_kernel(&a)).unwrap();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(v == &vec![1, 1, -2] || v == &vec![-1, -1, 2]);
    }

    #[test]
    fn round_division() {
        let r = |a: i64, b: i64| round_div(&BigInt::from(a), &BigInt::from(b));
        assert_eq!(r(7, 2), BigInt::from(4));
        assert_eq!(r(-7, 2), BigInt::from(-3));
        assert_eq!(r(5, 3), BigInt::from(2));
        assert_eq!(r(-5, 3), BigInt::from(-2));
        assert_eq!(r(5, -3), BigInt::from(-2));
    }
}
