//! Hurwitz zeta `ζ(s, a) = Σ_{m≥0} (m + a)^{-s}` and the multiple variant
//! `ζ_N(s, a) = Σ_{α∈N₀^N} (a + |α|)^{-s} = Σ_m C(m+N-1, N-1) (a + m)^{-s}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

// B_2, B_4, ..., B_24
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Euler–Maclaurin evaluation for real `s > 1`, `a > 0`. The error is the
/// magnitude of the first omitted correction, which bounds the remainder
/// for this monotone integrand.
pub fn hurwitz(s: f64, a: f64) -> Estimate {
    assert!(s > 1.0 && a > 0.0, "hurwitz zeta needs s > 1, a > 0");
    let m = 24usize;
    let mut head = super::CompensatedSum::new();
    for n in 0..m {
        head.add((n as f64 + a).powf(-s));
    }
    let x = m as f64 + a;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) / (2j)! times x^{-s-2j+1}
    let mut coef = s / x.powf(s + 1.0);
    let mut fact = 2.0;
    let mut last = 0.0;
    for (j, &b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * coef;
        if j == BERNOULLI.len() - 1 {
            last = term.abs();
            break;
        }
        tail += term;
        let k = 2 * (j + 1) as u32;
        coef *= (s + (k - 1) as f64) * (s + k as f64) / (x * x);
        fact *= ((k + 1) * (k + 2)) as f64;
    }
    let value = head.value() + tail;
    Estimate {
        value,
        error: last + 4.0 * f64::EPSILON * value.abs(),
    }
}

/// Coefficients of `C(m+N-1, N-1)` as a polynomial in `x = m + a`,
/// lowest degree first, computed exactly.
fn binomial_polynomial(n: usize, a: &BigRational) -> Vec<BigRational> {
    // Π_{i=1}^{N-1} (x - a + i) / (N-1)!
    let mut p = vec![BigRational::one()];
    let mut fact = BigInt::one();
    for i in 1..n {
        let shift = BigRational::from_integer(BigInt::from(i as i64)) - a;
        let mut next = vec![BigRational::zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] += c;
            next[k] += c * &shift;
        }
        p = next;
        fact *= BigInt::from(i as i64);
    }
    let f = BigRational::from_integer(fact);
    p.into_iter().map(|c| c / &f).collect()
}

/// `ζ_N(s, a)` for integer `s ≥ N + 1` and rational `a = a_num / a_den > 0`,
/// as a combination of ordinary Hurwitz values.
pub fn multiple_hurwitz(n: usize, s: u32, a_num: i64, a_den: i64) -> Estimate {
    assert!(n >= 1 && s as usize > n, "needs s ≥ N + 1");
    let a = BigRational::new(BigInt::from(a_num), BigInt::from(a_den));
    let af = a_num as f64 / a_den as f64;
    let poly = binomial_polynomial(n, &a);
    let mut sum = super::CompensatedSum::new();
    let mut err = 0.0;
    for (j, c) in poly.iter().enumerate() {
        let cf = c.to_f64().expect("finite coefficient");
        if cf == 0.0 {
            continue;
        }
        let h = hurwitz(s as f64 - j as f64, af);
        sum.add(cf * h.value);
        err += cf.abs() * h.error;
    }
    let value = sum.value();
    Estimate {
        value,
        error: err + 8.0 * f64::EPSILON * sum.abs_total(),
    }
}

/// Direct partial sum of the multiple zeta series with the integral tail
/// bracket; used as an independent check.
pub fn multiple_hurwitz_direct(n: usize, s: u32, a: f64, terms: usize) -> (f64, f64) {
    let f = |m: f64| -> f64 {
        let mut c = 1.0;
        for i in 1..n {
            c *= (m + i as f64) / i as f64;
        }
        c / (m + a).powi(s as i32)
    };
    let mut acc = super::CompensatedSum::new();
    for m in 0..terms {
        acc.add(f(m as f64));
    }
    // f is eventually decreasing; bound the tail by ∫_{M-1}^∞ f ≥ tail ≥ ∫_M^∞ f
    let tail = super::quad::integrate(
        |u| {
            // substitute m = M / u to map [M, ∞) to (0, 1]
            if u == 0.0 {
                0.0
            } else {
                let m = terms as f64 / u;
                f(m) * terms as f64 / (u * u)
            }
        },
        0.0,
        1.0,
        0.0,
        1e-13,
        2000,
    );
    (acc.value() + tail.value, f(terms as f64 - 1.0) + tail.error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn riemann_values() {
        let z2 = hurwitz(2.0, 1.0);
        assert!((z2.value - PI * PI / 6.0).abs() < 1e-15);
        let z4 = hurwitz(4.0, 1.0);
        assert!((z4.value - PI.powi(4) / 90.0).abs() < 1e-15);
    }

    #[test]
    fn half_shift() {
        // ζ(2, 1/2) = (2² - 1) ζ(2) = π²/2
        let z = hurwitz(2.0, 0.5);
        assert!((z.value - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn multiple_reduces_to_single_for_one_variable() {
        let m = multiple_hurwitz(1, 3, 1, 2);
        let h = hurwitz(3.0, 0.5);
        assert!((m.value - h.value).abs() < 1e-15);
    }

    #[test]
    fn multiple_matches_direct_series() {
        for &(n, s, num, den) in &[(2usize, 4u32, 1i64, 1i64), (3, 6, 3, 2), (4, 6, 2, 1)] {
            let fast = multiple_hurwitz(n, s, num, den);
            let (direct, err) = multiple_hurwitz_direct(n, s, num as f64 / den as f64, 4000);
            assert!(
                (fast.value - direct).abs() <= err + 1e-12 * direct,
                "N={n} s={s}: {} vs {direct} (±{err})",
                fast.value
            );
        }
    }

    #[test]
    fn binomial_polynomial_evaluates_correctly() {
        let a = BigRational::new(3.into(), 2.into());
        let p = binomial_polynomial(4, &a);
        // m = 2 → x = 3.5 → C(5, 3) = 10
        let x = 3.5f64;
        let v: f64 = p
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64().unwrap() * x.powi(k as i32))
            .sum();
        assert!((v - 10.0).abs() < 1e-12);
    }
}
