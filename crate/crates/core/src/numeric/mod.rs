//! Floating-point building blocks: a scalar abstraction over `f64` and
//! double-double, compensated sums, Jacobi theta sums, adaptive quadrature and
//! Hurwitz-type zeta values.

mod dd;
pub mod quad;
pub mod zeta;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub use dd::{DD, DD_PI};

/// Working precision selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

/// Scalar operations needed by the trace formulas.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sinh(self) -> Self;
    fn powi(self, n: i32) -> Self;
    /// Unit roundoff of the type.
    fn epsilon() -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_i64(n: i64) -> Self {
        // exact for |n| < 2^53, which covers every count used here
        Self::from_f64(n as f64)
    }

    /// `x / sinh x`, equal to 1 at 0.
    fn x_over_sinh(self) -> Self {
        if self.to_f64() == 0.0 {
            Self::one()
        } else {
            self / self.sinh()
        }
    }

    /// `x^{k/2}` for a nonnegative integer `k`.
    fn pow_half(self, k: usize) -> Self {
        let p = self.powi((k / 2) as i32);
        if k % 2 == 1 {
            p * self.sqrt()
        } else {
            p
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn epsilon() -> f64 {
        f64::EPSILON / 2.0
    }
}

impl Real for DD {
    fn from_f64(x: f64) -> Self {
        DD::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        DD::to_f64(self)
    }
    fn pi() -> Self {
        DD_PI
    }
    fn exp(self) -> Self {
        DD::exp(self)
    }
    fn ln(self) -> Self {
        DD::ln(self)
    }
    fn sqrt(self) -> Self {
        DD::sqrt(self)
    }
    fn sinh(self) -> Self {
        DD::sinh(self)
    }
    fn powi(self, n: i32) -> Self {
        DD::powi(self, n)
    }
    fn epsilon() -> f64 {
        // 2^-104, conservatively rounded up
        5.0e-32
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of absolute values of everything added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs
    }
}

/// Accumulator that is compensated in double and plain in double-double.
pub trait Accumulate: Real {
    type Acc: Default;
    fn acc_add(acc: &mut Self::Acc, x: Self);
    fn acc_value(acc: &Self::Acc) -> Self;
}

impl Accumulate for f64 {
    type Acc = CompensatedSum;
    fn acc_add(acc: &mut CompensatedSum, x: f64) {
        acc.add(x);
    }
    fn acc_value(acc: &CompensatedSum) -> f64 {
        acc.value()
    }
}

impl Accumulate for DD {
    type Acc = DD;
    fn acc_add(acc: &mut DD, x: DD) {
        *acc += x;
    }
    fn acc_value(acc: &DD) -> DD {
        *acc
    }
}

/// One-dimensional theta sum `θ(a) = Σ_{k∈Z} e^{-a k²}` for `a > 0`.
///
/// Direct summation for `a ≥ π`, otherwise the Poisson dual
/// `√(π/a) Σ e^{-π² k²/a}`; both converge to full precision within a few
/// dozen terms.
pub fn theta1<T: Real>(a: T) -> T {
    let af = a.to_f64();
    assert!(af > 0.0, "theta1 needs a positive argument");
    let pi = T::pi();
    if af >= std::f64::consts::PI {
        theta_direct(a)
    } else {
        (pi / a).sqrt() * theta_direct(pi * pi / a)
    }
}

/// Direct summation of `Σ e^{-a k²}` until the terms drop below roundoff.
pub fn theta_direct<T: Real>(a: T) -> T {
    let mut sum = T::zero();
    let mut k: i64 = 1;
    loop {
        let term = (-(a * T::from_i64(k * k))).exp();
        sum += term;
        if term.to_f64() <= T::epsilon() * 1e-3 * sum.to_f64().max(1e-300) || k > 100_000_000 {
            break;
        }
        k += 1;
    }
    T::one() + sum + sum
}

/// Upper bound for `Σ_{k∈Z^n} e^{-a‖k‖²}` valid for every `a > 0`.
pub fn theta_upper(a: f64, n: usize) -> f64 {
    (1.0 + (std::f64::consts::PI / a).sqrt()).powi(n as i32)
}

/// Binomial coefficient as `f64` (exact below 2^53).
pub fn binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Volume of the unit sphere `S^{d-1}`, `2π^{d/2}/Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / statrs::function::gamma::gamma(d as f64 / 2.0)
}
