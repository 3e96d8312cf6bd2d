//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`,
//! giving roughly 32 significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: DD = DD {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

pub const DD_PI: DD = DD {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DD { hi, lo }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return DD::ONE / self.powi(-n);
        }
        let (mut base, mut e, mut acc) = (self, n as u32, DD::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        // one Newton step from the double result is enough
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let corr = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        DD { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DD::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        // exp(r) = exp(r / 2^10)^(2^10); square in the expm1 form
        // p <- p (2 + p) so the small part keeps its relative accuracy
        let s = r.mul_f64(1.0 / 1024.0);
        let mut term = s;
        let mut p = s;
        for i in 2..=14 {
            term = term * s / DD::from_f64(i as f64);
            p += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            p = p * (p + DD::from_f64(2.0));
        }
        let sum = p + DD::ONE;
        let scale = 2f64.powi(k as i32);
        DD {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    pub fn ln(self) -> Self {
        // Newton on exp: y <- y + x e^{-y} - 1
        let mut y = DD::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DD::ONE;
        }
        y
    }

    /// `sinh` with a series near zero to avoid cancellation.
    pub fn sinh(self) -> Self {
        if self.hi.abs() < 0.1 {
            let x2 = self.sqr();
            let mut term = self;
            let mut sum = self;
            for k in 1..=12 {
                term = term * x2 / DD::from_f64(((2 * k) * (2 * k + 1)) as f64);
                sum += term;
            }
            return sum;
        }
        let e = self.exp();
        (e - DD::ONE / e).mul_f64(0.5)
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> Self {
        DD::from_f64(x)
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::from_f64(q3)
    }
}

impl AddAssign for DD {
    fn add_assign(&mut self, b: DD) {
        *self = *self + b;
    }
}

impl SubAssign for DD {
    fn sub_assign(&mut self, b: DD) {
        *self = *self - b;
    }
}

impl MulAssign for DD {
    fn mul_assign(&mut self, b: DD) {
        *self = *self * b;
    }
}

impl PartialOrd for DD {
    fn partial_cmp(&self, other: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for DD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
