//! Heat traces of the sub-Laplacian and the Laplacian on `Γ\G` via the
//! decomposition into component operators `D^(n)`, one per dual vector
//! `n = 2(μ + ν)` of the centre lattice.
//!
//! Component traces depend on `n` only through `‖μ‖², ‖ν‖²` and, in the
//! isotropic case, on the kernel lattice `M(n)`. The totals are therefore
//! assembled from norm histograms of the integer box `‖(μ,ν)‖_∞ ≤ R`, with an
//! explicit bound for everything outside the box.

mod spectrum;

use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::algebra::{DualLatticeVector, PseudoHTypeAlgebra};
use crate::error::{Error, Result};
use crate::lattice::{norm_histogram, theta_truncated, LatticeTheta};
use crate::numeric::{Accumulate, Precision, Real, DD};

pub use spectrum::{
    spectrum_cutoff_for, spectrum_s0, trace_from_spectrum, Multiplicity, SpectralSeries, SpectrumEntry,
    SpectrumTable,
};

/// Which lattice the isotropic components sum over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelModel {
    /// `{(B(ν')ℓ, -D(μ')ℓ) : ℓ ∈ Z^N}`, the closed form with Gram `2‖μ'‖² Id`.
    #[default]
    Parametrized,
    /// Every integer solution of `Ω(n)ℓ = 0`. Contains the parametrized
    /// lattice, with finite index `> 1` once `‖μ'‖² > 1`.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    #[default]
    SubLaplacian,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceControls {
    /// Initial box radius `R` on `‖(μ,ν)‖_∞`.
    pub lattice_radius: u32,
    /// Largest radius the automatic increase may reach.
    pub radius_cap: u32,
    /// Cutoff on each coordinate of the `Z^N` kernel sums.
    pub theta_radius: u32,
    /// Requested absolute bound on the discarded dual vectors.
    pub tail_tolerance: f64,
    pub precision: Precision,
    pub kernel_model: KernelModel,
}

impl Default for TraceControls {
    fn default() -> Self {
        TraceControls {
            lattice_radius: 4,
            radius_cap: 400,
            theta_radius: 24,
            tail_tolerance: 1e-13,
            precision: Precision::Double,
            kernel_model: KernelModel::Parametrized,
        }
    }
}

impl TraceControls {
    pub fn validate(&self) -> Result<()> {
        if self.lattice_radius == 0 || self.theta_radius == 0 {
            return Err(Error::InvalidControls("radii must be positive".into()));
        }
        if self.radius_cap < self.lattice_radius {
            return Err(Error::InvalidControls("radius_cap below lattice_radius".into()));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance.is_finite()) {
            return Err(Error::InvalidControls("tail_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A trace value with its error budget. `tail_bound` is the sum of the
/// truncation bound and an allowance for floating-point rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEstimate<T = f64> {
    pub value: T,
    pub tail_bound: f64,
    pub truncation_bound: f64,
    pub rounding_bound: f64,
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatTraceSeries {
    pub operator: Operator,
    pub t_values: Vec<f64>,
    pub values: Vec<f64>,
    pub tail_bounds: Vec<f64>,
}

/// The data the component formulas depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Shape {
    pub r: usize,
    pub s: usize,
    pub n_half: usize,
}

impl Shape {
    pub fn of(alg: &PseudoHTypeAlgebra) -> Self {
        let sig = alg.signature();
        Shape {
            r: sig.r as usize,
            s: sig.s as usize,
            n_half: alg.n_half(),
        }
    }

    pub fn d(&self) -> usize {
        self.r + self.s
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTime(t))
    }
}

fn check_vector(alg: &PseudoHTypeAlgebra, n: &DualLatticeVector) -> Result<()> {
    let sig = alg.signature();
    if n.m.len() != sig.r as usize {
        return Err(Error::DimensionMismatch {
            expected: sig.r as usize,
            got: n.m.len(),
        });
    }
    if n.n.len() != sig.s as usize {
        return Err(Error::DimensionMismatch {
            expected: sig.s as usize,
            got: n.n.len(),
        });
    }
    Ok(())
}

/// `num / sinh x`, returning 0 where `sinh` would overflow.
fn over_sinh<T: Real>(num: T, x: T) -> T {
    if x.to_f64() > 700.0 {
        T::zero()
    } else {
        num / x.sinh()
    }
}

/// Closed-form component trace from `(‖μ‖², ‖ν‖², d₀)`, with the bound on
/// the truncated `Z^N` theta sum.
pub(crate) fn closed_component<T: Real>(
    shape: Shape,
    mu_sq: i64,
    nu_sq: i64,
    d0: i64,
    t: T,
    theta_radius: u32,
) -> (T, f64) {
    let n = shape.n_half;
    let pi = T::pi();
    let two = T::from_f64(2.0);
    if mu_sq == 0 && nu_sq == 0 {
        // (2πt)^{-N} Σ_{Z^{2N}} e^{-‖ℓ‖²/2t}
        let (th, dth) = theta_truncated(T::one() / (two * t), theta_radius);
        let pref = (two * pi * t).powi(-(n as i32));
        let v = pref * th.powi(2 * n as i32);
        let thf = th.to_f64();
        let bound = pref.to_f64() * 2.0 * n as f64 * dth * (thf + dth).powi(2 * n as i32 - 1);
        return (v, bound);
    }
    let a = T::from_i64(mu_sq).sqrt();
    if shape.s == 0 {
        // (‖n‖/sinh 2πt‖n‖)^N with ‖n‖ = 2‖μ‖
        let base = over_sinh(two * a, T::from_f64(4.0) * pi * t * a);
        return (base.powi(n as i32), 0.0);
    }
    if mu_sq == nu_sq {
        // (πt)^{-N/2} (2‖μ‖/sinh 8πt‖μ‖)^{N/2} Σ_{Z^N} e^{-‖μ‖²‖ℓ‖²/(d₀² t)}
        let c = T::from_i64(mu_sq / (d0 * d0));
        let (th, dth) = theta_truncated(c / t, theta_radius);
        let base = over_sinh(two * a, T::from_f64(8.0) * pi * t * a) / (pi * t);
        let pref = base.pow_half(n);
        let v = pref * th.powi(n as i32);
        let thf = th.to_f64();
        let bound = pref.to_f64() * n as f64 * dth * (thf + dth).powi(n as i32 - 1);
        return (v, bound);
    }
    // 2^N ((‖μ‖²-‖ν‖²)/(sinh 4πt(‖μ‖+‖ν‖) sinh 4πt(‖μ‖-‖ν‖)))^{N/2}
    let b = T::from_i64(nu_sq).sqrt();
    let diff = T::from_i64(mu_sq - nu_sq);
    let sum = a + b;
    let gap = diff / sum;
    let four_pi_t = T::from_f64(4.0) * pi * t;
    let x1 = four_pi_t * sum;
    let x2 = four_pi_t * gap;
    let ratio = if x1.to_f64() > 700.0 {
        T::zero()
    } else {
        over_sinh(diff / x1.sinh(), x2)
    };
    (T::from_f64(2.0).powi(n as i32) * ratio.pow_half(n), 0.0)
}

/// Component trace of `e^{-tD^(n)}` through the specialized formulas.
pub fn component_trace(alg: &PseudoHTypeAlgebra, n: &DualLatticeVector, t: f64) -> Result<f64> {
    check_t(t)?;
    check_vector(alg, n)?;
    let d0 = n.gcd().max(1);
    let (v, _) = closed_component(Shape::of(alg), n.mu_sq(), n.nu_sq(), d0, t, TraceControls::default().theta_radius);
    Ok(v)
}

/// Component trace evaluated directly from the general trace theorem:
/// `(2πt)^{-N} Σ_{ℓ∈M(n)} e^{-‖ℓ‖²/2t} · √det(Ω/sinh Ω)(2π√-1 t n)`, with the
/// determinant taken from the eigenvalues of `Ω` and the kernel sum from
/// enumeration of the chosen kernel lattice.
pub fn component_trace_general(
    alg: &PseudoHTypeAlgebra,
    n: &DualLatticeVector,
    t: f64,
    model: KernelModel,
) -> Result<f64> {
    check_t(t)?;
    check_vector(alg, n)?;
    let nh = alg.n_half();
    let pref = (2.0 * std::f64::consts::PI * t).powi(-(nh as i32));
    if n.is_zero() {
        let th: f64 = crate::numeric::theta1(1.0 / (2.0 * t));
        return Ok(pref * th.powi(2 * nh as i32));
    }
    let z: Vec<f64> = n
        .coeffs()
        .iter()
        .map(|&c| 2.0 * std::f64::consts::PI * t * 2.0 * c as f64)
        .collect();
    let mut det = 1.0f64;
    for (lambda, mult) in alg.omega_eigen(&z)? {
        det *= lambda.abs().x_over_sinh().pow_half(mult);
    }
    let kernel_sum = if alg.omega_rank(&n.coeffs()) == alg.dim_h {
        1.0
    } else {
        let basis = match model {
            KernelModel::Parametrized => alg.kernel_lattice_basis(n)?.basis,
            KernelModel::Saturated => alg.saturated_kernel(n),
        };
        let mut th = LatticeTheta::new(&basis);
        th.theta(t, 1e-18).0
    };
    Ok(pref * kernel_sum * det)
}

/// Component trace of the Laplacian: the sub-Laplacian component times
/// `e^{-2π²t‖n‖²}` with `‖n‖² = 4‖(μ,ν)‖²`.
pub fn laplacian_component_trace(alg: &PseudoHTypeAlgebra, n: &DualLatticeVector, t: f64) -> Result<f64> {
    let c = component_trace(alg, n, t)?;
    let norm = (n.mu_sq() + n.nu_sq()) as f64;
    Ok(c * (-8.0 * std::f64::consts::PI.powi(2) * t * norm).exp())
}

/// Möbius function by trial division.
fn moebius(mut k: u64) -> i64 {
    let mut out = 1i64;
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            k /= p;
            if k % p == 0 {
                return 0;
            }
            out = -out;
        }
        p += 1;
    }
    if k > 1 {
        out = -out;
    }
    out
}

/// Histograms of norms in the boxes of radius `R`, `⌊R/2⌋`, ...
struct BoxCounts {
    shape: Shape,
    radius: u32,
    cache: HashMap<u32, (Vec<u64>, Vec<u64>)>,
}

impl BoxCounts {
    fn new(shape: Shape, radius: u32) -> Self {
        BoxCounts {
            shape,
            radius,
            cache: HashMap::new(),
        }
    }

    fn at(&mut self, radius: u32) -> &(Vec<u64>, Vec<u64>) {
        let shape = self.shape;
        self.cache
            .entry(radius)
            .or_insert_with(|| (norm_histogram(shape.r, radius), norm_histogram(shape.s, radius)))
    }

    fn pairs(&mut self, a: i64, radius: u32) -> i128 {
        let (hr, hs) = self.at(radius);
        let a = a as usize;
        let x = hr.get(a).copied().unwrap_or(0);
        let y = hs.get(a).copied().unwrap_or(0);
        x as i128 * y as i128
    }

    /// Number of `(μ,ν)` in the box with `‖μ‖² = ‖ν‖² = a` and gcd exactly `h`.
    fn exact_gcd(&mut self, a: i64, h: i64) -> i128 {
        let mut total = 0i128;
        let mut k = 1i64;
        loop {
            let q = h * k;
            if q * q > a || q > self.radius as i64 {
                break;
            }
            if a % (q * q) == 0 {
                let mu = moebius(k as u64);
                if mu != 0 {
                    total += mu as i128 * self.pairs(a / (q * q), self.radius / q as u32);
                }
            }
            k += 1;
        }
        total
    }
}

/// Upper bound for all dual vectors with `‖(μ,ν)‖_∞ > radius`.
///
/// A vector on the shell `‖·‖_∞ = j` has `‖μ‖+‖ν‖ ≥ ‖(μ,ν)‖₂ ≥ j`, so its
/// component is at most `C·g(4πtj)^e` with `g(x) = x/sinh x`, and the shell
/// holds at most `2d(2j+1)^{d-1}` vectors. The shell terms are log-concave
/// in `j`, so after the first ratio `ρ < 1` the remainder is geometric.
pub(crate) fn outside_box_bound(shape: Shape, t: f64, radius: u32, operator: Operator) -> f64 {
    let d = shape.d() as i32;
    let n = shape.n_half;
    let pi = std::f64::consts::PI;
    let (lead, expo) = if shape.s == 0 {
        ((2.0 * pi * t).powi(-(n as i32)), n as f64)
    } else {
        let th: f64 = crate::numeric::theta1(1.0 / (2.0 * t));
        ((2.0 * pi * t).powi(-(n as i32)) * th.powi(2 * n as i32), n as f64 / 2.0)
    };
    let term = |j: f64| -> f64 {
        let x = 4.0 * pi * t * j;
        let g = if x > 700.0 {
            0.0
        } else {
            x / x.sinh()
        };
        let mut v = 2.0 * d as f64 * (2.0 * j + 1.0).powi(d - 1) * lead * g.powf(expo);
        if operator == Operator::Laplacian {
            v *= (-8.0 * pi * pi * t * j * j).exp();
        }
        v
    };
    let mut sum = 0.0;
    let mut j = radius as f64 + 1.0;
    loop {
        let tj = term(j);
        if tj == 0.0 {
            return sum;
        }
        let rho = term(j + 1.0) / tj;
        if rho < 0.5 {
            return sum + tj / (1.0 - rho);
        }
        sum += tj;
        j += 1.0;
        if j > 1e7 {
            return f64::INFINITY;
        }
    }
}

/// Shared state across the `t` values of a series: kernel lattices of the
/// isotropic directions, keyed by the primitive vector.
#[derive(Default)]
pub(crate) struct KernelCache {
    lattices: HashMap<Vec<i64>, LatticeTheta>,
}

impl KernelCache {
    fn theta<T: Accumulate>(&mut self, alg: &PseudoHTypeAlgebra, primitive: &[i64], t: T, tol: f64) -> (T, f64) {
        let th = self.lattices.entry(primitive.to_vec()).or_insert_with(|| {
            let v = DualLatticeVector::from_coeffs(alg.signature(), primitive);
            LatticeTheta::new(&alg.saturated_kernel(&v))
        });
        th.theta(t, tol)
    }
}

fn lift_factor<T: Real>(operator: Operator, t: T, norm: i64) -> T {
    match operator {
        Operator::SubLaplacian => T::one(),
        Operator::Laplacian => {
            let pi = T::pi();
            (-(T::from_f64(8.0) * pi * pi * t * T::from_i64(norm))).exp()
        }
    }
}

/// Smallest radius `≥ ctrl.lattice_radius` whose outside-box bound meets the
/// tolerance.
fn choose_radius(shape: Shape, t: f64, ctrl: &TraceControls, operator: Operator) -> Result<(u32, f64)> {
    let mut r = ctrl.lattice_radius;
    loop {
        let b = outside_box_bound(shape, t, r, operator);
        if b <= ctrl.tail_tolerance {
            return Ok((r, b));
        }
        if r >= ctrl.radius_cap {
            return Err(Error::TruncationCap {
                radius: r,
                bound: b,
                tolerance: ctrl.tail_tolerance,
            });
        }
        r = (r + 1).max(r + r / 8).min(ctrl.radius_cap);
    }
}

pub(crate) fn total_trace_generic<T: Accumulate>(
    alg: &PseudoHTypeAlgebra,
    t: f64,
    ctrl: &TraceControls,
    operator: Operator,
    cache: &mut KernelCache,
) -> Result<TraceEstimate<T>> {
    check_t(t)?;
    ctrl.validate()?;
    let shape = Shape::of(alg);
    let (radius, outside) = choose_radius(shape, t, ctrl, operator)?;
    let tt = T::from_f64(t);
    let mut acc = T::Acc::default();
    let mut theta_err = 0.0f64;
    let mut counts = BoxCounts::new(shape, radius);
    let (hr, hs) = counts.at(radius).clone();

    let add = |acc: &mut T::Acc, theta_err: &mut f64, count: i128, (v, e): (T, f64)| {
        if count != 0 {
            T::acc_add(acc, v * T::from_f64(count as f64));
            *theta_err += e * count as f64;
        }
    };

    // n = 0
    add(&mut acc, &mut theta_err, 1, closed_component(shape, 0, 0, 1, tt, ctrl.theta_radius));

    if shape.s == 0 {
        for (a, &c) in hr.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            let (v, e) = closed_component(shape, a as i64, 0, 1, tt, ctrl.theta_radius);
            add(&mut acc, &mut theta_err, c as i128, (v * lift_factor(operator, tt, a as i64), e));
        }
    } else {
        let nz_r: Vec<usize> = (0..hr.len()).filter(|&a| hr[a] > 0).collect();
        let nz_s: Vec<usize> = (0..hs.len()).filter(|&b| hs[b] > 0).collect();
        // ‖μ‖ ≠ ‖ν‖
        for &a in &nz_r {
            for &b in &nz_s {
                if a == b {
                    continue;
                }
                let c = hr[a] as i128 * hs[b] as i128;
                let (v, e) = closed_component(shape, a as i64, b as i64, 1, tt, ctrl.theta_radius);
                let lift = lift_factor(operator, tt, (a + b) as i64);
                add(&mut acc, &mut theta_err, c, (v * lift, e));
            }
        }
        // ‖μ‖ = ‖ν‖ ≠ 0
        match ctrl.kernel_model {
            KernelModel::Parametrized => {
                for &a in &nz_r {
                    if a == 0 || a >= hs.len() || hs[a] == 0 {
                        continue;
                    }
                    let a = a as i64;
                    let mut h = 1i64;
                    while h * h <= a {
                        if a % (h * h) == 0 {
                            let c = counts.exact_gcd(a, h);
                            let (v, e) = closed_component(shape, a, a, h, tt, ctrl.theta_radius);
                            let lift = lift_factor(operator, tt, 2 * a);
                            add(&mut acc, &mut theta_err, c, (v * lift, e));
                        }
                        h += 1;
                    }
                }
            }
            KernelModel::Saturated => {
                let err = saturated_isotropic(alg, shape, radius, tt, ctrl, operator, cache, &mut acc)?;
                theta_err += err;
            }
        }
    }
    let value = T::acc_value(&acc);
    let vf = value.to_f64().abs();
    let rounding = 32.0 * T::epsilon() * vf;
    let truncation = outside + theta_err;
    Ok(TraceEstimate {
        value,
        tail_bound: truncation + rounding,
        truncation_bound: truncation,
        rounding_bound: rounding,
        radius,
    })
}

/// Isotropic components one vector at a time, each with its own saturated
/// kernel lattice. Uses `n ↔ -n`, which leaves the kernel unchanged.
#[allow(clippy::too_many_arguments)]
fn saturated_isotropic<T: Accumulate>(
    alg: &PseudoHTypeAlgebra,
    shape: Shape,
    radius: u32,
    t: T,
    ctrl: &TraceControls,
    operator: Operator,
    cache: &mut KernelCache,
    acc: &mut T::Acc,
) -> Result<f64> {
    let by_norm = |dim: usize| -> HashMap<i64, Vec<Vec<i64>>> {
        let mut map: HashMap<i64, Vec<Vec<i64>>> = HashMap::new();
        let side = 2 * radius as i64 + 1;
        let total = (side as u64).pow(dim as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                v.push((rem % side as u64) as i64 - radius as i64);
                rem /= side as u64;
            }
            let q: i64 = v.iter().map(|x| x * x).sum();
            if q > 0 {
                map.entry(q).or_default().push(v);
            }
        }
        map
    };
    let mu_lists = by_norm(shape.r);
    let nu_lists = by_norm(shape.s);
    let mut norms: Vec<i64> = mu_lists.keys().copied().filter(|q| nu_lists.contains_key(q)).collect();
    norms.sort_unstable();
    let n = shape.n_half;
    let pi = T::pi();
    let mut err = 0.0;
    let theta_tol = T::epsilon() * 0.1;
    for a in norms {
        let af = T::from_i64(a).sqrt();
        let base = over_sinh(T::from_f64(2.0) * af, T::from_f64(8.0) * pi * t * af) / (pi * t);
        let pref = base.pow_half(n) * lift_factor(operator, t, 2 * a);
        for mu in &mu_lists[&a] {
            for nu in &nu_lists[&a] {
                // keep the representative whose first nonzero entry is positive
                let first = mu.iter().chain(nu).find(|&&x| x != 0).copied().unwrap_or(0);
                if first < 0 {
                    continue;
                }
                let coeffs: Vec<i64> = mu.iter().chain(nu).copied().collect();
                let g = coeffs.iter().fold(0i64, |g, x| g.gcd(x));
                let primitive: Vec<i64> = coeffs.iter().map(|x| x / g).collect();
                let (th, e) = cache.theta(alg, &primitive, t, theta_tol);
                T::acc_add(acc, T::from_f64(2.0) * pref * th);
                err += 2.0 * pref.to_f64() * e;
            }
        }
    }
    let _ = ctrl;
    Ok(err)
}

/// Heat trace of the sub-Laplacian, in the precision the controls select.
pub fn total_trace(alg: &PseudoHTypeAlgebra, t: f64, ctrl: &TraceControls) -> Result<TraceEstimate> {
    trace_dispatch(alg, t, ctrl, Operator::SubLaplacian, &mut KernelCache::default())
}

/// Heat trace of the Laplacian `Δ_sub - ½ Σ Z_k²`.
pub fn laplacian_total_trace(alg: &PseudoHTypeAlgebra, t: f64, ctrl: &TraceControls) -> Result<TraceEstimate> {
    trace_dispatch(alg, t, ctrl, Operator::Laplacian, &mut KernelCache::default())
}

/// Double-double evaluation regardless of `ctrl.precision`.
pub fn total_trace_extended(
    alg: &PseudoHTypeAlgebra,
    t: f64,
    ctrl: &TraceControls,
    operator: Operator,
) -> Result<TraceEstimate<DD>> {
    total_trace_generic::<DD>(alg, t, ctrl, operator, &mut KernelCache::default())
}

fn trace_dispatch(
    alg: &PseudoHTypeAlgebra,
    t: f64,
    ctrl: &TraceControls,
    operator: Operator,
    cache: &mut KernelCache,
) -> Result<TraceEstimate> {
    match ctrl.precision {
        Precision::Double => total_trace_generic::<f64>(alg, t, ctrl, operator, cache),
        Precision::Extended => {
            let e = total_trace_generic::<DD>(alg, t, ctrl, operator, cache)?;
            // rounding to double adds half an ulp
            let v = e.value.to_f64();
            let extra = f64::EPSILON * v.abs();
            Ok(TraceEstimate {
                value: v,
                tail_bound: e.tail_bound + extra,
                truncation_bound: e.truncation_bound,
                rounding_bound: e.rounding_bound + extra,
                radius: e.radius,
            })
        }
    }
}

/// Traces at several times; kernel lattices are shared across the series.
pub fn trace_series(
    alg: &PseudoHTypeAlgebra,
    t_values: &[f64],
    ctrl: &TraceControls,
    operator: Operator,
) -> Result<HeatTraceSeries> {
    let mut ts = t_values.to_vec();
    ts.sort_by(|a, b| a.total_cmp(b));
    let mut cache = KernelCache::default();
    let mut values = Vec::with_capacity(ts.len());
    let mut bounds = Vec::with_capacity(ts.len());
    for &t in &ts {
        let e = trace_dispatch(alg, t, ctrl, operator, &mut cache)?;
        values.push(e.value);
        bounds.push(e.tail_bound);
    }
    Ok(HeatTraceSeries {
        operator,
        t_values: ts,
        values,
        tail_bounds: bounds,
    })
}

/// Whether the components of `k` copies of a minimal module are the `k`-th
/// powers of the minimal components, to relative `1e-10`.
pub fn multiple_module_power_check(
    alg_k: &PseudoHTypeAlgebra,
    alg_min: &PseudoHTypeAlgebra,
    n: &DualLatticeVector,
    t: f64,
) -> Result<bool> {
    if alg_k.signature() != alg_min.signature() {
        return Err(Error::InvalidSpec("signatures differ".into()));
    }
    if alg_k.dim_h % alg_min.dim_h != 0 {
        return Err(Error::InvalidSpec("module is not a multiple of the minimal one".into()));
    }
    let k = (alg_k.dim_h / alg_min.dim_h) as i32;
    let big = component_trace(alg_k, n, t)?;
    let small = component_trace(alg_min, n, t)?.powi(k);
    let scale = big.abs().max(small.abs());
    Ok(scale == 0.0 || (big - small).abs() <= 1e-10 * scale)
}

#[cfg(test)]
mod tests;
