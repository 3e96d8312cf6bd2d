//! Short-time behaviour of the sub-Laplacian heat trace: the volume function
//! `W(τ)`, the leading coefficient `c_M` of `tr(e^{-tΔ}) ~ c_M t^{-(N+d)}`,
//! matching a manifold against a rescaled Heisenberg nilmanifold with the same
//! leading coefficient, and a numerical probe of the difference of traces.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::algebra::PseudoHTypeAlgebra;
use crate::clifford::{build_module, ModuleSpec, Signature};
use crate::error::{Error, Result};
use crate::heat_trace::{total_trace_extended, Operator, TraceControls};
use crate::numeric::quad::integrate;
use crate::numeric::zeta::multiple_hurwitz;
use crate::numeric::{sphere_area, Real, DD};

/// Normalization of `Vol(Γ\G)` in `c_M = Vol/(2π)^{N+d} ∫ W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeConvention {
    /// `Vol = 1` for the standard lattice.
    #[default]
    Paper,
    /// Lebesgue volume of the fundamental domain, `2^{-d}`: the centre
    /// lattice has half-integer coordinates. This is the normalization the
    /// heat traces computed here actually follow.
    Lebesgue,
}

impl VolumeConvention {
    pub fn volume(self, d: usize) -> f64 {
        match self {
            VolumeConvention::Paper => 1.0,
            VolumeConvention::Lebesgue => 0.5f64.powi(d as i32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMethod {
    Quadrature,
    ZetaClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingCoefficient {
    pub value: f64,
    pub method: CoefficientMethod,
    pub error_estimate: f64,
    pub convention: VolumeConvention,
    pub volume: f64,
}

/// What `W` and `c_M` depend on: `N = dim V / 2` and the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldShape {
    pub n_half: usize,
    pub r: usize,
    pub s: usize,
}

impl ManifoldShape {
    pub fn of(alg: &PseudoHTypeAlgebra) -> Self {
        let sig = alg.signature();
        ManifoldShape {
            n_half: alg.n_half(),
            r: sig.r as usize,
            s: sig.s as usize,
        }
    }

    /// The `(2n+1)`-dimensional Heisenberg algebra.
    pub fn heisenberg(n: usize) -> Self {
        ManifoldShape { n_half: n, r: 1, s: 0 }
    }

    pub fn d(&self) -> usize {
        self.r + self.s
    }

    pub fn manifold_dim(&self) -> usize {
        2 * self.n_half + self.d()
    }

    /// Power of `t^{-1}` in the leading term.
    pub fn order(&self) -> usize {
        self.n_half + self.d()
    }
}

fn g(x: f64) -> f64 {
    x.abs().x_over_sinh()
}

/// `W` as a function of `‖μ‖` and `‖ν‖`.
pub fn volume_function_norms(shape: ManifoldShape, mu: f64, nu: f64) -> f64 {
    let n = shape.n_half as f64;
    if shape.s == 0 || nu == 0.0 {
        g(mu).powf(n)
    } else if mu == 0.0 {
        g(nu).powf(n)
    } else {
        (g(mu + nu) * g(mu - nu)).powf(n / 2.0)
    }
}

/// `W(τ) = det(Ω(√-1τ)/sinh Ω(√-1τ))^{1/2}`; `W(0) = 1`.
pub fn volume_function(alg: &PseudoHTypeAlgebra, tau: &[f64]) -> Result<f64> {
    let sig = alg.signature();
    if tau.len() != sig.d() {
        return Err(Error::DimensionMismatch {
            expected: sig.d(),
            got: tau.len(),
        });
    }
    let r = sig.r as usize;
    let mu = tau[..r].iter().map(|x| x * x).sum::<f64>().sqrt();
    let nu = tau[r..].iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(volume_function_norms(ManifoldShape::of(alg), mu, nu))
}

// g(u) ≤ G_CONST·u·e^{-u} for u ≥ 1
const G_CONST: f64 = 2.0 / (1.0 - 0.135_335_283_236_612_7);

/// `∫_L^∞ u^{a-1} e^{-bu} du`.
fn upper_gamma_integral(a: f64, b: f64, l: f64) -> f64 {
    gamma_ur(a, b * l) * gamma(a) / b.powf(a)
}

/// Bound on the radial integral outside `[0, L]` (or `[0, L]²`).
fn radial_tail(shape: ManifoldShape, l: f64) -> f64 {
    let n = shape.n_half as f64;
    let (r, s) = (shape.r as f64, shape.s as f64);
    if shape.s == 0 {
        // ρ^{r-1} g(ρ)^N ≤ C^N ρ^{r+N-1} e^{-Nρ}
        G_CONST.powf(n) * upper_gamma_integral(r + n, n, l)
    } else {
        // outside the square u = ρ+σ ≥ L, W ≤ g(u)^{N/2}, and the slice
        // ρ+σ = u carries ∫ρ^{r-1}σ^{s-1} = B(r,s) u^{r+s-1}
        let b = n / 2.0;
        beta(r, s) * G_CONST.powf(b) * upper_gamma_integral(r + s + b, b, l)
    }
}

/// `∫_{R^d} W` reduced to an integral over `‖μ‖, ‖ν‖`, with an error
/// estimate covering quadrature and the cut at `L`.
fn integrate_w(shape: ManifoldShape, rel_tol: f64) -> Result<(f64, f64)> {
    if shape.n_half == 0 || shape.d() == 0 {
        return Err(Error::InvalidSpec("shape needs N ≥ 1 and d ≥ 1".into()));
    }
    let (r, s) = (shape.r, shape.s);
    let area = sphere_area(r) * if s > 0 { sphere_area(s) } else { 1.0 };
    let one_dim = |l: f64, abs_tol: f64| {
        integrate(
            |rho| rho.powi(r as i32 - 1) * volume_function_norms(shape, rho, 0.0),
            0.0,
            l,
            abs_tol,
            0.0,
            20_000,
        )
    };
    let two_dim = |l: f64, abs_tol: f64| {
        let inner_tol = abs_tol / (10.0 * l);
        let mut worst = 0.0f64;
        let mut ok = true;
        let outer = integrate(
            |rho| {
                let q = integrate(
                    |sigma| sigma.powi(s as i32 - 1) * volume_function_norms(shape, rho, sigma),
                    0.0,
                    l,
                    inner_tol,
                    0.0,
                    4_000,
                );
                worst = worst.max(q.error);
                ok &= q.converged;
                rho.powi(r as i32 - 1) * q.value
            },
            0.0,
            l,
            abs_tol * 0.5,
            0.0,
            4_000,
        );
        (outer, worst * l, ok)
    };

    // a coarse lower bound fixes the absolute target
    let lower = if s == 0 { one_dim(4.0, 1e-6).value } else { two_dim(4.0, 1e-5).0.value };
    let target = rel_tol * lower.abs();
    let mut l = 8.0;
    while radial_tail(shape, l) > 0.01 * target {
        l *= 1.25;
        if l > 1e4 {
            return Err(Error::Quadrature {
                tolerance: rel_tol,
                estimate: radial_tail(shape, l) / lower,
            });
        }
    }
    let tail = radial_tail(shape, l);
    let (value, err, converged) = if s == 0 {
        let q = one_dim(l, 0.5 * target);
        (q.value, q.error, q.converged)
    } else {
        let (q, inner, ok) = two_dim(l, 0.5 * target);
        (q.value, q.error + inner, q.converged && ok)
    };
    let total_err = err + tail;
    if !converged || total_err > target {
        return Err(Error::Quadrature {
            tolerance: rel_tol,
            estimate: total_err / value.abs(),
        });
    }
    Ok((area * value, area * total_err))
}

fn prefactor(shape: ManifoldShape, vol: f64) -> f64 {
    vol / (2.0 * std::f64::consts::PI).powi(shape.order() as i32)
}

/// `c_M` by quadrature of `W`, relative tolerance `rel_tol`.
pub fn leading_coefficient_for_shape(
    shape: ManifoldShape,
    convention: VolumeConvention,
    rel_tol: f64,
) -> Result<LeadingCoefficient> {
    let (w, err) = integrate_w(shape, rel_tol)?;
    let vol = convention.volume(shape.d());
    let p = prefactor(shape, vol);
    Ok(LeadingCoefficient {
        value: p * w,
        method: CoefficientMethod::Quadrature,
        error_estimate: p * err,
        convention,
        volume: vol,
    })
}

pub fn leading_coefficient_quadrature(
    alg: &PseudoHTypeAlgebra,
    convention: VolumeConvention,
) -> Result<LeadingCoefficient> {
    leading_coefficient_for_shape(ManifoldShape::of(alg), convention, 1e-11)
}

/// `c_M` for `s = 0` from
/// `c_M (2π)^{N+d} 2^{d-1} / Γ(N+d) = Vol · π^{d/2}/Γ(d/2) · ζ_N(N+d, N/2)`,
/// obtained by expanding `(x/sinh x)^N = 2^N x^N Σ_m C(m+N-1,N-1) e^{-(N+2m)x}`.
pub fn leading_coefficient_zeta(
    n_half: usize,
    d: usize,
    convention: VolumeConvention,
) -> Result<LeadingCoefficient> {
    if n_half == 0 || d == 0 {
        return Err(Error::InvalidSpec("zeta closed form needs N ≥ 1 and d ≥ 1".into()));
    }
    let k = n_half + d;
    let z = multiple_hurwitz(n_half, k as u32, n_half as i64, 2);
    let df = d as f64;
    let factor = std::f64::consts::PI.powf(df / 2.0) / gamma(df / 2.0) * gamma(k as f64)
        / (2.0 * std::f64::consts::PI).powi(k as i32)
        / 2f64.powi(d as i32 - 1);
    let vol = convention.volume(d);
    Ok(LeadingCoefficient {
        value: vol * factor * z.value,
        method: CoefficientMethod::ZetaClosedForm,
        error_estimate: vol * factor * z.error,
        convention,
        volume: vol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergMatch {
    /// The Heisenberg algebra has dimension `2n+1`, `n + 1 = N + d`.
    pub n: usize,
    /// Dilation factor of the lattice: `tr_{H_α}(t) = tr_{H_1}(t/α)`.
    pub alpha: f64,
    pub c_m: LeadingCoefficient,
    pub c_h1: LeadingCoefficient,
    pub manifold_dim: usize,
    pub heisenberg_dim: usize,
}

impl HeisenbergMatch {
    /// `c_{H_α} = α^{n+1} c_{H_1}`.
    pub fn c_h_alpha(&self) -> f64 {
        self.alpha.powi(self.n as i32 + 1) * self.c_h1.value
    }
}

/// The Heisenberg nilmanifold with the same leading coefficient as `alg`,
/// which has a different dimension whenever `d > 1`.
pub fn heisenberg_match(alg: &PseudoHTypeAlgebra, convention: VolumeConvention) -> Result<HeisenbergMatch> {
    heisenberg_match_shape(ManifoldShape::of(alg), convention)
}

pub fn heisenberg_match_shape(shape: ManifoldShape, convention: VolumeConvention) -> Result<HeisenbergMatch> {
    if shape.d() <= 1 {
        return Err(Error::InvalidSpec("the Heisenberg match needs a centre of dimension d > 1".into()));
    }
    let n = shape.order() - 1;
    let c_m = leading_coefficient_for_shape(shape, convention, 1e-11)?;
    let h = ManifoldShape::heisenberg(n);
    let c_h1 = leading_coefficient_for_shape(h, convention, 1e-11)?;
    let alpha = (c_m.value / c_h1.value).powf(1.0 / (n as f64 + 1.0));
    Ok(HeisenbergMatch {
        n,
        alpha,
        c_m,
        c_h1,
        manifold_dim: shape.manifold_dim(),
        heisenberg_dim: h.manifold_dim(),
    })
}

/// The `(2n+1)`-dimensional Heisenberg algebra on `n` copies of the
/// `(1,0)` minimal module.
pub fn heisenberg_algebra(n: usize) -> Result<PseudoHTypeAlgebra> {
    PseudoHTypeAlgebra::new(build_module(&ModuleSpec::copies(Signature::new(1, 0), n))?)
}

/// One trace value in extended precision with its certified bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub value: DD,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub t: f64,
    pub difference: f64,
    /// `d ln D / d ln t` between this point and the previous (larger) `t`.
    pub slope: Option<f64>,
    pub noise_floor: f64,
    pub above_floor: bool,
}

/// Least-squares fit `ln D ≈ ln C − a/t − p ln t` over the points above the
/// noise floor; `a > 0` indicates exponential decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub ln_c: f64,
    pub rate: f64,
    pub power: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    /// Every slope above the floor is at least `p`.
    SuperPolynomial { p: f64 },
    /// Slopes are nearly constant and below `p`: a power law.
    Polynomial { slope: f64 },
    Inconclusive { reason: String, noise_floor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub points: Vec<ProbePoint>,
    pub required_slope: f64,
    pub fit: Option<ExponentialFit>,
    pub verdict: ProbeVerdict,
}

fn fit_exponential(pts: &[(f64, f64)]) -> Option<ExponentialFit> {
    if pts.len() < 4 {
        return None;
    }
    let rows: Vec<[f64; 3]> = pts.iter().map(|&(t, _)| [1.0, -1.0 / t, -t.ln()]).collect();
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let b = nalgebra::DVector::from_iterator(pts.len(), pts.iter().map(|&(_, d)| d.ln()));
    let x = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    let res = &a * &x - &b;
    Some(ExponentialFit {
        ln_c: x[0],
        rate: x[1],
        power: x[2],
        max_residual: res.amax(),
    })
}

/// Compares two traces at decreasing `t` and classifies how
/// `D(t) = |tr_A − tr_B|` decays. The noise floor at each point is the sum
/// of both certified bounds plus the rounding of the subtraction.
pub fn expansion_difference_probe<A, B>(
    mut trace_a: A,
    mut trace_b: B,
    t_values: &[f64],
    required_slope: f64,
) -> Result<ProbeReport>
where
    A: FnMut(f64) -> Result<TraceSample>,
    B: FnMut(f64) -> Result<TraceSample>,
{
    if t_values.len() < 2 {
        return Err(Error::InvalidControls("the probe needs at least two t values".into()));
    }
    for w in t_values.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidControls("probe t values must be strictly decreasing".into()));
        }
    }
    if let Some(&t) = t_values.iter().find(|&&t| !(t > 0.0 && t <= 0.5)) {
        return Err(Error::InvalidControls(format!("probe t = {t} outside (0, 0.5]")));
    }
    let eps = <DD as Real>::epsilon();
    let mut points: Vec<ProbePoint> = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let a = trace_a(t)?;
        let b = trace_b(t)?;
        let diff = (a.value - b.value).abs().to_f64();
        let floor = a.bound + b.bound + 4.0 * eps * (a.value.abs().to_f64() + b.value.abs().to_f64());
        let above = diff > floor;
        let slope = match points.last() {
            Some(prev) if above && prev.above_floor => {
                Some((diff / prev.difference).ln() / (t / prev.t).ln())
            }
            _ => None,
        };
        points.push(ProbePoint {
            t,
            difference: diff,
            slope,
            noise_floor: floor,
            above_floor: above,
        });
    }

    let max_floor = points.iter().map(|p| p.noise_floor).fold(0.0, f64::max);
    let good: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.above_floor)
        .map(|p| (p.t, p.difference))
        .collect();
    let fit = fit_exponential(&good);
    let slopes: Vec<f64> = points.iter().filter_map(|p| p.slope).collect();

    let verdict = if points.iter().all(|p| p.difference == 0.0) {
        ProbeVerdict::Inconclusive {
            reason: "the two traces coincide exactly at every t".into(),
            noise_floor: max_floor,
        }
    } else if good.len() < points.len() {
        ProbeVerdict::Inconclusive {
            reason: format!(
                "{} of {} points are at or below the certified noise floor",
                points.len() - good.len(),
                points.len()
            ),
            noise_floor: max_floor,
        }
    } else if slopes.iter().all(|&s| s >= required_slope) {
        ProbeVerdict::SuperPolynomial { p: required_slope }
    } else {
        let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rising = slopes.windows(2).all(|w| w[1] >= w[0]);
        if hi - lo <= 1.0 {
            ProbeVerdict::Polynomial {
                slope: *slopes.last().expect("at least one slope"),
            }
        } else if rising {
            let rate = fit.map(|f| format!("; fitted rate a = {:.4} in e^{{-a/t}}", f.rate)).unwrap_or_default();
            ProbeVerdict::Inconclusive {
                reason: format!(
                    "local slope rises from {lo:.3} to {hi:.3} as t decreases, consistent with \
                     decay faster than any power, but not every slope reaches {required_slope}{rate}"
                ),
                noise_floor: max_floor,
            }
        } else {
            ProbeVerdict::Inconclusive {
                reason: format!("local slopes vary irregularly between {lo:.3} and {hi:.3}"),
                noise_floor: max_floor,
            }
        }
    };
    Ok(ProbeReport {
        points,
        required_slope,
        fit,
        verdict,
    })
}

/// Runs the probe for `alg` against its Heisenberg match, both in extended
/// precision. The match must use the Lebesgue convention for the leading
/// terms of the computed traces to cancel.
pub fn probe_against_match(
    alg: &PseudoHTypeAlgebra,
    m: &HeisenbergMatch,
    t_values: &[f64],
    ctrl: &TraceControls,
    required_slope: f64,
) -> Result<ProbeReport> {
    let h = heisenberg_algebra(m.n)?;
    let alpha = m.alpha;
    expansion_difference_probe(
        |t| {
            let e = total_trace_extended(alg, t, ctrl, Operator::SubLaplacian)?;
            Ok(TraceSample {
                value: e.value,
                bound: e.tail_bound,
            })
        },
        |t| {
            let e = total_trace_extended(&h, t / alpha, ctrl, Operator::SubLaplacian)?;
            Ok(TraceSample {
                value: e.value,
                bound: e.tail_bound,
            })
        },
        t_values,
        required_slope,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanValue {
    pub n_half: usize,
    pub d: usize,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityScan {
    pub k: usize,
    pub values: Vec<ScanValue>,
    /// Smallest `|v_i − v_j|` over pairs; `None` with a single pair.
    pub min_gap: Option<f64>,
    pub min_gap_pair: Option<((usize, usize), (usize, usize))>,
}

/// `(N, d) ↦ π^{d/2}/Γ(d/2) · ζ_N(k, N/2)` over `N + d = k`, `N, d ≥ 1`.
/// Evidence only: the values are computed, no injectivity is claimed.
pub fn injectivity_scan(k: usize) -> Result<InjectivityScan> {
    if k < 2 {
        return Err(Error::InvalidSpec("the scan needs k ≥ 2".into()));
    }
    let values: Vec<ScanValue> = (1..k)
        .map(|n| {
            let d = k - n;
            let z = multiple_hurwitz(n, k as u32, n as i64, 2);
            let df = d as f64;
            let f = std::f64::consts::PI.powf(df / 2.0) / gamma(df / 2.0);
            ScanValue {
                n_half: n,
                d,
                value: f * z.value,
                error: f * z.error,
            }
        })
        .collect();
    let mut min_gap: Option<f64> = None;
    let mut min_gap_pair = None;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let gap = (values[i].value - values[j].value).abs();
            if min_gap.map_or(true, |m| gap < m) {
                min_gap = Some(gap);
                min_gap_pair = Some(((values[i].n_half, values[i].d), (values[j].n_half, values[j].d)));
            }
        }
    }
    Ok(InjectivityScan {
        k,
        values,
        min_gap,
        min_gap_pair,
    })
}
