//! Exit criteria. Runs every criterion, prints one line each, and exits
//! non-zero if any fails. Built with `harness = false` so the lines show
//! under a plain `cargo test`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use htype_core::algebra::{DualLatticeVector, PseudoHTypeAlgebra};
use htype_core::asymptotics::{
    heisenberg_match, leading_coefficient_for_shape, leading_coefficient_quadrature, leading_coefficient_zeta,
    probe_against_match, ManifoldShape, ProbeReport, ProbeVerdict, VolumeConvention,
};
use htype_core::clifford::{build_module, verify_module_axioms, ModuleSpec, Signature};
use htype_core::exact::IntPoly;
use htype_core::heat_trace::{
    component_trace, component_trace_general, laplacian_total_trace, multiple_module_power_check,
    spectrum_cutoff_for, spectrum_s0, total_trace, trace_from_spectrum, KernelModel, SpectralSeries,
    TraceControls,
};
use htype_core::isospectral::{generate_isospectral_family, minimal_pair_table, ModuleRelation, PairRelation};

struct Outcome {
    pass: bool,
    detail: String,
    info: Vec<String>,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
        info: Vec::new(),
    }
}

fn alg_of(spec: &ModuleSpec) -> PseudoHTypeAlgebra {
    PseudoHTypeAlgebra::new(build_module(spec).unwrap()).unwrap()
}

fn minimal(r: u32, s: u32) -> PseudoHTypeAlgebra {
    alg_of(&ModuleSpec::minimal(Signature::new(r, s)))
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// `1 ≤ r + s ≤ 8` plus four signatures beyond the stored table.
fn signature_set() -> Vec<Signature> {
    let mut v = Vec::new();
    for d in 1..=8u32 {
        for r in 0..=d {
            v.push(Signature::new(r, d - r));
        }
    }
    v.extend([(9, 1), (1, 9), (5, 5), (11, 1)].map(|(r, s)| Signature::new(r, s)));
    v
}

// Minimal admissible dimensions, rows s = 0..8, columns r = 0..8; 0 where
// the value comes from periodicity.
const MIN_DIMS: [[u64; 9]; 9] = [
    [1, 2, 4, 4, 8, 8, 8, 8, 16],
    [2, 4, 8, 8, 16, 16, 16, 16, 0],
    [4, 4, 8, 8, 16, 16, 32, 32, 0],
    [8, 8, 8, 8, 16, 32, 64, 64, 0],
    [8, 8, 8, 8, 16, 0, 0, 0, 0],
    [16, 16, 16, 16, 0, 0, 0, 0, 0],
    [16, 16, 32, 32, 0, 0, 0, 0, 0],
    [16, 32, 64, 64, 0, 0, 0, 0, 0],
    [16, 0, 0, 0, 0, 0, 0, 0, 0],
];

fn expected_min_dim(r: u32, s: u32) -> u64 {
    if r <= 8 && s <= 8 && MIN_DIMS[s as usize][r as usize] != 0 {
        return MIN_DIMS[s as usize][r as usize];
    }
    16 * if r >= 4 && s >= 4 {
        expected_min_dim(r - 4, s - 4)
    } else if r >= 8 {
        expected_min_dim(r - 8, s)
    } else {
        expected_min_dim(r, s - 8)
    }
}

fn clifford_axioms() -> Outcome {
    let mut bad = Vec::new();
    let sigs = signature_set();
    for &sig in &sigs {
        let m = build_module(&ModuleSpec::minimal(sig)).unwrap();
        let rep = verify_module_axioms(&m);
        let want = expected_min_dim(sig.r, sig.s);
        if !rep.all_pass() || m.dim_v as u64 != want {
            bad.push(format!("{sig}: axioms {} dim {} (want {want})", rep.all_pass(), m.dim_v));
        }
    }
    outcome(bad.is_empty(), format!("{} signatures checked; failures {bad:?}", sigs.len()))
}

fn structure_constants() -> Outcome {
    let mut bad = Vec::new();
    for sig in signature_set() {
        let a = minimal(sig.r, sig.s);
        let d = sig.d();
        let omegas: Vec<Vec<Vec<i64>>> = (0..d)
            .map(|k| {
                let mut e = vec![0i64; d];
                e[k] = 1;
                a.omega_i64(&e)
            })
            .collect();
        let n = a.dim_h;
        let mut ok = true;
        for i in 0..n {
            for j in 0..n {
                let nz: Vec<i64> = omegas.iter().map(|w| w[i][j]).filter(|&x| x != 0).collect();
                ok &= nz.len() <= 1 && nz.iter().all(|x| x.abs() == 1);
                ok &= omegas.iter().all(|w| w[i][j] == -w[j][i]);
            }
        }
        let sparse = a.sparse_constants();
        ok &= sparse.iter().all(|c| omegas[c.k][c.i][c.j] == c.sign as i64);
        if !ok {
            bad.push(sig.to_string());
        }
    }
    outcome(bad.is_empty(), format!("entries in {{0,±1}}, skew, one k per pair; failures {bad:?}"))
}

fn random_center(rng: &mut ChaCha8Rng, d: usize) -> Vec<i64> {
    loop {
        let z: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        if z.iter().any(|&x| x != 0) {
            return z;
        }
    }
}

fn characteristic_polynomial() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    let mut count = 0;
    for sig in signature_set() {
        let a = minimal(sig.r, sig.s);
        let r = sig.r as usize;
        let n = a.n_half() as u32;
        for _ in 0..100 {
            let z = random_center(&mut rng, sig.d());
            let mu: i64 = z[..r].iter().map(|x| x * x).sum();
            let nu: i64 = z[r..].iter().map(|x| x * x).sum();
            let expected = if sig.s == 0 {
                IntPoly::from_i64(&[mu, 0, 1]).pow(2 * n)
            } else {
                let q = IntPoly::from_i64(&[mu + nu, 0, 1]);
                let sq = &q * &q;
                let cross = IntPoly::constant(BigInt::from(4 * mu * nu));
                (&sq - &cross).pow(n)
            };
            count += 1;
            if a.char_poly_squared(&z) != expected {
                bad.push(format!("{sig} z={z:?}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{count} exact comparisons; failures {bad:?}"))
}

/// Random `z` with `‖μ‖ = ‖ν‖`, found by rejection in a small box.
fn isotropic_center(rng: &mut ChaCha8Rng, r: usize, s: usize) -> Vec<i64> {
    loop {
        let z = random_center(rng, r + s);
        let mu: i64 = z[..r].iter().map(|x| x * x).sum();
        let nu: i64 = z[r..].iter().map(|x| x * x).sum();
        if mu == nu {
            return z;
        }
    }
}

fn kernel_dimension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    let (mut iso, mut total) = (0, 0);
    for sig in signature_set() {
        let a = minimal(sig.r, sig.s);
        let (r, s) = (sig.r as usize, sig.s as usize);
        let mut zs: Vec<Vec<i64>> = (0..20).map(|_| random_center(&mut rng, r + s)).collect();
        if r > 0 && s > 0 {
            zs.extend((0..10).map(|_| isotropic_center(&mut rng, r, s)));
        }
        for z in zs {
            let mu: i64 = z[..r].iter().map(|x| x * x).sum();
            let nu: i64 = z[r..].iter().map(|x| x * x).sum();
            let isotropic = mu == nu;
            let want = if isotropic { a.dim_h - a.n_half() } else { a.dim_h };
            iso += isotropic as usize;
            total += 1;
            if a.omega_rank(&z) != want {
                bad.push(format!("{sig} z={z:?}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{total} ranks ({iso} isotropic); failures {bad:?}"))
}

fn box_vectors(sig: Signature, radius: i64) -> Vec<DualLatticeVector> {
    let d = sig.d();
    let w = 2 * radius + 1;
    (0..w.pow(d as u32))
        .map(|mut i| {
            let c: Vec<i64> = (0..d)
                .map(|_| {
                    let x = i % w - radius;
                    i /= w;
                    x
                })
                .collect();
            DualLatticeVector::from_coeffs(sig, &c)
        })
        .collect()
}

/// `‖μ'‖²` for isotropic `n`, where `μ' = μ / gcd(n)`.
fn primitive_norm(v: &DualLatticeVector) -> i64 {
    let g = v.gcd().max(1);
    v.mu_sq() / (g * g)
}

fn trace_formula_consistency() -> Outcome {
    let algs = [
        minimal(1, 1),
        minimal(1, 3),
        minimal(3, 1),
        minimal(3, 0),
        minimal(1, 0),
        alg_of(&ModuleSpec::copies(Signature::new(1, 1), 2)),
    ];
    let ts = [0.07, 0.4, 1.3];
    let mut lines = Vec::new();
    let mut info = Vec::new();
    let mut pass = true;
    for a in &algs {
        let sig = a.signature();
        let (mut pairs, mut fails, mut param_fails) = (0, 0, 0);
        let mut fail_norms = std::collections::BTreeSet::new();
        for (i, v) in box_vectors(sig, 3).iter().enumerate() {
            let t = ts[i % ts.len()];
            let closed = component_trace(a, v, t).unwrap();
            let general = component_trace_general(a, v, t, KernelModel::Saturated).unwrap();
            let param = component_trace_general(a, v, t, KernelModel::Parametrized).unwrap();
            pairs += 1;
            if rel(closed, general) > 1e-12 {
                fails += 1;
                fail_norms.insert(primitive_norm(v));
            }
            if rel(closed, param) > 1e-12 {
                param_fails += 1;
            }
        }
        pass &= pairs >= 50 && fails == 0;
        lines.push(format!("{sig}: {fails}/{pairs}"));
        if fails > 0 {
            info.push(format!(
                "{sig}: disagreements only at isotropic n with primitive norm ‖μ'‖² ∈ {fail_norms:?}, \
                 where the integer kernel of Ω(n) strictly contains the parametrized lattice"
            ));
        }
        info.push(format!("{sig}: parametrized kernel model disagrees at {param_fails}/{pairs}"));
    }
    Outcome {
        pass,
        detail: format!("closed form vs general theorem over the full integer kernel, ‖n‖∞ ≤ 3: {}", lines.join(", ")),
        info,
    }
}

fn theta_direct(a: f64) -> f64 {
    let mut s = 0.0;
    for k in (1..=2000i64).rev() {
        s += (-a * (k * k) as f64).exp();
    }
    1.0 + 2.0 * s
}

fn poisson_at_zero() -> Outcome {
    let mut worst = 0.0f64;
    for a in [minimal(1, 0), minimal(1, 1), minimal(3, 1)] {
        let n = a.n_half() as i32;
        for t in [0.05, 0.1, 0.5, 1.0, 5.0] {
            // (2πt)^{-1/2} Σ e^{-k²/2t} = Σ e^{-2π²tk²}
            let lhs = (2.0 * PI * t).powf(-0.5) * theta_direct(1.0 / (2.0 * t));
            let rhs = theta_direct(2.0 * PI * PI * t);
            let comp = component_trace(&a, &DualLatticeVector::zero(a.signature()), t).unwrap();
            worst = worst.max(rel(lhs, rhs)).max(rel(comp, rhs.powi(2 * n)));
        }
    }
    outcome(worst <= 1e-12, format!("max relative difference {worst:e}"))
}

fn spectral_oracle() -> Outcome {
    let ctrl = TraceControls::default();
    let ts: Vec<f64> = (0..10).map(|i| 0.05 * 20f64.powf(i as f64 / 9.0)).collect();
    let mut worst_ratio = 0.0f64;
    for a in [minimal(1, 0), minimal(2, 0)] {
        for &t in &ts {
            let cutoff = spectrum_cutoff_for(&a, t, 1e-14).unwrap();
            let table = spectrum_s0(&a, cutoff).unwrap();
            let (v, b) = trace_from_spectrum(&table, t).unwrap();
            let e = total_trace(&a, t, &ctrl).unwrap();
            worst_ratio = worst_ratio.max((v - e.value).abs() / (b + e.tail_bound));
        }
    }
    let h3 = minimal(1, 0);
    let table = spectrum_s0(&h3, 40.0).unwrap();
    let beta = table
        .entries
        .iter()
        .find(|e| e.series == SpectralSeries::Beta)
        .unwrap();
    let head_ok = (beta.eigenvalue - 4.0 * PI).abs() < 1e-12 && beta.multiplicity.is_integer() && beta.multiplicity.coeff == 8;
    outcome(
        worst_ratio <= 1.0 && head_ok,
        format!(
            "H3,H5 at 10 t: max |Δ|/(combined bound) = {worst_ratio:.3}; first β = {} mult {}",
            beta.eigenvalue, beta.multiplicity.coeff
        ),
    )
}

fn isospectral_pair() -> Outcome {
    let a = minimal(1, 3);
    let b = minimal(3, 1);
    let ts: Vec<f64> = (0..20).map(|i| 0.1 * 20f64.powf(i as f64 / 19.0)).collect();
    let mut worst = [0.0f64; 2];
    for (mi, model) in [KernelModel::Parametrized, KernelModel::Saturated].into_iter().enumerate() {
        let ctrl = TraceControls {
            kernel_model: model,
            ..TraceControls::default()
        };
        for &t in &ts {
            let s = rel(total_trace(&a, t, &ctrl).unwrap().value, total_trace(&b, t, &ctrl).unwrap().value);
            let l = rel(
                laplacian_total_trace(&a, t, &ctrl).unwrap().value,
                laplacian_total_trace(&b, t, &ctrl).unwrap().value,
            );
            worst[mi] = worst[mi].max(s).max(l);
        }
    }
    let dims = (a.manifold_dim(), b.manifold_dim());
    let entry = minimal_pair_table(3, 1).unwrap();
    outcome(
        worst.iter().all(|&w| w <= 1e-12) && dims == (12, 12) && entry.relation == PairRelation::NonIsomorphic,
        format!(
            "max rel. diff {:e} (parametrized), {:e} (saturated); dims {dims:?}; table {:?}",
            worst[0], worst[1], entry.relation
        ),
    )
}

fn families() -> Outcome {
    let ctrl = TraceControls::default();
    let f = generate_isospectral_family(Signature::new(3, 1), 2).unwrap();
    let dims: Vec<usize> = f.specs.iter().map(|s| s.dim().unwrap() + 4).collect();
    let non_iso = f.certificate.len() == 3 && f.certificate.iter().all(|c| c.modules == ModuleRelation::NonIsomorphic);
    let algs: Vec<PseudoHTypeAlgebra> = f.specs.iter().map(alg_of).collect();
    let mut worst = 0.0f64;
    for t in [0.2, 0.5, 1.0] {
        let v: Vec<f64> = algs.iter().map(|a| total_trace(a, t, &ctrl).unwrap().value).collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                worst = worst.max(rel(v[i], v[j]));
            }
        }
    }
    let g = generate_isospectral_family(Signature::new(3, 0), 1).unwrap();
    let pair_ok = g.specs.len() == 2 && g.manifold_dim == 11 && g.certified();
    outcome(
        f.specs.len() == 3 && non_iso && dims.iter().all(|&d| d == 36) && worst <= 1e-10 && pair_ok,
        format!(
            "(3,1),m=2: {} specs, dims {dims:?}, pairwise non-isomorphic {non_iso}, max rel. diff {worst:e}; \
             (3,0),m=1: {} specs of dimension {}",
            f.specs.len(),
            g.specs.len(),
            g.manifold_dim
        ),
    )
}

fn power_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    let samples = 10;
    for i in 0..samples {
        let (r, s) = if i % 2 == 0 { (1, 1) } else { (3, 1) };
        let sig = Signature::new(r, s);
        let small = minimal(r, s);
        let big = alg_of(&ModuleSpec::copies(sig, 2));
        let n = DualLatticeVector::from_coeffs(sig, &random_center(&mut rng, sig.d()));
        let t = rng.gen_range(0.05..1.5);
        ok += multiple_module_power_check(&big, &small, &n, t).unwrap() as usize;
    }
    outcome(ok == samples, format!("{ok}/{samples} samples agree to 1e-10"))
}

/// Composite Simpson on `[0, 40]` for `2∫_0^∞ τ/sinh τ dτ`.
fn x_over_sinh_integral() -> f64 {
    let m = 40_000;
    let h = 40.0 / m as f64;
    let f = |x: f64| if x == 0.0 { 1.0 } else { x / x.sinh() };
    let mut s = f(0.0) + f(40.0);
    for k in 1..m {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * s * h / 3.0
}

fn asymptotics() -> Outcome {
    let integral = x_over_sinh_integral();
    // ζ_1(2, ½) = Σ (m + ½)^{-2} with the integral tail 1/M
    let m = 200_000;
    let series: f64 = (0..m).rev().map(|k| 1.0 / (k as f64 + 0.5).powi(2)).sum::<f64>() + 1.0 / m as f64;
    let oracle_ok = (integral - PI * PI / 2.0).abs() < 1e-9 && (series - PI * PI / 2.0).abs() < 1e-9;
    // c_M = Vol (2π)^{-(N+d)} · π²/2 with N = d = 1
    let oracle = integral / (2.0 * PI).powi(2);
    let q = leading_coefficient_quadrature(&minimal(1, 0), VolumeConvention::Paper).unwrap();
    let z = leading_coefficient_zeta(1, 1, VolumeConvention::Paper).unwrap();
    let h3_ok = (q.value - 0.125).abs() < 1e-8 && (z.value - 0.125).abs() < 1e-8 && (oracle - 0.125).abs() < 1e-8;
    let mut worst = 0.0f64;
    for (n, d) in [(2usize, 1usize), (1, 2), (4, 1)] {
        let qc = leading_coefficient_for_shape(ManifoldShape { n_half: n, r: d, s: 0 }, VolumeConvention::Paper, 1e-11)
            .unwrap();
        let zc = leading_coefficient_zeta(n, d, VolumeConvention::Paper).unwrap();
        worst = worst.max((qc.value - zc.value).abs());
    }
    outcome(
        oracle_ok && h3_ok && worst < 1e-8,
        format!(
            "H3: quadrature {}, zeta {}, oracle {oracle}; max |quadrature − zeta| over (2,1),(1,2),(4,1) = {worst:e}",
            q.value, z.value
        ),
    )
}

fn log_spaced(hi: f64, lo: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| hi * (lo / hi).powf(i as f64 / (k - 1) as f64)).collect()
}

fn verdict_text(r: &ProbeReport) -> String {
    match &r.verdict {
        ProbeVerdict::SuperPolynomial { p } => format!("super-polynomial, all slopes ≥ {p}"),
        ProbeVerdict::Polynomial { slope } => format!("polynomial, slope {slope:.3}"),
        ProbeVerdict::Inconclusive { reason, noise_floor } => format!("inconclusive ({reason}); noise floor {noise_floor:e}"),
    }
}

fn heisenberg_match_probe() -> Outcome {
    let a = minimal(1, 3);
    let m = heisenberg_match(&a, VolumeConvention::Lebesgue).unwrap();
    let inv = rel(m.c_h_alpha(), m.c_m.value);
    let shape_ok = m.n == 7 && (m.manifold_dim, m.heisenberg_dim) == (12, 15);
    let ctrl = TraceControls {
        tail_tolerance: 1e-12,
        radius_cap: 2000,
        ..TraceControls::default()
    };
    let ts = log_spaced(0.2, 0.05, 12);
    let report = probe_against_match(&a, &m, &ts, &ctrl, 6.0).unwrap();
    let documented = match &report.verdict {
        ProbeVerdict::SuperPolynomial { .. } => true,
        ProbeVerdict::Inconclusive { reason, noise_floor } => {
            !reason.is_empty() && noise_floor.is_finite() && *noise_floor > 0.0 && report.points.iter().all(|p| p.above_floor)
        }
        ProbeVerdict::Polynomial { .. } => false,
    };
    let mut info = Vec::new();
    // the two leading exponentially small terms: the first theta corrections
    // of the n = 0 components of M and of H_α
    let predicted = |t: f64| {
        (16.0 * (2.0 * PI * t).powi(-4) * (-1.0 / (2.0 * t)).exp()
            - 28.0 * (m.alpha / (2.0 * PI * t)).powi(7) * (-m.alpha / (2.0 * t)).exp())
        .abs()
    };
    let p_last = report.points.last().unwrap();
    info.push(format!(
        "probe at t = {}: D = {:e}, prediction from the two leading theta corrections {:e}",
        p_last.t,
        p_last.difference,
        predicted(p_last.t)
    ));
    let slopes: Vec<String> = report.points.iter().filter_map(|p| p.slope).map(|s| format!("{s:.2}")).collect();
    info.push(format!("local slopes on [0.05, 0.2]: {}", slopes.join(" ")));

    let deep = TraceControls {
        tail_tolerance: 1e-11,
        radius_cap: 2000,
        ..TraceControls::default()
    };
    match probe_against_match(&a, &m, &log_spaced(0.05, 0.02, 8), &deep, 6.0) {
        Ok(r) => info.push(format!("supplementary window [0.02, 0.05]: {}", verdict_text(&r))),
        Err(e) => info.push(format!("supplementary window [0.02, 0.05]: {e}")),
    }
    let paper = heisenberg_match(&a, VolumeConvention::Paper).unwrap();
    match probe_against_match(&a, &paper, &ts, &ctrl, 6.0) {
        Ok(r) => info.push(format!(
            "unit-volume match (α = {:.6}) on [0.05, 0.2]: {}",
            paper.alpha,
            verdict_text(&r)
        )),
        Err(e) => info.push(format!("unit-volume match: {e}")),
    }
    Outcome {
        pass: inv <= 1e-8 && shape_ok && documented,
        detail: format!(
            "n = {}, dims ({}, {}), α = {:.10}, inversion rel. err {inv:e}; probe: {}",
            m.n,
            m.manifold_dim,
            m.heisenberg_dim,
            m.alpha,
            verdict_text(&report)
        ),
        info,
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Clifford axioms and minimal dimensions", clifford_axioms),
        ("structure constants", structure_constants),
        ("characteristic polynomial", characteristic_polynomial),
        ("kernel dimension", kernel_dimension),
        ("trace-formula consistency", trace_formula_consistency),
        ("Poisson identity at n = 0", poisson_at_zero),
        ("s = 0 spectral oracle", spectral_oracle),
        ("isospectral pair (1,3)/(3,1)", isospectral_pair),
        ("isospectral families", families),
        ("multiple-module power law", power_law),
        ("leading heat-trace coefficient", asymptotics),
        ("Heisenberg match and expansion probe", heisenberg_match_probe),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} [{secs:.1}s] {name}: {}", i + 1, out.detail);
        for line in &out.info {
            println!("             info: {line}");
        }
        if !out.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
