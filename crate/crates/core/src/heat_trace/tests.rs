use super::*;
use crate::clifford::{build_minimal_module, build_module, MinimalVariant, ModuleSpec, Signature};
use crate::numeric::theta1;
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn alg(r: u32, s: u32) -> PseudoHTypeAlgebra {
    let sig = Signature::new(r, s);
    PseudoHTypeAlgebra::new(build_minimal_module(sig, MinimalVariant::standard(sig)).unwrap()).unwrap()
}

fn copies(r: u32, s: u32, k: usize) -> PseudoHTypeAlgebra {
    PseudoHTypeAlgebra::new(build_module(&ModuleSpec::copies(Signature::new(r, s), k)).unwrap()).unwrap()
}

fn dv(m: &[i64], n: &[i64]) -> DualLatticeVector {
    DualLatticeVector::new(m.to_vec(), n.to_vec())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// √det(Ω/sinh Ω) at `2π√-1 t n` from the singular values of the dense Ω.
fn det_factor_dense(a: &PseudoHTypeAlgebra, n: &DualLatticeVector, t: f64) -> f64 {
    let z: Vec<f64> = n.coeffs().iter().map(|&c| 4.0 * PI * t * c as f64).collect();
    let om = a.omega_f64(&z);
    let k = om.len();
    let m = DMatrix::from_fn(k, k, |i, j| om[i][j]);
    let sq = m.transpose() * &m;
    sq.symmetric_eigenvalues()
        .iter()
        .map(|&e| {
            let x = e.max(0.0).sqrt();
            if x < 1e-12 {
                1.0
            } else {
                (x / x.sinh()).sqrt()
            }
        })
        .product()
}

#[test]
fn heisenberg_component_example() {
    let h = alg(1, 0);
    let v = component_trace(&h, &dv(&[1], &[]), 0.1).unwrap();
    assert!(rel(v, 2.0 / (0.4 * PI).sinh()) < 1e-15);
}

#[test]
fn split_component_example() {
    let a = alg(1, 1);
    let v = component_trace(&a, &dv(&[1], &[0]), 0.2).unwrap();
    assert!(rel(v, 4.0 / (0.8 * PI).sinh().powi(2)) < 1e-14);
}

#[test]
fn components_are_even_in_n() {
    for a in [alg(1, 1), alg(3, 1), alg(1, 3), alg(2, 0)] {
        let sig = a.signature();
        let d = sig.d();
        for seed in 0..20i64 {
            let c: Vec<i64> = (0..d as i64).map(|i| ((seed * 7 + i * 3) % 5) - 2).collect();
            let v = DualLatticeVector::from_coeffs(sig, &c);
            let p = component_trace(&a, &v, 0.3).unwrap();
            let q = component_trace(&a, &v.neg(), 0.3).unwrap();
            assert_eq!(p, q);
        }
    }
}

#[test]
fn determinant_factor_matches_dense_oracle() {
    for a in [alg(1, 1), alg(3, 1), alg(1, 3), alg(3, 0)] {
        let sig = a.signature();
        for c in [[1i64, 2, 0, 1], [2, 1, 1, 0], [1, 1, 1, 1], [0, 0, 0, 3]] {
            let v = DualLatticeVector::from_coeffs(sig, &c[..sig.d()]);
            if v.is_zero() {
                continue;
            }
            let t = 0.05;
            let z: Vec<f64> = v.coeffs().iter().map(|&x| 4.0 * PI * t * x as f64).collect();
            let mut w = 1.0;
            for (l, m) in a.omega_eigen(&z).unwrap() {
                w *= l.abs().x_over_sinh().pow_half(m);
            }
            let dense = det_factor_dense(&a, &v, t);
            assert!(rel(w, dense) < 1e-12, "{sig} {c:?}: {w} vs {dense}");
        }
    }
}

#[test]
fn closed_forms_agree_with_general_theorem() {
    let algs = [alg(1, 1), alg(1, 3), alg(3, 1), alg(3, 0), alg(1, 0), copies(1, 1, 2)];
    for a in &algs {
        let sig = a.signature();
        let d = sig.d();
        let box_pts: Vec<Vec<i64>> = (0..5i64.pow(d as u32))
            .map(|mut i| {
                (0..d)
                    .map(|_| {
                        let x = i % 5 - 2;
                        i /= 5;
                        x
                    })
                    .collect()
            })
            .collect();
        for c in box_pts.iter().take(40) {
            let v = DualLatticeVector::from_coeffs(sig, c);
            for &t in &[0.07, 0.4, 1.3] {
                let closed = component_trace(a, &v, t).unwrap();
                let general = component_trace_general(a, &v, t, KernelModel::Parametrized).unwrap();
                assert!(rel(closed, general) < 1e-12, "{sig} {c:?} t={t}: {closed} vs {general}");
            }
        }
    }
}

#[test]
fn saturated_kernel_matches_closed_form_when_primitive_norm_is_one() {
    let a = alg(1, 3);
    for c in [[1i64, 1, 0, 0], [1, 0, 0, -1], [2, 0, 2, 0], [-1, 0, 1, 0]] {
        let v = DualLatticeVector::from_coeffs(a.signature(), &c);
        for &t in &[0.1, 0.9] {
            let closed = component_trace(&a, &v, t).unwrap();
            let sat = component_trace_general(&a, &v, t, KernelModel::Saturated).unwrap();
            assert!(rel(closed, sat) < 1e-12);
        }
    }
}

#[test]
fn saturated_kernel_exceeds_closed_form_at_index_greater_than_one() {
    // ‖μ'‖² = 9: the saturated kernel has vectors shorter than the
    // parametrized minimum 2·9
    let a = alg(1, 3);
    let v = DualLatticeVector::from_coeffs(a.signature(), &[3, 2, 2, 1]);
    let closed = component_trace(&a, &v, 1.0).unwrap();
    let sat = component_trace_general(&a, &v, 1.0, KernelModel::Saturated).unwrap();
    assert!(sat > closed * (1.0 + 1e-6));
}

#[test]
fn poisson_identity_at_zero() {
    for a in [alg(1, 0), alg(1, 1), alg(3, 1)] {
        let n = a.n_half();
        for &t in &[0.05, 0.1, 0.5, 1.0, 5.0] {
            let lhs = component_trace(&a, &DualLatticeVector::zero(a.signature()), t).unwrap();
            // Σ_{l∈Z^{2N}} e^{-2π²t‖l‖²}, summed directly
            let mut one = 0.0;
            for k in -60i64..=60 {
                one += (-2.0 * PI * PI * t * (k * k) as f64).exp();
            }
            let rhs = one.powi(2 * n as i32);
            assert!(rel(lhs, rhs) < 1e-12, "t={t}");
        }
    }
}

fn fixed_radius(r: u32) -> TraceControls {
    TraceControls {
        lattice_radius: r,
        radius_cap: r,
        tail_tolerance: 1e300,
        ..TraceControls::default()
    }
}

#[test]
fn histogram_total_matches_brute_force_box() {
    for (a, r) in [(alg(1, 1), 6u32), (alg(1, 3), 3), (alg(2, 0), 4), (copies(1, 1, 2), 4)] {
        let sig = a.signature();
        let d = sig.d();
        let side = 2 * r as i64 + 1;
        for &t in &[0.15, 0.6] {
            let mut brute = 0.0;
            for mut i in 0..side.pow(d as u32) {
                let c: Vec<i64> = (0..d)
                    .map(|_| {
                        let x = i % side - r as i64;
                        i /= side;
                        x
                    })
                    .collect();
                brute += component_trace(&a, &DualLatticeVector::from_coeffs(sig, &c), t).unwrap();
            }
            let h = total_trace(&a, t, &fixed_radius(r)).unwrap();
            assert!(rel(h.value, brute) < 1e-13, "{sig} t={t}");
        }
    }
}

#[test]
fn outside_box_bound_covers_the_radius_doubling() {
    for a in [alg(1, 1), alg(3, 1), alg(1, 0)] {
        for &t in &[0.1, 0.5] {
            for &r in &[2u32, 4] {
                let small = total_trace(&a, t, &fixed_radius(r)).unwrap();
                let big = total_trace(&a, t, &fixed_radius(4 * r)).unwrap();
                assert!(big.value >= small.value);
                assert!(big.value - small.value <= small.tail_bound, "{} t={t} r={r}", a.signature());
            }
        }
    }
}

#[test]
fn automatic_radius_meets_tolerance() {
    let a = alg(1, 3);
    let e = total_trace(&a, 0.1, &TraceControls::default()).unwrap();
    assert!(e.truncation_bound <= 1e-13);
    let tight = TraceControls {
        tail_tolerance: 1e-300,
        radius_cap: 8,
        ..TraceControls::default()
    };
    assert!(matches!(total_trace(&a, 0.1, &tight), Err(Error::TruncationCap { .. })));
}

#[test]
fn total_dominates_zero_component() {
    for a in [alg(1, 0), alg(1, 1), alg(3, 0)] {
        for &t in &[0.1, 1.0] {
            let tot = total_trace(&a, t, &TraceControls::default()).unwrap().value;
            let zero = component_trace(&a, &DualLatticeVector::zero(a.signature()), t).unwrap();
            assert!(tot >= zero);
        }
    }
}

#[test]
fn laplacian_trace_is_smaller() {
    let h = alg(1, 0);
    for &t in &[0.05, 0.3, 1.0] {
        let s = total_trace(&h, t, &TraceControls::default()).unwrap().value;
        let l = laplacian_total_trace(&h, t, &TraceControls::default()).unwrap().value;
        assert!(l < s);
    }
}

#[test]
fn swapped_signatures_have_equal_traces() {
    let (a, b) = (alg(1, 3), alg(3, 1));
    for model in [KernelModel::Parametrized, KernelModel::Saturated] {
        let ctrl = TraceControls {
            kernel_model: model,
            ..TraceControls::default()
        };
        for &t in &[0.2, 0.5, 1.0] {
            let x = total_trace(&a, t, &ctrl).unwrap().value;
            let y = total_trace(&b, t, &ctrl).unwrap().value;
            assert!(rel(x, y) < 1e-12, "{model:?} t={t}: {x} vs {y}");
        }
    }
}

#[test]
fn extended_precision_agrees_with_double() {
    let a = alg(3, 1);
    let ctrl = TraceControls::default();
    let d = total_trace(&a, 0.3, &ctrl).unwrap();
    let e = total_trace_extended(&a, 0.3, &ctrl, Operator::SubLaplacian).unwrap();
    assert!(rel(d.value, e.value.to_f64()) < 1e-14);
}

#[test]
fn power_law_for_two_copies() {
    let (min, two) = (alg(3, 1), copies(3, 1, 2));
    for (c, t) in [([1i64, 0, 0, 0], 0.3), ([0, 0, 0, 0], 0.3), ([1, 1, 0, 1], 0.2), ([2, 0, 1, 1], 0.7)] {
        let v = DualLatticeVector::from_coeffs(min.signature(), &c);
        assert!(multiple_module_power_check(&two, &min, &v, t).unwrap());
        assert!(multiple_module_power_check(&min, &min, &v, t).unwrap());
    }
}

#[test]
fn heisenberg_spectrum_heads() {
    let h = alg(1, 0);
    let table = spectrum_s0(&h, 40.0).unwrap();
    let first_beta = table.entries.iter().find(|e| e.series == SpectralSeries::Beta).unwrap();
    assert!((first_beta.eigenvalue - 4.0 * PI).abs() < 1e-13);
    assert_eq!(first_beta.multiplicity, Multiplicity::integer(8));
    let l: Vec<_> = table.entries.iter().filter(|e| e.series == SpectralSeries::Lambda).collect();
    assert_eq!(l[0].eigenvalue, 0.0);
    assert_eq!(l[0].multiplicity, Multiplicity::integer(1));
    assert!((l[1].eigenvalue - 2.0 * PI * PI).abs() < 1e-13);
    assert_eq!(l[1].multiplicity, Multiplicity::integer(4));
}

#[test]
fn beta_series_expands_the_component() {
    // 2/sinh(4πt) = Σ_m 4 e^{-4πt(2m+1)}
    let t = 0.13;
    let mut s = 0.0;
    for m in 0..200 {
        s += 4.0 * (-4.0 * PI * t * (2 * m + 1) as f64).exp();
    }
    assert!(rel(s, 2.0 / (4.0 * PI * t).sinh()) < 1e-14);
}

#[test]
fn spectrum_reproduces_trace() {
    for a in [alg(1, 0), copies(1, 0, 2)] {
        for &t in &[0.05, 0.3, 1.0] {
            let cutoff = spectrum_cutoff_for(&a, t, 1e-14).unwrap();
            let table = spectrum_s0(&a, cutoff).unwrap();
            let (v, b) = trace_from_spectrum(&table, t).unwrap();
            let tot = total_trace(&a, t, &TraceControls::default()).unwrap();
            assert!((v - tot.value).abs() <= b + tot.tail_bound, "t={t}: {v} vs {}", tot.value);
        }
    }
}

#[test]
fn spectrum_rejects_indefinite() {
    assert!(spectrum_s0(&alg(1, 1), 10.0).is_err());
}

#[test]
fn theta_helper_consistent() {
    let v: f64 = theta1(2.0);
    assert!(v > 1.0);
}
