//! Explicit sub-Laplacian spectrum for `s = 0`.
//!
//! Two series: `λ = 2π²‖l‖²` over `l ∈ Z^{2N}` from the `n = 0` component, and
//! `β = 4π‖k‖(2m+N)` over `k ∈ Z^r \ {0}`, `m ≥ 0`, with multiplicity
//! `4^N ‖k‖^N C(m+N-1, N-1)`, from expanding `(2‖k‖/sinh 4πt‖k‖)^N` as a
//! Dirichlet series in `t`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::PseudoHTypeAlgebra;
use crate::error::{Error, Result};
use crate::lattice::norm_histogram;
use crate::numeric::{binomial, theta1, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralSeries {
    Lambda,
    Beta,
}

impl SpectralSeries {
    pub fn tag(self) -> &'static str {
        match self {
            SpectralSeries::Lambda => "lambda",
            SpectralSeries::Beta => "beta",
        }
    }
}

/// Exact multiplicity `coeff · √radicand` with squarefree `radicand`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub coeff: u128,
    pub radicand: u64,
}

impl Multiplicity {
    pub fn integer(n: u128) -> Self {
        Multiplicity { coeff: n, radicand: 1 }
    }

    pub fn is_integer(&self) -> bool {
        self.radicand == 1
    }

    pub fn value(&self) -> f64 {
        self.coeff as f64 * (self.radicand as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: Multiplicity,
    pub series: SpectralSeries,
    /// Exact label: `m` with `λ = 2π²m`, or `Q` with `β = 4π√Q`.
    pub key: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub entries: Vec<SpectrumEntry>,
    /// Every eigenvalue `≤ cutoff` is present.
    pub cutoff: f64,
    /// `(N, r)` of the source algebra, used for tail bounds; `None` for a
    /// hand-made table, which is then treated as the whole spectrum.
    pub source: Option<(usize, usize)>,
}

fn squarefree_split(mut k: u64) -> (u64, u64) {
    // k = f·j² with f squarefree
    let (mut f, mut j) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= k {
        let mut e = 0;
        while k % p == 0 {
            k /= p;
            e += 1;
        }
        j *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
        p += 1;
    }
    (f * k, j)
}

fn checked(x: Option<u128>) -> Result<u128> {
    x.ok_or_else(|| Error::Other("multiplicity overflows 128 bits".into()))
}

/// All eigenvalues up to `cutoff`, with exact aggregated multiplicities.
pub fn spectrum_s0(alg: &PseudoHTypeAlgebra, cutoff: f64) -> Result<SpectrumTable> {
    let sig = alg.signature();
    if sig.s != 0 {
        return Err(Error::RequiresDefinite(sig));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidControls("cutoff must be positive".into()));
    }
    let n = alg.n_half();
    let r = sig.r as usize;
    let pi = std::f64::consts::PI;
    let mut entries = Vec::new();

    let m_max = (cutoff / (2.0 * pi * pi)).floor() as u64;
    let hist = norm_histogram(2 * n, (m_max as f64).sqrt().floor() as u32);
    for m in 0..=m_max {
        let c = hist.get(m as usize).copied().unwrap_or(0);
        if c > 0 {
            entries.push(SpectrumEntry {
                eigenvalue: 2.0 * pi * pi * m as f64,
                multiplicity: Multiplicity::integer(c as u128),
                series: SpectralSeries::Lambda,
                key: m,
            });
        }
    }

    let k_max = (cutoff / (4.0 * pi * n as f64)).powi(2).floor() as u64;
    let counts = norm_histogram(r, (k_max as f64).sqrt().floor() as u32);
    let four_n = checked(4u128.checked_pow(n as u32))?;
    let mut merged: BTreeMap<u64, (u128, u64)> = BTreeMap::new();
    for k in 1..=k_max {
        let rk = counts.get(k as usize).copied().unwrap_or(0);
        if rk == 0 {
            continue;
        }
        let (f, j) = squarefree_split(k);
        // K^{N/2} = f^{⌊N/2⌋} j^N √f^{N mod 2}
        let mut kpow = checked((f as u128).checked_pow((n / 2) as u32))?;
        kpow = checked(kpow.checked_mul(checked((j as u128).checked_pow(n as u32))?))?;
        let radicand = if n % 2 == 1 { f } else { 1 };
        let sk = (k as f64).sqrt();
        let mut m = 0u64;
        while 4.0 * pi * sk * (2 * m + n as u64) as f64 <= cutoff {
            let q = k * (2 * m + n as u64).pow(2);
            let c = binomial(m + n as u64 - 1, n as u64 - 1) as u128;
            let mult = checked(four_n.checked_mul(c).and_then(|x| x.checked_mul(rk as u128)))?;
            let mult = checked(mult.checked_mul(kpow))?;
            let e = merged.entry(q).or_insert((0, radicand));
            debug_assert_eq!(e.1, radicand);
            e.0 = checked(e.0.checked_add(mult))?;
            m += 1;
        }
    }
    for (q, (coeff, radicand)) in merged {
        entries.push(SpectrumEntry {
            eigenvalue: 4.0 * pi * (q as f64).sqrt(),
            multiplicity: Multiplicity { coeff, radicand },
            series: SpectralSeries::Beta,
            key: q,
        });
    }
    entries.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    Ok(SpectrumTable {
        entries,
        cutoff,
        source: Some((n, r)),
    })
}

/// Bound on `Σ mult·e^{-tλ}` over the eigenvalues above the cutoff.
fn beyond_cutoff(n: usize, r: usize, cutoff: f64, t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    // λ-series: Σ_{‖l‖²>M} e^{-a‖l‖²} ≤ e^{-a(M+1)/2} θ(a/2)^{2N}
    let a = 2.0 * pi * pi * t;
    let m_max = (cutoff / (2.0 * pi * pi)).floor();
    let th: f64 = theta1(a / 2.0);
    let mut bound = (-a * (m_max + 1.0) / 2.0).exp() * th.powi(2 * n as i32);

    // β-series, k kept but m cut: ratio of consecutive terms is
    // (m+N)/(m+1)·e^{-8πt‖k‖}, decreasing in m
    let k_max = (cutoff / (4.0 * pi * n as f64)).powi(2).floor() as u64;
    let counts = norm_histogram(r, (k_max as f64).sqrt().floor() as u32);
    let nf = n as f64;
    for k in 1..=k_max {
        let rk = counts.get(k as usize).copied().unwrap_or(0);
        if rk == 0 {
            continue;
        }
        let sk = (k as f64).sqrt();
        let mut m = ((cutoff / (4.0 * pi * sk) - nf) / 2.0).floor().max(-1.0) + 1.0;
        let q = (-8.0 * pi * t * sk).exp();
        let term = |m: f64| -> f64 {
            rk as f64
                * 4f64.powi(n as i32)
                * sk.powi(n as i32)
                * binomial(m as u64 + n as u64 - 1, n as u64 - 1)
                * (-4.0 * pi * t * sk * (2.0 * m + nf)).exp()
        };
        loop {
            let rho = (m + nf) / (m + 1.0) * q;
            let tm = term(m);
            if rho < 1.0 {
                bound += tm / (1.0 - rho);
                break;
            }
            bound += tm;
            m += 1.0;
        }
    }

    // β-series, ‖k‖² > K: h(x) = (2x/sinh 4πtx)^N is decreasing and
    // log-concave; shells ‖k‖_∞ = j hold ≤ 2r(2j+1)^{r-1} points
    let rho0 = ((k_max + 1) as f64).sqrt();
    let h = |x: f64| -> f64 {
        let y = 4.0 * pi * t * x;
        if y > 700.0 {
            0.0
        } else {
            (2.0 * x / y.sinh()).powi(n as i32)
        }
    };
    let shell = |j: f64| 2.0 * r as f64 * (2.0 * j + 1.0).powi(r as i32 - 1) * h(j.max(rho0));
    let mut j = (rho0 / (r as f64).sqrt()).ceil().max(1.0);
    loop {
        let sj = shell(j);
        if sj == 0.0 {
            break;
        }
        if j >= rho0 {
            let rho = shell(j + 1.0) / sj;
            if rho < 0.5 {
                bound += sj / (1.0 - rho);
                break;
            }
        }
        bound += sj;
        j += 1.0;
    }
    bound
}

/// `Σ mult·e^{-tλ}` over the table plus a bound for what lies beyond the cutoff.
pub fn trace_from_spectrum(table: &SpectrumTable, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    let mut acc = CompensatedSum::new();
    for e in table.entries.iter().rev() {
        acc.add(e.multiplicity.value() * (-t * e.eigenvalue).exp());
    }
    let value = acc.value();
    let tail = match table.source {
        Some((n, r)) => beyond_cutoff(n, r, table.cutoff, t),
        None => 0.0,
    };
    Ok((value, tail + 32.0 * f64::EPSILON * value.abs()))
}

/// Doubles the cutoff until the part of the trace beyond it is below `tol`.
pub fn spectrum_cutoff_for(alg: &PseudoHTypeAlgebra, t: f64, tol: f64) -> Result<f64> {
    let sig = alg.signature();
    if sig.s != 0 {
        return Err(Error::RequiresDefinite(sig));
    }
    let n = alg.n_half();
    let mut cutoff = 16.0 * std::f64::consts::PI * n as f64;
    for _ in 0..40 {
        if beyond_cutoff(n, sig.r as usize, cutoff, t) <= tol {
            return Ok(cutoff);
        }
        cutoff *= 1.5;
    }
    Err(Error::InvalidControls(format!("no cutoff reaches tolerance {tol:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_split(12), (3, 2));
        assert_eq!(squarefree_split(49), (1, 7));
        assert_eq!(squarefree_split(30), (30, 1));
        assert_eq!(squarefree_split(1), (1, 1));
    }

    #[test]
    fn single_zero_eigenvalue_table() {
        let t = SpectrumTable {
            entries: vec![SpectrumEntry {
                eigenvalue: 0.0,
                multiplicity: Multiplicity::integer(1),
                series: SpectralSeries::Lambda,
                key: 0,
            }],
            cutoff: 1.0,
            source: None,
        };
        let (v, b) = trace_from_spectrum(&t, 0.7).unwrap();
        assert_eq!(v, 1.0);
        assert!(b <= 32.0 * f64::EPSILON);
    }
}
