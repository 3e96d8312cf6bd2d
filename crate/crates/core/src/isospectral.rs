//! Isospectrality and (non-)isomorphism of pseudo H-type algebras.
//!
//! The structural rule is a sufficient condition only: signatures `(r,s)`
//! and `(s,r)` with modules of equal dimension give isospectral
//! nilmanifolds. Nothing here ever claims structural non-isospectrality.

use serde::{Deserialize, Serialize};

use crate::algebra::PseudoHTypeAlgebra;
use crate::clifford::{min_admissible_dim, IrreducibleType, MinimalVariant, ModuleSpec, ProductSign, Signature};
use crate::error::{Error, Result};
use crate::heat_trace::{total_trace, SpectralSeries, SpectrumTable, TraceControls};

/// How the algebras built on the minimal modules of `(r,s)` and `(s,r)`
/// compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRelation {
    Isomorphic,
    NonIsomorphic,
    /// `dim V_min^{r,s} = 2 dim V_min^{s,r}`; isomorphy is not posed.
    DimDouble,
    /// `dim V_min^{r,s} = ½ dim V_min^{s,r}`.
    DimHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntrySource {
    /// `r = s`: both sides are the same algebra.
    Diagonal,
    /// Read from the stored table at `(r, s)`.
    Table { r: u32, s: u32 },
    /// Reduced by periodicity shifts to the stored cell `(r, s)`.
    Periodicity { r: u32, s: u32, shifts: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub signature: Signature,
    pub relation: PairRelation,
    pub source: EntrySource,
}

// Indexed [s][r]; I ≅, X ≇, D 'd', H 'h', _ not stored. The diagonal is left
// unstored and answered directly.
const TABLE: [&str; 9] = [
    "_IIhIhhhI", // s = 0
    "I_dXdIIhI", // s = 1
    "Ih_XdIIhI", // s = 2
    "dXX_dddXd", // s = 3
    "Ihhh_II__", // s = 4
    "dIIhI____", // s = 5
    "dIIhI____", // s = 6
    "dddX_____", // s = 7
    "IIIh_____", // s = 8
];

fn table_cell(r: u32, s: u32) -> Option<PairRelation> {
    if r > 8 || s > 8 {
        return None;
    }
    match TABLE[s as usize].as_bytes()[r as usize] {
        b'I' => Some(PairRelation::Isomorphic),
        b'X' => Some(PairRelation::NonIsomorphic),
        b'd' => Some(PairRelation::DimDouble),
        b'h' => Some(PairRelation::DimHalf),
        _ => None,
    }
}

/// Looks `(r,s)` up in the stored table, reducing by the `(4,4)`, `(8,0)`
/// and `(0,8)` periodicities first when the cell is not stored. Each shift
/// multiplies both minimal dimensions by 16, so it preserves the relation.
pub fn minimal_pair_table(r: u32, s: u32) -> Result<ClassificationEntry> {
    let sig = Signature::new(r, s);
    if r + s == 0 {
        return Err(Error::EmptySignature);
    }
    let (mut cr, mut cs, mut shifts) = (r, s, 0usize);
    loop {
        if cr == cs {
            return Ok(ClassificationEntry {
                signature: sig,
                relation: PairRelation::Isomorphic,
                source: EntrySource::Diagonal,
            });
        }
        if let Some(rel) = table_cell(cr, cs) {
            let source = if shifts == 0 {
                EntrySource::Table { r: cr, s: cs }
            } else {
                EntrySource::Periodicity { r: cr, s: cs, shifts }
            };
            return Ok(ClassificationEntry {
                signature: sig,
                relation: rel,
                source,
            });
        }
        if cr >= 4 && cs >= 4 {
            cr -= 4;
            cs -= 4;
        } else if cr >= 8 {
            cr -= 8;
        } else if cs >= 8 {
            cs -= 8;
        } else {
            return Err(Error::UnsupportedSignature(sig));
        }
        shifts += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleRelation {
    Isomorphic,
    NonIsomorphic,
    OutOfScope,
}

fn sign_pair_match(a: (usize, usize), b: (usize, usize)) -> ModuleRelation {
    if a == b || a == (b.1, b.0) {
        ModuleRelation::Isomorphic
    } else {
        ModuleRelation::NonIsomorphic
    }
}

fn type_sums(spec: &ModuleSpec) -> (usize, usize) {
    use IrreducibleType as T;
    use ProductSign as P;
    let c = |p, t| spec.count(MinimalVariant::new(p, t));
    (
        c(P::Plus, T::Plus) + c(P::Minus, T::Minus),
        c(P::Minus, T::Plus) + c(P::Plus, T::Minus),
    )
}

/// Whether the algebras on two modules of the same signature are
/// isomorphic, for the congruence classes where a complete criterion is
/// known: `r ≡ 3 (mod 4)` with any `s`. Elsewhere the answer is
/// `OutOfScope`.
pub fn modules_isomorphic(sig: Signature, u: &ModuleSpec, v: &ModuleSpec) -> ModuleRelation {
    if u.signature != sig || v.signature != sig || sig.r % 4 != 3 {
        return ModuleRelation::OutOfScope;
    }
    if sig.s % 4 == 0 {
        sign_pair_match(type_sums(u), type_sums(v))
    } else {
        sign_pair_match(u.sign_counts(), v.sign_counts())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructuralRule {
    /// Same signature and same module dimension.
    SameSignatureEqualDimension,
    /// Signatures `(r,s)` and `(s,r)` with equal module dimensions.
    SwappedSignatureEqualDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", content = "rule", rename_all = "kebab-case")]
pub enum Structural {
    Yes(StructuralRule),
    Unknown,
}

fn structural_from_dims(a: Signature, dim_a: usize, b: Signature, dim_b: usize) -> Structural {
    if dim_a != dim_b {
        return Structural::Unknown;
    }
    if a == b {
        Structural::Yes(StructuralRule::SameSignatureEqualDimension)
    } else if a == b.swapped() {
        Structural::Yes(StructuralRule::SwappedSignatureEqualDimension)
    } else {
        Structural::Unknown
    }
}

/// Sufficient condition for isospectrality of both the sub-Laplacian and
/// the Laplacian.
///
/// Two modules of one signature with equal dimension are sums of the same
/// number of minimal modules, and the traces see only that number.
pub fn structural_isospectral(a: &ModuleSpec, b: &ModuleSpec) -> Structural {
    match (a.dim(), b.dim()) {
        (Ok(da), Ok(db)) => structural_from_dims(a.signature, da, b.signature, db),
        _ => Structural::Unknown,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPoint {
    pub t: f64,
    pub trace_a: f64,
    pub trace_b: f64,
    pub delta: f64,
    /// Sum of the two certified tail bounds.
    pub combined_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    /// Numerics within the bounds but not within `tol`; the structural
    /// rule applies.
    IsospectralCertifiedStructurally,
    /// Every `|Δ|` within `tol` relative to the larger trace.
    NumericallyIndistinguishable,
    /// `|Δ|` exceeds the combined bound at `t`.
    Distinguished { t: f64, gap: f64 },
    /// Within the bounds, above `tol`, and no structural rule applies.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsospectralityReport {
    pub structural: Structural,
    pub numeric: Vec<NumericPoint>,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// Compares sub-Laplacian traces at `t_values`. `tol` is relative to the
/// larger trace.
pub fn numeric_isospectral(
    a: &PseudoHTypeAlgebra,
    b: &PseudoHTypeAlgebra,
    t_values: &[f64],
    tol: f64,
    ctrl: &TraceControls,
) -> Result<IsospectralityReport> {
    if let Some(&t) = t_values.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::NonPositiveTime(t));
    }
    let structural = structural_from_dims(a.signature(), a.dim_h, b.signature(), b.dim_h);
    let mut numeric = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let ea = total_trace(a, t, ctrl)?;
        let eb = total_trace(b, t, ctrl)?;
        numeric.push(NumericPoint {
            t,
            trace_a: ea.value,
            trace_b: eb.value,
            delta: (ea.value - eb.value).abs(),
            combined_bound: ea.tail_bound + eb.tail_bound,
        });
    }
    let verdict = if let Some(p) = numeric
        .iter()
        .filter(|p| p.delta > p.combined_bound)
        .max_by(|x, y| (x.delta - x.combined_bound).total_cmp(&(y.delta - y.combined_bound)))
    {
        Verdict::Distinguished { t: p.t, gap: p.delta }
    } else if !numeric.is_empty()
        && numeric
            .iter()
            .all(|p| p.delta <= tol * p.trace_a.abs().max(p.trace_b.abs()))
    {
        Verdict::NumericallyIndistinguishable
    } else if matches!(structural, Structural::Yes(_)) {
        Verdict::IsospectralCertifiedStructurally
    } else {
        Verdict::Unresolved
    };
    Ok(IsospectralityReport {
        structural,
        numeric,
        verdict,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub i: usize,
    pub j: usize,
    pub modules: ModuleRelation,
    pub structural: Structural,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsospectralFamily {
    pub signature: Signature,
    pub m: usize,
    pub specs: Vec<ModuleSpec>,
    pub manifold_dim: usize,
    pub certificate: Vec<PairCertificate>,
}

impl IsospectralFamily {
    /// Every pair non-isomorphic and structurally isospectral.
    pub fn certified(&self) -> bool {
        self.certificate
            .iter()
            .all(|c| c.modules == ModuleRelation::NonIsomorphic && matches!(c.structural, Structural::Yes(_)))
    }
}

/// `m + 1` modules of one signature with equal dimension and pairwise
/// non-isomorphic algebras: `(i, 2m−i)` copies of the two product signs,
/// `0 ≤ i ≤ m`. For `(3,0)` all summands carry the `+` type.
pub fn generate_isospectral_family(sig: Signature, m: usize) -> Result<IsospectralFamily> {
    if m == 0 {
        return Err(Error::InvalidSpec("family size parameter m must be ≥ 1".into()));
    }
    let specs: Vec<ModuleSpec> = match (sig.r, sig.s) {
        (3, 1) => (0..=m).map(|i| ModuleSpec::with_signs(sig, i, 2 * m - i)).collect(),
        (3, 0) => (0..=m)
            .map(|i| ModuleSpec::with_types(sig, i, 2 * m - i, 0, 0))
            .collect(),
        _ => return Err(Error::UnsupportedSignature(sig)),
    };
    let manifold_dim = specs[0].dim()? + sig.d();
    let mut certificate = Vec::new();
    for i in 0..specs.len() {
        for j in i + 1..specs.len() {
            certificate.push(PairCertificate {
                i,
                j,
                modules: modules_isomorphic(sig, &specs[i], &specs[j]),
                structural: structural_isospectral(&specs[i], &specs[j]),
            });
        }
    }
    Ok(IsospectralFamily {
        signature: sig,
        m,
        specs,
        manifold_dim,
        certificate,
    })
}

/// Half-dimension read off an `s = 0` spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionRecovery {
    /// `dim V = 2N`.
    pub module_dim: usize,
    /// Smallest eigenvalue classified as a `β` value; equals `4πN`.
    pub beta_min: f64,
    /// Multiplicity of `λ = 2π²` when it lies within the table, `4N`.
    pub lambda_one_multiplicity: Option<u128>,
    pub consistent: bool,
}

fn near_integer(x: f64) -> Option<u64> {
    let k = x.round();
    (k >= 0.0 && (x - k).abs() <= 1e-9 * x.max(1.0)).then_some(k as u64)
}

/// Splits the eigenvalues into `λ` with `λ² ∈ π⁴Z` and `β` with
/// `β² ∈ π²Z`, using only the numeric values, then recovers `2N` from the
/// bottom of the `β` series.
pub fn recover_module_dim(table: &SpectrumTable) -> Result<DimensionRecovery> {
    let pi = std::f64::consts::PI;
    let mut beta_min: Option<f64> = None;
    let mut lambda_one = None;
    for e in &table.entries {
        let x = e.eigenvalue;
        let as_lambda = near_integer(x / (2.0 * pi * pi));
        let as_beta = near_integer((x / (4.0 * pi)).powi(2)).filter(|&q| q > 0);
        match (as_lambda, as_beta) {
            (Some(m), None) => {
                if m == 1 {
                    lambda_one = Some(e.multiplicity.coeff);
                }
            }
            (None, Some(_)) => {
                if beta_min.map_or(true, |b| x < b) {
                    beta_min = Some(x);
                }
            }
            // π transcendental: a value fitting both is a float coincidence;
            // fall back on the stored label
            (Some(_), Some(_)) => {
                if e.series == SpectralSeries::Beta && beta_min.map_or(true, |b| x < b) {
                    beta_min = Some(x);
                }
            }
            (None, None) => {
                return Err(Error::Other(format!("eigenvalue {x} fits neither series")));
            }
        }
    }
    let beta_min = beta_min.ok_or_else(|| Error::Other("no β eigenvalue below the cutoff".into()))?;
    let n = (beta_min / (4.0 * pi)).round() as usize;
    let consistent = n >= 1
        && (beta_min - 4.0 * pi * n as f64).abs() <= 1e-9 * beta_min
        && lambda_one.map_or(true, |c| c == 4 * n as u128);
    Ok(DimensionRecovery {
        module_dim: 2 * n,
        beta_min,
        lambda_one_multiplicity: lambda_one,
        consistent,
    })
}

/// `dim V_min` of `(r,s)` divided by that of `(s,r)`, as a relation.
pub fn dimension_relation(r: u32, s: u32) -> Result<Option<PairRelation>> {
    let a = min_admissible_dim(Signature::new(r, s))?;
    let b = min_admissible_dim(Signature::new(s, r))?;
    Ok(if a == 2 * b {
        Some(PairRelation::DimDouble)
    } else if 2 * a == b {
        Some(PairRelation::DimHalf)
    } else if a == b {
        None
    } else {
        return Err(Error::Other(format!("dimension ratio {a}/{b} for ({r},{s})")));
    })
}
