use std::io::Write;

use serde::Serialize;

use htype_core::algebra::{PseudoHTypeAlgebra, StandardLattice, StructureConstant};
use htype_core::asymptotics::{
    heisenberg_match, leading_coefficient_quadrature, leading_coefficient_zeta, probe_against_match,
    CoefficientMethod, HeisenbergMatch, LeadingCoefficient, ProbeReport, ProbeVerdict, VolumeConvention,
};
use htype_core::clifford::{build_module, min_admissible_dim, verify_module_axioms, ModuleSpec, Signature};
use htype_core::heat_trace::{
    laplacian_total_trace, spectrum_cutoff_for, spectrum_s0, total_trace, Operator, SpectrumEntry, TraceControls,
    TraceEstimate,
};
use htype_core::isospectral::{
    dimension_relation, generate_isospectral_family, minimal_pair_table, modules_isomorphic, numeric_isospectral,
    recover_module_dim, structural_isospectral, ClassificationEntry, DimensionRecovery, IsospectralFamily,
    IsospectralityReport, ModuleRelation, PairRelation, Structural, Verdict,
};

use crate::args::Scenario;
use crate::config::{Cutoff, Format, RunConfig, Task};
use crate::CliError;

/// Output of one command before it is written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    /// Short summary for stderr, e.g. a probe verdict under CSV output.
    pub note: Option<String>,
    /// Expected facts that did not hold.
    pub failures: Vec<String>,
}

impl Rendered {
    fn body(body: String) -> Self {
        Rendered {
            body,
            note: None,
            failures: Vec::new(),
        }
    }
}

/// Runs the command and writes its output to `--out` or stdout.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let r = execute(cfg)?;
    match &cfg.output.path {
        Some(p) => std::fs::write(p, r.body.as_bytes()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(r.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    if let Some(n) = &r.note {
        eprintln!("{n}");
    }
    if r.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(r.failures))
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let fmt = cfg.output.format;
    match &cfg.task {
        Task::DumpModule { spec } => dump_module(spec).map(Rendered::body),
        Task::DumpAlgebra { spec } => dump_algebra(spec).map(Rendered::body),
        Task::Trace { spec, t, operator } => trace(spec, t, *operator, &cfg.controls, fmt).map(Rendered::body),
        Task::Spectrum { spec, cutoff } => spectrum(spec, *cutoff, fmt),
        Task::Compare { a, b, t, tol } => compare(a, b, t, *tol, &cfg.controls).map(Rendered::body),
        Task::Classify { r, s } => classify(*r, *s).map(Rendered::body),
        Task::Family { sig, m, t } => family(*sig, *m, t, &cfg.controls).map(Rendered::body),
        Task::Asymptotics { spec, convention } => asymptotics(spec, *convention).map(Rendered::body),
        Task::Probe {
            spec,
            t,
            required_slope,
            convention,
        } => probe(spec, t, *required_slope, *convention, &cfg.controls, fmt),
        Task::Reproduce(s) => reproduce(*s),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Shortest round-trip form, identical to the JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 serializes")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn algebra(spec: &ModuleSpec) -> Result<PseudoHTypeAlgebra, CliError> {
    Ok(PseudoHTypeAlgebra::new(build_module(spec)?)?)
}

#[derive(Serialize)]
struct GeneratorView {
    /// `J e_i = signs[i] e_{perm[i]}`.
    perm: Vec<usize>,
    signs: Vec<i8>,
}

#[derive(Serialize)]
struct ModuleView<'a> {
    r: u32,
    s: u32,
    spec: &'a ModuleSpec,
    dim: usize,
    metric: Vec<i8>,
    generators: Vec<GeneratorView>,
    axioms_verified: bool,
}

fn dump_module(spec: &ModuleSpec) -> Result<String, CliError> {
    let m = build_module(spec)?;
    let report = verify_module_axioms(&m);
    json(&ModuleView {
        r: m.signature.r,
        s: m.signature.s,
        spec,
        dim: m.dim_v,
        metric: m.metric.clone(),
        generators: m
            .generators
            .iter()
            .map(|g| GeneratorView {
                perm: g.perm.clone(),
                signs: g.signs.clone(),
            })
            .collect(),
        axioms_verified: report.all_pass(),
    })
}

#[derive(Serialize)]
struct AlgebraView<'a> {
    signature: Signature,
    spec: &'a ModuleSpec,
    dim_h: usize,
    d: usize,
    manifold_dim: usize,
    /// `[X_i, X_j] = sign · Z_k`, listed for both orders.
    structure_constants: Vec<StructureConstant>,
    lattice: StandardLattice,
}

fn dump_algebra(spec: &ModuleSpec) -> Result<String, CliError> {
    let a = algebra(spec)?;
    json(&AlgebraView {
        signature: a.signature(),
        spec,
        dim_h: a.dim_h,
        d: a.d,
        manifold_dim: a.manifold_dim(),
        structure_constants: a.sparse_constants(),
        lattice: a.lattice,
    })
}

/// Worker count from `HTYPE_THREADS`, else the available parallelism.
fn thread_count(jobs: usize) -> Result<usize, CliError> {
    let n = match std::env::var("HTYPE_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return Err(CliError::Usage(format!("HTYPE_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    Ok(n.min(jobs).max(1))
}

/// Evaluates `f` at every `t`, results in input order whatever the
/// scheduling.
fn parallel_map<T, F>(ts: &[f64], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(f64) -> Result<T, CliError> + Sync,
{
    let workers = thread_count(ts.len())?;
    if workers == 1 {
        return ts.iter().map(|&t| f(t)).collect();
    }
    let chunk = ts.len().div_ceil(workers);
    let parts: Vec<Result<Vec<T>, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = ts
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(|&t| f(t)).collect::<Result<Vec<T>, CliError>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("trace worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(ts.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct TracePoint {
    t: f64,
    trace: f64,
    tail_bound: f64,
    truncation_bound: f64,
    rounding_bound: f64,
    radius: u32,
}

#[derive(Serialize)]
struct TraceView<'a> {
    signature: Signature,
    spec: &'a ModuleSpec,
    manifold_dim: usize,
    operator: Operator,
    controls: &'a TraceControls,
    points: Vec<TracePoint>,
}

fn trace_one(alg: &PseudoHTypeAlgebra, t: f64, op: Operator, ctrl: &TraceControls) -> Result<TraceEstimate, CliError> {
    Ok(match op {
        Operator::SubLaplacian => total_trace(alg, t, ctrl)?,
        Operator::Laplacian => laplacian_total_trace(alg, t, ctrl)?,
    })
}

fn trace(spec: &ModuleSpec, ts: &[f64], op: Operator, ctrl: &TraceControls, fmt: Format) -> Result<String, CliError> {
    let alg = algebra(spec)?;
    let est = parallel_map(ts, |t| trace_one(&alg, t, op, ctrl))?;
    let points: Vec<TracePoint> = ts
        .iter()
        .zip(est)
        .map(|(&t, e)| TracePoint {
            t,
            trace: e.value,
            tail_bound: e.tail_bound,
            truncation_bound: e.truncation_bound,
            rounding_bound: e.rounding_bound,
            radius: e.radius,
        })
        .collect();
    match fmt {
        Format::Json => json(&TraceView {
            signature: alg.signature(),
            spec,
            manifold_dim: alg.manifold_dim(),
            operator: op,
            controls: ctrl,
            points,
        }),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["t", "trace", "tail_bound", "truncation_bound", "rounding_bound", "radius"])
                .map_err(csv_err)?;
            for p in &points {
                w.write_record([
                    num(p.t),
                    num(p.trace),
                    num(p.tail_bound),
                    num(p.truncation_bound),
                    num(p.rounding_bound),
                    p.radius.to_string(),
                ])
                .map_err(csv_err)?;
            }
            csv_finish(w)
        }
    }
}

#[derive(Serialize)]
struct SpectrumView<'a> {
    signature: Signature,
    cutoff: f64,
    entries: &'a [SpectrumEntry],
    recovery: DimensionRecovery,
}

fn spectrum(spec: &ModuleSpec, cutoff: Cutoff, fmt: Format) -> Result<Rendered, CliError> {
    let alg = algebra(spec)?;
    let c = match cutoff {
        Cutoff::Fixed(c) => c,
        Cutoff::ForTime { t, tol } => spectrum_cutoff_for(&alg, t, tol)?,
    };
    let table = spectrum_s0(&alg, c)?;
    let recovery = recover_module_dim(&table)?;
    let note = format!(
        "recovered dim V = {} (consistent: {})",
        recovery.module_dim, recovery.consistent
    );
    let body = match fmt {
        Format::Json => json(&SpectrumView {
            signature: alg.signature(),
            cutoff: c,
            entries: &table.entries,
            recovery,
        })?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record([
                "eigenvalue",
                "multiplicity",
                "series",
                "multiplicity_coeff",
                "multiplicity_radicand",
                "key",
            ])
            .map_err(csv_err)?;
            for e in &table.entries {
                let m = e.multiplicity;
                let exact = if m.is_integer() {
                    m.coeff.to_string()
                } else {
                    format!("{}*sqrt({})", m.coeff, m.radicand)
                };
                w.write_record([
                    num(e.eigenvalue),
                    exact,
                    e.series.tag().to_string(),
                    m.coeff.to_string(),
                    m.radicand.to_string(),
                    e.key.to_string(),
                ])
                .map_err(csv_err)?;
            }
            csv_finish(w)?
        }
    };
    Ok(Rendered {
        body,
        note: (fmt == Format::Csv).then_some(note),
        failures: Vec::new(),
    })
}

#[derive(Serialize)]
struct CompareView<'a> {
    spec_a: &'a ModuleSpec,
    spec_b: &'a ModuleSpec,
    /// Only posed for two modules of one signature.
    modules: Option<ModuleRelation>,
    structural_from_specs: Structural,
    report: IsospectralityReport,
}

fn compare(a: &ModuleSpec, b: &ModuleSpec, ts: &[f64], tol: f64, ctrl: &TraceControls) -> Result<String, CliError> {
    let (alg_a, alg_b) = (algebra(a)?, algebra(b)?);
    let report = numeric_isospectral(&alg_a, &alg_b, ts, tol, ctrl)?;
    json(&CompareView {
        spec_a: a,
        spec_b: b,
        modules: (a.signature == b.signature).then(|| modules_isomorphic(a.signature, a, b)),
        structural_from_specs: structural_isospectral(a, b),
        report,
    })
}

#[derive(Serialize)]
struct ClassifyView {
    entry: ClassificationEntry,
    dim_min_rs: u64,
    dim_min_sr: u64,
    /// Relation implied by the two dimensions alone.
    dimension_relation: Option<PairRelation>,
}

fn classify_view(r: u32, s: u32) -> Result<ClassifyView, CliError> {
    Ok(ClassifyView {
        entry: minimal_pair_table(r, s)?,
        dim_min_rs: min_admissible_dim(Signature::new(r, s))?,
        dim_min_sr: min_admissible_dim(Signature::new(s, r))?,
        dimension_relation: dimension_relation(r, s)?,
    })
}

fn classify(r: u32, s: u32) -> Result<String, CliError> {
    json(&classify_view(r, s)?)
}

#[derive(Serialize)]
struct PairNumeric {
    i: usize,
    j: usize,
    verdict: Verdict,
    max_relative_delta: f64,
}

#[derive(Serialize)]
struct FamilyView {
    family: IsospectralFamily,
    certified: bool,
    numeric: Vec<PairNumeric>,
}

fn max_relative(report: &IsospectralityReport) -> f64 {
    report
        .numeric
        .iter()
        .map(|p| p.delta / p.trace_a.abs().max(p.trace_b.abs()))
        .fold(0.0, f64::max)
}

fn family_view(sig: Signature, m: usize, ts: &[f64], ctrl: &TraceControls) -> Result<FamilyView, CliError> {
    let family = generate_isospectral_family(sig, m)?;
    let mut numeric = Vec::new();
    if !ts.is_empty() {
        let algs: Vec<PseudoHTypeAlgebra> = family.specs.iter().map(algebra).collect::<Result<_, _>>()?;
        for i in 0..algs.len() {
            for j in i + 1..algs.len() {
                let rep = numeric_isospectral(&algs[i], &algs[j], ts, 1e-10, ctrl)?;
                numeric.push(PairNumeric {
                    i,
                    j,
                    max_relative_delta: max_relative(&rep),
                    verdict: rep.verdict,
                });
            }
        }
    }
    Ok(FamilyView {
        certified: family.certified(),
        family,
        numeric,
    })
}

fn family(sig: Signature, m: usize, ts: &[f64], ctrl: &TraceControls) -> Result<String, CliError> {
    json(&family_view(sig, m, ts, ctrl)?)
}

#[derive(Serialize)]
struct MatchView {
    n: usize,
    alpha: f64,
    /// `[dim M, dim H_α]`.
    dims: [usize; 2],
    c_m: LeadingCoefficient,
    c_h1: LeadingCoefficient,
    c_h_alpha: f64,
}

impl From<&HeisenbergMatch> for MatchView {
    fn from(m: &HeisenbergMatch) -> Self {
        MatchView {
            n: m.n,
            alpha: m.alpha,
            dims: [m.manifold_dim, m.heisenberg_dim],
            c_m: m.c_m,
            c_h1: m.c_h1,
            c_h_alpha: m.c_h_alpha(),
        }
    }
}

#[derive(Serialize)]
struct ZetaCheck {
    value: f64,
    error: f64,
    relative_difference: f64,
}

#[derive(Serialize)]
struct AsymptoticsView<'a> {
    #[serde(rename = "cM")]
    c_m: f64,
    method: CoefficientMethod,
    error: f64,
    convention: VolumeConvention,
    volume: f64,
    signature: Signature,
    spec: &'a ModuleSpec,
    manifold_dim: usize,
    /// Closed form, available for `s = 0`.
    zeta_check: Option<ZetaCheck>,
    /// Needs `d > 1`.
    #[serde(rename = "match")]
    heisenberg_match: Option<MatchView>,
}

fn asymptotics(spec: &ModuleSpec, conv: VolumeConvention) -> Result<String, CliError> {
    let alg = algebra(spec)?;
    let sig = alg.signature();
    let c = leading_coefficient_quadrature(&alg, conv)?;
    let zeta = if sig.s == 0 {
        Some(leading_coefficient_zeta(alg.n_half(), alg.d, conv)?)
    } else {
        None
    };
    let m = if alg.d > 1 { Some(heisenberg_match(&alg, conv)?) } else { None };
    json(&AsymptoticsView {
        c_m: c.value,
        method: c.method,
        error: c.error_estimate,
        convention: c.convention,
        volume: c.volume,
        signature: sig,
        spec,
        manifold_dim: alg.manifold_dim(),
        zeta_check: zeta.map(|z| ZetaCheck {
            value: z.value,
            error: z.error_estimate,
            relative_difference: (z.value - c.value).abs() / z.value.abs(),
        }),
        heisenberg_match: m.as_ref().map(MatchView::from),
    })
}

fn verdict_line(v: &ProbeVerdict) -> String {
    match v {
        ProbeVerdict::SuperPolynomial { p } => format!("verdict: super-polynomial (every slope ≥ {p})"),
        ProbeVerdict::Polynomial { slope } => format!("verdict: polynomial, slope {slope}"),
        ProbeVerdict::Inconclusive { reason, noise_floor } => {
            format!("verdict: inconclusive ({reason}); noise floor {noise_floor:e}")
        }
    }
}

#[derive(Serialize)]
struct ProbeView {
    heisenberg_match: MatchView,
    report: ProbeReport,
}

fn probe_run(
    spec: &ModuleSpec,
    ts: &[f64],
    slope: f64,
    conv: VolumeConvention,
    ctrl: &TraceControls,
) -> Result<ProbeView, CliError> {
    let alg = algebra(spec)?;
    let m = heisenberg_match(&alg, conv)?;
    let report = probe_against_match(&alg, &m, ts, ctrl, slope)?;
    Ok(ProbeView {
        heisenberg_match: MatchView::from(&m),
        report,
    })
}

fn probe(
    spec: &ModuleSpec,
    ts: &[f64],
    slope: f64,
    conv: VolumeConvention,
    ctrl: &TraceControls,
    fmt: Format,
) -> Result<Rendered, CliError> {
    let view = probe_run(spec, ts, slope, conv, ctrl)?;
    let note = verdict_line(&view.report.verdict);
    let body = match fmt {
        Format::Json => json(&view)?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["t", "D", "slope", "noise_floor", "above_floor"])
                .map_err(csv_err)?;
            for p in &view.report.points {
                w.write_record([
                    num(p.t),
                    num(p.difference),
                    p.slope.map(num).unwrap_or_default(),
                    num(p.noise_floor),
                    p.above_floor.to_string(),
                ])
                .map_err(csv_err)?;
            }
            csv_finish(w)?
        }
    };
    Ok(Rendered {
        body,
        note: (fmt == Format::Csv).then_some(note),
        failures: Vec::new(),
    })
}

#[derive(Serialize)]
struct Fact {
    name: &'static str,
    expected: String,
    observed: String,
    pass: bool,
}

#[derive(Serialize)]
struct ReproduceView<T: Serialize> {
    scenario: &'static str,
    facts: Vec<Fact>,
    all_pass: bool,
    data: T,
}

fn fact(name: &'static str, expected: impl ToString, observed: impl ToString, pass: bool) -> Fact {
    Fact {
        name,
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass,
    }
}

fn finish<T: Serialize>(scenario: &'static str, facts: Vec<Fact>, data: T) -> Result<Rendered, CliError> {
    let failures: Vec<String> = facts.iter().filter(|f| !f.pass).map(|f| f.name.to_string()).collect();
    let view = ReproduceView {
        scenario,
        all_pass: failures.is_empty(),
        facts,
        data,
    };
    Ok(Rendered {
        body: json(&view)?,
        note: None,
        failures,
    })
}

fn reproduce(s: Scenario) -> Result<Rendered, CliError> {
    match s {
        Scenario::Pair12d => reproduce_pair(),
        Scenario::Family11d => reproduce_family(),
        Scenario::HeisenbergMatch => reproduce_match(),
    }
}

#[derive(Serialize)]
struct PairData {
    t: Vec<f64>,
    sub_laplacian_a: Vec<f64>,
    sub_laplacian_b: Vec<f64>,
    laplacian_a: Vec<f64>,
    laplacian_b: Vec<f64>,
    classification: ClassifyView,
}

fn rel_diffs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()))
        .fold(0.0, f64::max)
}

/// Minimal modules of `(3,1)` and `(1,3)`: non-isomorphic algebras on
/// 12-dimensional nilmanifolds with equal sub-Laplacian and Laplacian traces.
fn reproduce_pair() -> Result<Rendered, CliError> {
    let sa = ModuleSpec::minimal(Signature::new(3, 1));
    let sb = ModuleSpec::minimal(Signature::new(1, 3));
    let (a, b) = (algebra(&sa)?, algebra(&sb)?);
    let ctrl = TraceControls::default();
    let ts: Vec<f64> = (0..20).map(|i| 0.1 * 20f64.powf(i as f64 / 19.0)).collect();
    let eval = |alg: &PseudoHTypeAlgebra, op| -> Result<Vec<f64>, CliError> {
        Ok(parallel_map(&ts, |t| trace_one(alg, t, op, &ctrl))?.into_iter().map(|e| e.value).collect())
    };
    let sub_a = eval(&a, Operator::SubLaplacian)?;
    let sub_b = eval(&b, Operator::SubLaplacian)?;
    let lap_a = eval(&a, Operator::Laplacian)?;
    let lap_b = eval(&b, Operator::Laplacian)?;
    let classification = classify_view(3, 1)?;
    let structural = structural_isospectral(&sa, &sb);
    let (ds, dl) = (rel_diffs(&sub_a, &sub_b), rel_diffs(&lap_a, &lap_b));
    let facts = vec![
        fact("manifold dimensions", "12, 12", format!("{}, {}", a.manifold_dim(), b.manifold_dim()),
            a.manifold_dim() == 12 && b.manifold_dim() == 12),
        fact("classification of (3,1) vs (1,3)", "non-isomorphic", format!("{:?}", classification.entry.relation),
            classification.entry.relation == PairRelation::NonIsomorphic),
        fact("structural isospectrality", "yes", format!("{structural:?}"), matches!(structural, Structural::Yes(_))),
        fact("sub-Laplacian max relative difference", "≤ 1e-12", num(ds), ds <= 1e-12),
        fact("Laplacian max relative difference", "≤ 1e-12", num(dl), dl <= 1e-12),
    ];
    finish(
        "pair-12d",
        facts,
        PairData {
            t: ts,
            sub_laplacian_a: sub_a,
            sub_laplacian_b: sub_b,
            laplacian_a: lap_a,
            laplacian_b: lap_b,
            classification,
        },
    )
}

/// Two 11-dimensional `(3,0)` nilmanifolds from modules with different
/// irreducible-type content.
fn reproduce_family() -> Result<Rendered, CliError> {
    let view = family_view(Signature::new(3, 0), 1, &[0.2, 0.5, 1.0], &TraceControls::default())?;
    let fam = &view.family;
    let dims: Vec<usize> = fam
        .specs
        .iter()
        .map(|s| s.dim().map(|d| d + 3))
        .collect::<Result<_, _>>()?;
    let numeric_ok = !view.numeric.is_empty()
        && view
            .numeric
            .iter()
            .all(|p| matches!(p.verdict, Verdict::NumericallyIndistinguishable | Verdict::IsospectralCertifiedStructurally));
    let worst = view.numeric.iter().map(|p| p.max_relative_delta).fold(0.0, f64::max);
    let facts = vec![
        fact("family size", 2, fam.specs.len(), fam.specs.len() == 2),
        fact("manifold dimensions", "11", format!("{dims:?}"), dims.iter().all(|&d| d == 11)),
        fact("pairwise non-isomorphic and structurally isospectral", true, view.certified, view.certified),
        fact("numerically indistinguishable at t = 0.2, 0.5, 1 (rel. 1e-10)", true, format!("max rel. {}", num(worst)), numeric_ok),
    ];
    finish("family-11d", facts, view)
}

#[derive(Serialize)]
struct MatchData {
    paper: MatchView,
    lebesgue: MatchView,
    probe: ProbeView,
}

/// `(1,3)` against the dilated Heisenberg manifold of dimension 15.
fn reproduce_match() -> Result<Rendered, CliError> {
    let spec = ModuleSpec::minimal(Signature::new(1, 3));
    let alg = algebra(&spec)?;
    let paper = heisenberg_match(&alg, VolumeConvention::Paper)?;
    let leb = heisenberg_match(&alg, VolumeConvention::Lebesgue)?;
    let ts: Vec<f64> = (0..12).map(|i| 0.2 * 0.25f64.powf(i as f64 / 11.0)).collect();
    let mut ctrl = TraceControls::default();
    ctrl.tail_tolerance = 1e-12;
    ctrl.radius_cap = 2000;
    let probe = probe_run(&spec, &ts, 6.0, VolumeConvention::Lebesgue, &ctrl)?;
    let c_match = (leb.c_h_alpha() - leb.c_m.value).abs() / leb.c_m.value;
    let not_poly = !matches!(probe.report.verdict, ProbeVerdict::Polynomial { .. });
    let facts = vec![
        fact("Heisenberg index n", 7, leb.n, leb.n == 7 && paper.n == 7),
        fact("dimensions", "12 vs 15", format!("{} vs {}", leb.manifold_dim, leb.heisenberg_dim),
            leb.manifold_dim == 12 && leb.heisenberg_dim == 15),
        fact("leading coefficients match", "relative ≤ 1e-8", num(c_match), c_match <= 1e-8),
        fact("trace difference not polynomial on [0.05, 0.2]", "super-polynomial or inconclusive",
            verdict_line(&probe.report.verdict), not_poly),
    ];
    finish(
        "heisenberg-match",
        facts,
        MatchData {
            paper: MatchView::from(&paper),
            lebesgue: MatchView::from(&leb),
            probe,
        },
    )
}
