//! Resolution of command-line flags and an optional TOML file into a
//! [`RunConfig`]. Flags win over file values; unknown keys in the file are
//! rejected.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Deserialize;

use htype_core::asymptotics::VolumeConvention;
use htype_core::clifford::{has_two_types, ModuleSpec, Signature};
use htype_core::heat_trace::{KernelModel, Operator, TraceControls};
use htype_core::numeric::Precision;

use crate::args::{
    AlgebraArgs, Cli, Command, ControlArgs, ConventionArg, FormatArg, KernelModelArg, OperatorArg, OutputArgs,
    PrecisionArg, Scenario,
};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    DumpModule,
    DumpAlgebra,
    Trace,
    Spectrum,
    Compare,
    Classify,
    Family,
    Asymptotics,
    ProbeExpansion,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Fixed(f64),
    /// Smallest cutoff whose omitted part at `t` is below the tolerance.
    ForTime { t: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    DumpModule { spec: ModuleSpec },
    DumpAlgebra { spec: ModuleSpec },
    Trace { spec: ModuleSpec, t: Vec<f64>, operator: Operator },
    Spectrum { spec: ModuleSpec, cutoff: Cutoff },
    Compare { a: ModuleSpec, b: ModuleSpec, t: Vec<f64>, tol: f64 },
    Classify { r: u32, s: u32 },
    Family { sig: Signature, m: usize, t: Vec<f64> },
    Asymptotics { spec: ModuleSpec, convention: VolumeConvention },
    Probe { spec: ModuleSpec, t: Vec<f64>, required_slope: f64, convention: VolumeConvention },
    Reproduce(Scenario),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub task: Task,
    pub controls: TraceControls,
    pub output: Output,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TimeList {
    List(Vec<f64>),
    Text(String),
}

/// Keys accepted in the config file; each mirrors a flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    sig: Option<String>,
    module: Option<String>,
    alg: Option<PathBuf>,
    t: Option<TimeList>,
    tol: Option<f64>,
    tail_tol: Option<f64>,
    radius: Option<u32>,
    radius_cap: Option<u32>,
    theta_radius: Option<u32>,
    precision: Option<Precision>,
    kernel_model: Option<KernelModel>,
    operator: Option<Operator>,
    convention: Option<VolumeConvention>,
    format: Option<String>,
    out: Option<PathBuf>,
    m: Option<usize>,
    cutoff: Option<f64>,
    t_max: Option<f64>,
    t_min: Option<f64>,
    points: Option<usize>,
    required_slope: Option<f64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn parse_signature(text: &str) -> Result<Signature, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || usage(format!("--sig: expected `r,s` with nonnegative integers, got `{text}`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let r: u32 = parts[0].parse().map_err(|_| bad())?;
    let s: u32 = parts[1].parse().map_err(|_| bad())?;
    if r + s == 0 {
        return Err(usage("--sig: r + s must be positive"));
    }
    Ok(Signature::new(r, s))
}

/// `minimal`, `copies:K`, signs `p+:A,p-:B`, or sign and type
/// `p++:A,p-+:B,p+-:C,p--:D` (the second symbol is the irreducible type).
pub fn parse_module(sig: Signature, text: &str) -> Result<ModuleSpec, CliError> {
    let text = text.trim();
    if text == "minimal" {
        return Ok(ModuleSpec::minimal(sig));
    }
    let mut signs: Option<(usize, usize)> = None;
    let mut types: Option<[usize; 4]> = None;
    for item in text.split(',') {
        let (key, val) = item
            .split_once(':')
            .ok_or_else(|| usage(format!("--module: item `{item}` is not `key:count`")))?;
        let count: usize = val
            .trim()
            .parse()
            .map_err(|_| usage(format!("--module: count `{val}` is not a nonnegative integer")))?;
        match key.trim() {
            "copies" => return nonempty(ModuleSpec::copies(sig, count)),
            "p+" => signs.get_or_insert((0, 0)).0 += count,
            "p-" => signs.get_or_insert((0, 0)).1 += count,
            k @ ("p++" | "p-+" | "p+-" | "p--") => {
                if !has_two_types(sig) {
                    return Err(usage(format!("--module: `{k}` needs a signature with two irreducible types")));
                }
                let idx = ["p++", "p-+", "p+-", "p--"].iter().position(|x| *x == k).expect("matched");
                types.get_or_insert([0; 4])[idx] += count;
            }
            other => return Err(usage(format!("--module: unknown key `{other}`"))),
        }
    }
    let spec = match (signs, types) {
        (Some(_), Some(_)) => return Err(usage("--module: mix of `p+`/`p-` and typed keys")),
        (Some((a, b)), None) => ModuleSpec::with_signs(sig, a, b),
        (None, Some([pp, mp, pm, mm])) => ModuleSpec::with_types(sig, pp, mp, pm, mm),
        (None, None) => return Err(usage("--module: empty")),
    };
    nonempty(spec)
}

fn nonempty(spec: ModuleSpec) -> Result<ModuleSpec, CliError> {
    if spec.total_copies() == 0 {
        Err(usage("--module: no summands"))
    } else {
        Ok(spec)
    }
}

pub fn parse_times(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let ts: Vec<f64> = text
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{flag}: `{x}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(usage(format!("{flag}: times must be positive and finite")));
    }
    Ok(ts)
}

pub fn read_spec(path: &Path) -> Result<ModuleSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let spec: ModuleSpec =
        serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a module spec: {e}", path.display())))?;
    nonempty(spec)
}

struct Resolver {
    file: ConfigFile,
    base: PathBuf,
}

impl Resolver {
    fn file_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn spec(&self, a: &AlgebraArgs) -> Result<ModuleSpec, CliError> {
        let flag_inline = a.sig.is_some() || a.module.is_some();
        if flag_inline && a.alg.is_some() {
            return Err(usage("--sig/--module conflict with --alg; give one or the other"));
        }
        if let Some(p) = &a.alg {
            return read_spec(p);
        }
        if !flag_inline {
            if let Some(p) = &self.file.alg {
                if self.file.sig.is_some() || self.file.module.is_some() {
                    return Err(usage("config file sets both `alg` and `sig`/`module`"));
                }
                return read_spec(&self.file_path(p));
            }
        }
        let sig_text = a
            .sig
            .clone()
            .or_else(|| self.file.sig.clone())
            .ok_or_else(|| usage("missing --sig (or --alg)"))?;
        let sig = parse_signature(&sig_text)?;
        let module = a.module.clone().or_else(|| self.file.module.clone()).unwrap_or_else(|| "minimal".into());
        parse_module(sig, &module)
    }

    fn times(&self, flag: &Option<String>) -> Result<Option<Vec<f64>>, CliError> {
        if let Some(t) = flag {
            return parse_times(t, "--t").map(Some);
        }
        match &self.file.t {
            None => Ok(None),
            Some(TimeList::Text(s)) => parse_times(s, "config `t`").map(Some),
            Some(TimeList::List(v)) => {
                if v.is_empty() || v.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                    return Err(usage("config `t`: times must be positive and finite"));
                }
                Ok(Some(v.clone()))
            }
        }
    }

    fn controls(&self, c: &ControlArgs, tail_tol: Option<f64>) -> Result<TraceControls, CliError> {
        let d = TraceControls::default();
        let ctrl = TraceControls {
            lattice_radius: c.radius.or(self.file.radius).unwrap_or(d.lattice_radius),
            radius_cap: c.radius_cap.or(self.file.radius_cap).unwrap_or(d.radius_cap),
            theta_radius: c.theta_radius.or(self.file.theta_radius).unwrap_or(d.theta_radius),
            tail_tolerance: tail_tol.or(self.file.tail_tol).unwrap_or(d.tail_tolerance),
            precision: c
                .precision
                .map(|p| match p {
                    PrecisionArg::Double => Precision::Double,
                    PrecisionArg::Extended => Precision::Extended,
                })
                .or(self.file.precision)
                .unwrap_or(d.precision),
            kernel_model: c
                .kernel_model
                .map(|k| match k {
                    KernelModelArg::Parametrized => KernelModel::Parametrized,
                    KernelModelArg::Saturated => KernelModel::Saturated,
                })
                .or(self.file.kernel_model)
                .unwrap_or(d.kernel_model),
        };
        ctrl.validate().map_err(|e| usage(e.to_string()))?;
        Ok(ctrl)
    }

    fn convention(&self, c: Option<ConventionArg>, default: VolumeConvention) -> VolumeConvention {
        c.map(|c| match c {
            ConventionArg::Paper => VolumeConvention::Paper,
            ConventionArg::Lebesgue => VolumeConvention::Lebesgue,
        })
        .or(self.file.convention)
        .unwrap_or(default)
    }

    fn output(&self, o: &OutputArgs, default: Format, csv_ok: bool) -> Result<Output, CliError> {
        let format = match o.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Json) => Format::Json,
            None => match self.file.format.as_deref() {
                None => default,
                Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                Some(other) => return Err(usage(format!("config `format`: unknown value `{other}`"))),
            },
        };
        if format == Format::Csv && !csv_ok {
            return Err(usage("--format csv is not available for this command"));
        }
        let path = o.out.clone().or_else(|| self.file.out.as_ref().map(|p| self.file_path(p)));
        Ok(Output { path, format })
    }
}

/// Parses `argv` (including the program name) and the config file it names.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (file, base) = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            let file: ConfigFile =
                toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?;
            (file, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (ConfigFile::default(), PathBuf::new()),
    };
    resolve(cli.command, &Resolver { file, base })
}

fn resolve(cmd: Command, res: &Resolver) -> Result<RunConfig, CliError> {
    let default_ctrl = TraceControls::default();
    let f = &res.file;
    let cfg = match cmd {
        Command::DumpModule { alg, output } => RunConfig {
            command: CommandKind::DumpModule,
            task: Task::DumpModule { spec: res.spec(&alg)? },
            controls: default_ctrl,
            output: res.output(&output, Format::Json, false)?,
        },
        Command::DumpAlgebra { alg, output } => RunConfig {
            command: CommandKind::DumpAlgebra,
            task: Task::DumpAlgebra { spec: res.spec(&alg)? },
            controls: default_ctrl,
            output: res.output(&output, Format::Json, false)?,
        },
        Command::Trace {
            alg,
            controls,
            operator,
            output,
        } => {
            let t = res.times(&controls.t)?.ok_or_else(|| usage("trace needs --t"))?;
            let operator = operator
                .map(|o| match o {
                    OperatorArg::SubLaplacian => Operator::SubLaplacian,
                    OperatorArg::Laplacian => Operator::Laplacian,
                })
                .or(f.operator)
                .unwrap_or_default();
            RunConfig {
                command: CommandKind::Trace,
                task: Task::Trace {
                    spec: res.spec(&alg)?,
                    t,
                    operator,
                },
                controls: res.controls(&controls, controls.tol.or(f.tol))?,
                output: res.output(&output, Format::Csv, true)?,
            }
        }
        Command::Spectrum {
            alg,
            cutoff,
            controls,
            output,
        } => {
            let cutoff = match (cutoff.or(f.cutoff), res.times(&controls.t)?) {
                (Some(c), None) if c > 0.0 && c.is_finite() => Cutoff::Fixed(c),
                (Some(_), None) => return Err(usage("--cutoff must be positive")),
                (None, Some(t)) if t.len() == 1 => {
                    let tol = controls.tol.or(f.tol).unwrap_or(1e-14);
                    if !(tol > 0.0) {
                        return Err(usage("--tol must be positive"));
                    }
                    Cutoff::ForTime { t: t[0], tol }
                }
                (None, Some(_)) => return Err(usage("spectrum takes a single --t")),
                (Some(_), Some(_)) => return Err(usage("give either --cutoff or --t, not both")),
                (None, None) => return Err(usage("spectrum needs --cutoff or --t")),
            };
            RunConfig {
                command: CommandKind::Spectrum,
                task: Task::Spectrum {
                    spec: res.spec(&alg)?,
                    cutoff,
                },
                controls: default_ctrl,
                output: res.output(&output, Format::Csv, true)?,
            }
        }
        Command::Compare {
            spec_a,
            spec_b,
            t,
            tol,
            tail_tol,
            output,
        } => {
            let t = res.times(&t)?.unwrap_or_else(|| vec![0.2, 0.5, 1.0]);
            let tol = tol.or(f.tol).unwrap_or(1e-10);
            if !(tol > 0.0) {
                return Err(usage("--tol must be positive"));
            }
            RunConfig {
                command: CommandKind::Compare,
                task: Task::Compare {
                    a: read_spec(&spec_a)?,
                    b: read_spec(&spec_b)?,
                    t,
                    tol,
                },
                controls: res.controls(&ControlArgs::default(), tail_tol)?,
                output: res.output(&output, Format::Json, false)?,
            }
        }
        Command::Classify { r, s, output } => {
            if r + s == 0 {
                return Err(usage("--r + --s must be positive"));
            }
            RunConfig {
                command: CommandKind::Classify,
                task: Task::Classify { r, s },
                controls: default_ctrl,
                output: res.output(&output, Format::Json, false)?,
            }
        }
        Command::Family { sig, m, t, output } => {
            let sig = parse_signature(&sig.or_else(|| f.sig.clone()).ok_or_else(|| usage("family needs --sig"))?)?;
            let m = m.or(f.m).ok_or_else(|| usage("family needs --m"))?;
            if m == 0 {
                return Err(usage("--m must be at least 1"));
            }
            RunConfig {
                command: CommandKind::Family,
                task: Task::Family {
                    sig,
                    m,
                    t: res.times(&t)?.unwrap_or_default(),
                },
                controls: default_ctrl,
                output: res.output(&output, Format::Json, false)?,
            }
        }
        Command::Asymptotics {
            alg,
            convention,
            output,
        } => RunConfig {
            command: CommandKind::Asymptotics,
            task: Task::Asymptotics {
                spec: res.spec(&alg)?,
                convention: res.convention(convention, VolumeConvention::Paper),
            },
            controls: default_ctrl,
            output: res.output(&output, Format::Json, false)?,
        },
        Command::ProbeExpansion {
            alg,
            t_max,
            t_min,
            points,
            required_slope,
            convention,
            controls,
            output,
        } => {
            let t = match res.times(&controls.t)? {
                Some(mut t) => {
                    t.sort_by(|a, b| b.total_cmp(a));
                    t.dedup();
                    t
                }
                None => {
                    let hi = t_max.or(f.t_max).unwrap_or(0.2);
                    let lo = t_min.or(f.t_min).unwrap_or(0.05);
                    let k = points.or(f.points).unwrap_or(12);
                    if !(lo > 0.0 && lo < hi && hi <= 0.5) || k < 2 {
                        return Err(usage("probe needs 0 < --t-min < --t-max ≤ 0.5 and --points ≥ 2"));
                    }
                    (0..k).map(|i| hi * (lo / hi).powf(i as f64 / (k - 1) as f64)).collect()
                }
            };
            let mut ctrl = res.controls(&controls, controls.tol.or(f.tol).or(Some(1e-12)))?;
            if controls.radius_cap.or(f.radius_cap).is_none() {
                ctrl.radius_cap = 2000;
            }
            RunConfig {
                command: CommandKind::ProbeExpansion,
                task: Task::Probe {
                    spec: res.spec(&alg)?,
                    t,
                    required_slope: required_slope.or(f.required_slope).unwrap_or(6.0),
                    convention: res.convention(convention, VolumeConvention::Lebesgue),
                },
                controls: ctrl,
                output: res.output(&output, Format::Csv, true)?,
            }
        }
        Command::Reproduce { scenario, output } => RunConfig {
            command: CommandKind::Reproduce,
            task: Task::Reproduce(scenario),
            controls: default_ctrl,
            output: res.output(&output, Format::Json, false)?,
        },
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_config(std::iter::once("htype").chain(args.iter().copied()))
    }

    #[test]
    fn trace_flags() {
        let c = parse(&["trace", "--sig", "1,0", "--module", "minimal", "--t", "0.1,0.5", "--tol", "1e-10"]).unwrap();
        assert_eq!(c.command, CommandKind::Trace);
        assert_eq!(c.controls.tail_tolerance, 1e-10);
        match c.task {
            Task::Trace { spec, t, operator } => {
                assert_eq!(spec, ModuleSpec::minimal(Signature::new(1, 0)));
                assert_eq!(t, vec![0.1, 0.5]);
                assert_eq!(operator, Operator::SubLaplacian);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn family_flags() {
        let c = parse(&["family", "--sig", "3,1", "--m", "2", "--out", "fam.json"]).unwrap();
        assert_eq!(c.task, Task::Family { sig: Signature::new(3, 1), m: 2, t: vec![] });
        assert_eq!(c.output.path, Some(PathBuf::from("fam.json")));
    }

    #[test]
    fn module_grammar() {
        let s31 = Signature::new(3, 1);
        assert_eq!(parse_module(s31, "p+:1,p-:3").unwrap().sign_counts(), (1, 3));
        assert_eq!(parse_module(s31, "copies:2").unwrap().total_copies(), 2);
        assert!(parse_module(s31, "p++:1").is_err());
        let s30 = Signature::new(3, 0);
        let m = parse_module(s30, "p++:1,p-+:1").unwrap();
        assert_eq!(m, ModuleSpec::with_types(s30, 1, 1, 0, 0));
        assert!(parse_module(s30, "p+:1,p++:1").is_err());
        assert!(parse_module(s30, "q:1").is_err());
        assert!(parse_module(s30, "p+:0").is_err());
    }

    #[test]
    fn usage_errors() {
        assert!(matches!(parse(&["trace", "--sig", "1,0"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["trace", "--sig", "x", "--t", "1"]), Err(CliError::Usage(_))));
        assert!(matches!(
            parse(&["trace", "--sig", "1,0", "--alg", "a.json", "--t", "1"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(parse(&["trace", "--bogus"]), Err(CliError::Clap(_))));
        assert!(matches!(parse(&["classify", "--r", "0", "--s", "0"]), Err(CliError::Usage(_))));
        assert!(matches!(
            parse(&["classify", "--r", "1", "--s", "0", "--format", "csv"]),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn file_values_and_overrides() {
        let dir = std::env::temp_dir().join(format!("htype-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("run.toml");
        std::fs::write(&p, "sig = \"1,3\"\nt = [0.2, 0.4]\ntol = 1e-9\nkernel-model = \"saturated\"\n").unwrap();
        let ps = p.to_str().unwrap();
        let c = parse(&["--config", ps, "trace", "--t", "0.3"]).unwrap();
        assert_eq!(c.controls.tail_tolerance, 1e-9);
        assert_eq!(c.controls.kernel_model, KernelModel::Saturated);
        match c.task {
            Task::Trace { spec, t, .. } => {
                assert_eq!(spec.signature, Signature::new(1, 3));
                assert_eq!(t, vec![0.3]);
            }
            other => panic!("{other:?}"),
        }
        std::fs::write(&p, "sig = \"1,3\"\nwhatever = 1\n").unwrap();
        assert!(matches!(parse(&["--config", ps, "trace", "--t", "0.3"]), Err(CliError::Usage(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
