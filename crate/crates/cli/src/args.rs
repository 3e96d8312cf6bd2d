use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "htype", version, about = "Pseudo H-type nilmanifolds: modules, heat traces, isospectrality")]
pub struct Cli {
    /// TOML file supplying defaults; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AlgebraArgs {
    /// Signature `r,s` of the centre.
    #[arg(long, value_name = "R,S")]
    pub sig: Option<String>,
    /// `minimal`, `copies:K`, `p+:A,p-:B` or `p++:A,p-+:B,p+-:C,p--:D`.
    #[arg(long, value_name = "SPEC")]
    pub module: Option<String>,
    /// Module spec as JSON.
    #[arg(long, value_name = "FILE")]
    pub alg: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ControlArgs {
    /// Comma-separated times.
    #[arg(long = "t", value_name = "T,...")]
    pub t: Option<String>,
    /// Absolute tail tolerance.
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "R")]
    pub radius: Option<u32>,
    #[arg(long, value_name = "R")]
    pub radius_cap: Option<u32>,
    #[arg(long, value_name = "K")]
    pub theta_radius: Option<u32>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    #[arg(long, value_enum)]
    pub kernel_model: Option<KernelModelArg>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelModelArg {
    Parametrized,
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    SubLaplacian,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Paper,
    Lebesgue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    #[value(name = "pair-12d")]
    Pair12d,
    #[value(name = "family-11d")]
    Family11d,
    #[value(name = "heisenberg-match")]
    HeisenbergMatch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the generators and metric of an admissible module.
    DumpModule {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print structure constants and lattice data of the algebra.
    DumpAlgebra {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Heat trace at the given times.
    Trace {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        controls: ControlArgs,
        #[arg(long, value_enum)]
        operator: Option<OperatorArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Explicit spectrum for s = 0, up to `--cutoff` or to the cutoff a
    /// single `--t` needs for `--tol`.
    Spectrum {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        cutoff: Option<f64>,
        #[command(flatten)]
        controls: ControlArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare two module specs structurally and numerically.
    Compare {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long = "t", value_name = "T,...")]
        t: Option<String>,
        /// Relative tolerance for calling the traces indistinguishable.
        #[arg(long, value_name = "TOL")]
        tol: Option<f64>,
        /// Absolute tail tolerance of each trace.
        #[arg(long, value_name = "TOL")]
        tail_tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Relation between the minimal-module algebras of (r,s) and (s,r).
    Classify {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Isospectral, pairwise non-isomorphic family for (3,1) or (3,0).
    Family {
        #[arg(long, value_name = "R,S")]
        sig: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        /// Also compare traces pairwise at these times.
        #[arg(long = "t", value_name = "T,...")]
        t: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Leading heat-trace coefficient and the Heisenberg match.
    Asymptotics {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decay of the trace difference against the matched Heisenberg manifold.
    ProbeExpansion {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        required_slope: Option<f64>,
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        #[command(flatten)]
        controls: ControlArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Canned scenarios with their expected facts checked.
    Reproduce {
        #[arg(value_enum)]
        scenario: Scenario,
        #[command(flatten)]
        output: OutputArgs,
    },
}
