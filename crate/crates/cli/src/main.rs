//! `strata`: command-line front end over JSON inputs.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "strata",
    version,
    about = "Matrix-bundle stratification, Jordanizability probes and formal deformation solvers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Numerical tolerance; overrides the module default.
    #[arg(long, global = true, env = "STRATA_TOL")]
    pub tol: Option<f64>,
    /// Coefficient arithmetic; `auto` is exact when every input number is
    /// an integer or a rational string.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Exact,
    Float,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integer partitions and Segre symbols.
    #[command(subcommand)]
    Partitions(PartitionsCmd),
    /// Bundles, degenerations and the closure order.
    #[command(subcommand)]
    Bundles(BundlesCmd),
    /// Gap distance, kernels and the Jordanizability report.
    #[command(subcommand)]
    Gap(GapCmd),
    /// Generalized Darboux–Egoroff jets.
    #[command(subcommand)]
    De(DeCmd),
    /// Connection frames and formal gauge simplification.
    #[command(subcommand)]
    Gauge(GaugeCmd),
    /// Pfaffian systems and 2×2 deformation models.
    #[command(subcommand)]
    Appendix(AppendixCmd),
}

#[derive(Subcommand, Debug)]
pub enum PartitionsCmd {
    /// Lists partitions of n (r = 1) or Segre symbols of weight n (r = 2).
    List {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Number of r-fold partitions of n.
    Count {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u32,
    },
    /// Conjugates a partition `[3,1]` or every member of a symbol `[[2,1],[1]]`.
    Conjugate {
        #[arg(long)]
        symbol: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum BundlesCmd {
    /// Codimension, dimension and flags of a symbol such as `[[2],[1,1]]`.
    Describe {
        #[arg(long)]
        symbol: String,
    },
    /// Immediate degenerations of a symbol.
    Moves {
        #[arg(long)]
        symbol: String,
    },
    /// Whether the bundle of `a` lies in the closure of the bundle of `b`.
    Closure {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Hasse diagram of the closure order for n × n matrices.
    Hasse {
        #[arg(long)]
        n: u32,
        /// Keep only covering relations.
        #[arg(long)]
        reduced: bool,
    },
    /// Segre symbol of a constant matrix `{"matrix": [[c]]}`.
    Classify {
        #[arg(long)]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum GapCmd {
    /// Gap distance between `{"a": subspace, "b": subspace}`.
    Distance {
        #[arg(long)]
        input: String,
    },
    /// Kernel of `{"matrix": [[c]]}`, or kernel-sheaf value of
    /// `{"family": one-variable family, "x0": c}`.
    Kernel {
        #[arg(long)]
        input: String,
    },
    /// Jordanizability report for `{"family", "x0", "paths"?}`.
    Report {
        #[arg(long)]
        input: String,
        #[arg(long)]
        limit_tol: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum DeCmd {
    /// Residuals of `{"jet": series matrix}` added to a problem.
    Residual {
        #[arg(long)]
        input: String,
        #[arg(long)]
        order: u32,
    },
    /// Jet of the solution with initial value `F0`.
    Solve {
        #[arg(long)]
        input: String,
        #[arg(long)]
        order: u32,
    },
    /// Jet from the degree-by-degree linear solve.
    Oracle {
        #[arg(long)]
        input: String,
        #[arg(long)]
        order: u32,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplifyModeArg {
    Regular,
    Coalescent,
}

#[derive(Subcommand, Debug)]
pub enum GaugeCmd {
    /// Derived frame `(𝔅, ω)` of a connection.
    Build {
        #[arg(long)]
        input: String,
    },
    /// Gauge residual of the connection with `{"Phi": gauge series}`.
    Residual {
        #[arg(long)]
        input: String,
    },
    /// Formal gauge series `F_1..F_K`.
    Simplify {
        #[arg(long)]
        input: String,
        #[arg(long)]
        order: u32,
        #[arg(long = "recursion", value_enum, default_value_t = SimplifyModeArg::Regular)]
        recursion: SimplifyModeArg,
    },
    /// Integrability residuals and dv-type witness of a frame
    /// `{Delta0, B, varpi}`.
    Witness {
        #[arg(long)]
        input: String,
    },
    /// Ratio report along `{"pair": [i, j], "path": {...}}`.
    Holcon {
        #[arg(long)]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum AppendixCmd {
    /// Pfaffian residual of `{"A0", "B0", "K"}`.
    Pfaffian {
        #[arg(long)]
        input: String,
        #[arg(long)]
        order: u32,
    },
    /// Samples the exponential integral curve through `(α0, β0, γ0)`.
    Curve {
        #[arg(long, allow_negative_numbers = true)]
        alpha0: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta0: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma0: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: u32,
    },
    /// Monomial integral families for `c = p/q`.
    Families {
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long)]
        q: i64,
    },
    /// Type of `{"d", "x0"?, "g", "h", "l", "m"}`.
    Classify2x2 {
        #[arg(long)]
        input: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Partitions(c) => commands::partitions(c, &cli.global),
        Command::Bundles(c) => commands::bundles(c, &cli.global),
        Command::Gap(c) => commands::gap(c, &cli.global),
        Command::De(c) => commands::de(c, &cli.global),
        Command::Gauge(c) => commands::gauge(c, &cli.global),
        Command::Appendix(c) => commands::appendix(c, &cli.global),
    };
    match result {
        Ok(out) => {
            io::emit(&out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            io::emit_error(&e);
            ExitCode::from(2)
        }
    }
}
