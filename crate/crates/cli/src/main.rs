//! `mono-spectrum`: exact weights, templates, enumerators and oracles for
//! decreasing monomial codes.

mod caps;
mod commands;
mod input;
mod output;
mod selftest;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use caps::Caps;
use commands::{Ctx, EnumArgs, EnumTemplate, OrbitArgs};
use input::Labels;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or a refused cap; exit code 2.
    Usage(String),
    Lib(mono_spectrum::Error),
}

impl From<mono_spectrum::Error> for CliError {
    fn from(e: mono_spectrum::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            // A failed internal identity is a mismatch, not bad input.
            CliError::Lib(mono_spectrum::Error::Invariant(_)) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized runs; echoed in JSON output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest m for truth-table evaluation.
    #[arg(long, global = true)]
    cap_m: Option<usize>,
    /// Largest m for explicit LTA orbits.
    #[arg(long, global = true)]
    cap_orbit: Option<usize>,
    /// Largest code dimension for exhaustive enumeration.
    #[arg(long, global = true)]
    cap_dim: Option<usize>,
    /// Compare closed forms with oracles when caps allow (default).
    #[arg(long, global = true, overrides_with = "no_verify")]
    verify: bool,
    /// Skip oracle comparisons.
    #[arg(long, global = true, overrides_with = "verify")]
    no_verify: bool,
    /// Read variables as x1..xm instead of x0..x(m-1).
    #[arg(long, global = true)]
    one_based: bool,
    /// Close non-decreasing code specs instead of rejecting them.
    #[arg(long, global = true)]
    auto_close: bool,
}

#[derive(Debug, Parser)]
#[command(name = "mono-spectrum", version, about = "Exact codeword weights for decreasing monomial codes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Weight of a polynomial from the inclusion-exclusion formula and by evaluation.
    Weight {
        poly: String,
        #[arg(long)]
        m: usize,
    },
    /// Dyadic digits of Σ for a polynomial, or of a given value.
    Dyadic {
        poly: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        /// A dyadic rational such as 37/16.
        #[arg(long, conflicts_with = "poly")]
        sigma: Option<String>,
    },
    /// Builds a template from JSON (inline or a file) and checks its closed form.
    Template { spec: String },
    /// Decreasing-set utilities.
    Code {
        #[command(subcommand)]
        cmd: CodeCmd,
    },
    /// Counts codewords of a template family from orbit formulas.
    Enumerate {
        code: String,
        #[arg(long, value_enum, default_value_t = EnumTemplate::DisjointKSum)]
        template: EnumTemplate,
        /// Term degree; defaults to the code's top degree.
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Count ordered tuples instead of sets.
        #[arg(long)]
        ordered: bool,
    },
    /// Exhaustive weight distribution, or classification of one weight class.
    Spectrum {
        code: String,
        #[arg(long, value_name = "WEIGHT")]
        classify: Option<u64>,
    },
    /// Explicit LTA orbit of a polynomial.
    Orbit {
        poly: String,
        #[arg(long)]
        m: usize,
        /// Act only with the stabilizer of this head monomial.
        #[arg(long)]
        fix_head: Option<String>,
        /// List the orbit members.
        #[arg(long)]
        elements: bool,
        /// Evaluate the head/kernel orbit-size formula against explicit orbits.
        #[arg(long)]
        master: bool,
    },
    /// Randomized self-checks of every closed form.
    Selftest {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
enum CodeCmd {
    /// Checks that a spec is decreasing and lists what is missing.
    Validate { spec: String },
    /// Smallest decreasing set containing the spec.
    Closure { spec: String },
    /// Generator matrix rows as hex.
    Matrix { spec: String },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Weight { .. } => "weight",
            Cmd::Dyadic { .. } => "dyadic",
            Cmd::Template { .. } => "template",
            Cmd::Code { cmd: CodeCmd::Validate { .. } } => "code validate",
            Cmd::Code { cmd: CodeCmd::Closure { .. } } => "code closure",
            Cmd::Code { cmd: CodeCmd::Matrix { .. } } => "code matrix",
            Cmd::Enumerate { .. } => "enumerate",
            Cmd::Spectrum { .. } => "spectrum",
            Cmd::Orbit { .. } => "orbit",
            Cmd::Selftest { .. } => "selftest",
        }
    }
}

fn caps(g: &Global) -> Result<Caps, CliError> {
    let mut caps = Caps::default();
    if let Ok(text) = std::env::var(caps::ENV_VAR) {
        caps = caps.with_env(&text).map_err(CliError::Usage)?;
    }
    caps.eval_m = g.cap_m.unwrap_or(caps.eval_m);
    caps.orbit_m = g.cap_orbit.unwrap_or(caps.orbit_m);
    caps.dim = g.cap_dim.unwrap_or(caps.dim);
    caps.check().map_err(CliError::Usage)
}

fn run(cli: &Cli) -> Result<(output::Reply, Caps), CliError> {
    let g = &cli.global;
    let ctx = Ctx { caps: caps(g)?, verify: !g.no_verify, auto_close: g.auto_close, labels: Labels { one_based: g.one_based } };
    let reply = match &cli.cmd {
        Cmd::Weight { poly, m } => commands::weight(&ctx, poly, *m)?,
        Cmd::Dyadic { poly, m, sigma } => commands::dyadic(&ctx, poly.as_deref(), *m, sigma.as_deref())?,
        Cmd::Template { spec } => commands::template(&ctx, spec)?,
        Cmd::Code { cmd: CodeCmd::Validate { spec } } => commands::code_validate(&ctx, spec)?,
        Cmd::Code { cmd: CodeCmd::Closure { spec } } => commands::code_closure(&ctx, spec)?,
        Cmd::Code { cmd: CodeCmd::Matrix { spec } } => commands::code_matrix(&ctx, spec)?,
        Cmd::Enumerate { code, template, r, k, ordered } => {
            commands::enumerate(&ctx, code, EnumArgs { template: *template, r: *r, k: *k, ordered: *ordered })?
        }
        Cmd::Spectrum { code, classify } => commands::spectrum(&ctx, code, *classify)?,
        Cmd::Orbit { poly, m, fix_head, elements, master } => commands::orbit(
            &ctx,
            OrbitArgs { poly, m: *m, fix_head: fix_head.as_deref(), elements: *elements, master: *master },
        )?,
        Cmd::Selftest { count } => selftest::run(g.seed, *count)?,
    };
    Ok((reply, ctx.caps))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (reply, caps) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    let text = match cli.global.format {
        Format::Csv => reply.csv(),
        Format::Json => {
            let doc = json!({
                "command": cli.cmd.name(),
                "config": {
                    "seed": cli.global.seed,
                    "caps": caps,
                    "verify": !cli.global.no_verify,
                    "one_based": cli.global.one_based,
                },
                "status": match reply.status {
                    output::Status::Ok => "ok",
                    output::Status::Mismatch => "mismatch",
                    output::Status::Incomplete => "incomplete",
                },
                "result": reply.json,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(reply.status.code())
}
