use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use gordon_core::bailey::{build_chain_trace, ChainStage};
use gordon_core::identities::{verify, IdentitySpec, Theorem, VerificationReport};
use gordon_core::lattice_paths::{enumerate_s, EStepRule, LatticePath};
use gordon_core::partitions::{table, Family, GordonParams};
use gordon_core::qseries::int;

#[derive(Parser)]
#[command(name = "gordon", version, about = "Exact checks of Andrews–Gordon type identities with parity restrictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    Ag,
    W,
    Wbar,
    Main,
    Paths,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathFormat {
    Compact,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Compare both sides of one identity below q^order.
    Verify {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: u32,
        /// Defaults to 40, or 20 for `paths`.
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Partition counts for n = 0..=N from the exhaustive oracle.
    Count {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Admissible lattice paths with major index at most N.
    EnumeratePaths {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "before-each")]
        rule: EStepRule,
        #[arg(long, value_enum, default_value = "compact")]
        format: PathFormat,
        /// File for compact/json output; directory for svg.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the Bailey chain for (k, a) and check every stage.
    BaileyChain {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: u32,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        /// Series order in q on the half-integer grid.
        #[arg(long, default_value_t = 20)]
        order: i64,
        /// Emit every stage's α/β tables as JSON.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify over a grid of (k, a); cells outside a theorem's hypothesis are skipped.
    Sweep {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "ag,w,wbar,main")]
        theorem: Vec<TheoremArg>,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, env = "GORDON_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn params(k: u32, a: u32) -> Result<GordonParams, Failure> {
    GordonParams::new(k, a).map_err(usage)
}

fn resolve(t: TheoremArg, gp: GordonParams) -> Option<Theorem> {
    match t {
        TheoremArg::Ag => Some(Theorem::AG),
        TheoremArg::W => Some(Theorem::for_w(gp)),
        TheoremArg::Wbar => Theorem::for_wbar(gp),
        TheoremArg::Main => Some(Theorem::Main).filter(|t| t.accepts(gp)),
        TheoremArg::Paths => Some(Theorem::Paths).filter(|t| t.accepts(gp)),
    }
}

fn default_order(t: TheoremArg) -> u32 {
    if t == TheoremArg::Paths {
        20
    } else {
        40
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("wire types serialize") + "\n"
}

fn report_line(r: &VerificationReport) -> String {
    let head = format!("{} {} order {}", r.spec.theorem, r.spec.params, r.spec.order);
    match &r.first_discrepancy {
        None => format!("{}: pass\n", head),
        Some((e, l, rr)) => format!("{}: FAIL at q^{} (lhs {}, rhs {})\n", head, e, l, rr),
    }
}

fn run_verify(theorem: TheoremArg, k: u32, a: u32, order: Option<u32>, json: bool, output: Option<PathBuf>) -> Result<bool, Failure> {
    let gp = params(k, a)?;
    let t = resolve(theorem, gp).ok_or_else(|| usage(format!("the requested identity does not apply to {}", gp)))?;
    let spec = IdentitySpec::new(t, gp, order.unwrap_or(default_order(theorem))).map_err(usage)?;
    let report = verify(&spec);
    emit(&output, &if json { to_json(&report) } else { report_line(&report) })?;
    Ok(report.equal)
}

#[derive(Serialize)]
struct CountOut {
    family: String,
    k: u32,
    a: u32,
    counts: Vec<u64>,
}

fn run_count(family: Family, k: u32, a: u32, n: u32, json: bool, output: Option<PathBuf>) -> Result<bool, Failure> {
    let gp = params(k, a)?;
    let counts = table(family, gp, n);
    let text = if json {
        to_json(&CountOut { family: family.to_string(), k, a, counts })
    } else {
        serde_json::to_string(&counts).expect("integers serialize") + "\n"
    };
    emit(&output, &text)?;
    Ok(true)
}

fn run_paths(k: u32, a: u32, n: u64, rule: EStepRule, format: PathFormat, output: Option<PathBuf>) -> Result<bool, Failure> {
    let gp = params(k, a)?;
    let paths: Vec<LatticePath> = enumerate_s(gp, n, rule);
    match format {
        PathFormat::Compact => {
            let text: String = paths.iter().map(|p| format!("{}\t{}\n", p.major_index(), p.to_compact())).collect();
            emit(&output, &text)?;
        }
        PathFormat::Json => emit(&output, &to_json(&paths))?,
        PathFormat::Svg => {
            let dir = output.ok_or_else(|| usage("svg output needs --output DIR"))?;
            fs::create_dir_all(&dir)?;
            for (i, p) in paths.iter().enumerate() {
                fs::write(dir.join(format!("path_{:04}_mi{}.svg", i, p.major_index())), p.to_svg())?;
            }
        }
    }
    Ok(true)
}

fn stage_name(s: &ChainStage) -> String {
    match (s.transform, s.argument) {
        (None, _) => "unit".to_string(),
        (Some(t), Some(x)) => format!("{}(A={})", t, x),
        (Some(t), None) => t.to_string(),
    }
}

fn run_chain(k: u32, a: u32, nmax: usize, order: i64, trace: bool, output: Option<PathBuf>) -> Result<bool, Failure> {
    let gp = params(k, a)?;
    if order < 0 {
        return Err(usage("order must be nonnegative"));
    }
    let stages = build_chain_trace(gp, nmax, int(order)).map_err(usage)?;
    let ok = stages.iter().all(|s| s.valid);
    let text = if trace {
        to_json(&stages)
    } else {
        let mut t = String::new();
        for s in &stages {
            t += &format!("{}: {}\n", stage_name(s), if s.valid { "pair" } else { "NOT a pair" });
        }
        t
    };
    emit(&output, &text)?;
    Ok(ok)
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum Cell {
    Pass { theorem: String, k: u32, a: u32, order: u32 },
    Fail { theorem: String, k: u32, a: u32, order: u32, at: String },
    SkippedInvalid { k: u32, a: u32, requested: String },
}

fn theorem_arg_name(t: TheoremArg) -> String {
    t.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn run_sweep(
    theorems: Vec<TheoremArg>,
    k_min: u32,
    k_max: u32,
    order: Option<u32>,
    jobs: Option<usize>,
    json: bool,
    output: Option<PathBuf>,
) -> Result<bool, Failure> {
    if k_min == 0 {
        return Err(usage("k must be at least 1"));
    }
    let grid: Vec<(TheoremArg, u32, u32)> =
        theorems.iter().flat_map(|&t| (k_min..=k_max).flat_map(move |k| (1..=k).map(move |a| (t, k, a)))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build().map_err(usage)?;
    let cells: Vec<Cell> = pool.install(|| {
        grid.par_iter()
            .map(|&(t, k, a)| {
                let gp = GordonParams::new(k, a).expect("grid keeps 1 <= a <= k");
                let o = order.unwrap_or(default_order(t));
                match resolve(t, gp) {
                    None => Cell::SkippedInvalid { k, a, requested: theorem_arg_name(t) },
                    Some(th) => {
                        let r = verify(&IdentitySpec::new(th, gp, o).expect("resolved theorem applies"));
                        match r.first_discrepancy {
                            None => Cell::Pass { theorem: th.to_string(), k, a, order: o },
                            Some((e, _, _)) => Cell::Fail { theorem: th.to_string(), k, a, order: o, at: e },
                        }
                    }
                }
            })
            .collect()
    });
    let ok = !cells.iter().any(|c| matches!(c, Cell::Fail { .. }));
    let text = if json {
        to_json(&cells)
    } else {
        let mut t = String::new();
        for c in &cells {
            t += &match c {
                Cell::Pass { theorem, k, a, order } => format!("{:<14} k={} a={} order={} pass\n", theorem, k, a, order),
                Cell::Fail { theorem, k, a, order, at } => {
                    format!("{:<14} k={} a={} order={} FAIL at q^{}\n", theorem, k, a, order, at)
                }
                Cell::SkippedInvalid { k, a, requested } => format!("{:<14} k={} a={} skipped-invalid\n", requested, k, a),
            };
        }
        t
    };
    emit(&output, &text)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { theorem, k, a, order, json, output } => run_verify(theorem, k, a, order, json, output),
        Command::Count { family, k, a, n, json, output } => run_count(family, k, a, n, json, output),
        Command::EnumeratePaths { k, a, n, rule, format, output } => run_paths(k, a, n, rule, format, output),
        Command::BaileyChain { k, a, nmax, order, trace, output } => run_chain(k, a, nmax, order, trace, output),
        Command::Sweep { theorem, k_min, k_max, order, jobs, json, output } => {
            run_sweep(theorem, k_min, k_max, order, jobs, json, output)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
