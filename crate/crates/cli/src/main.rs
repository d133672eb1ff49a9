use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latesched_core::gen::{gen_instance, BudgetPolicy, GenParams};
use latesched_core::io::{parse_instance, write_instance, write_oracle, write_result, write_trace_csv, OracleDocument};
use latesched_core::verify::{run_verify, VerifyConfig};
use latesched_core::{
    delta_min, extract_kernels, initial_schedule, oracle_compressible, oracle_generic, solve, Algorithm,
    CompressionVector, Error, Instance, OracleLimits,
};

/// Single-machine scheduling with compressible processing times.
#[derive(Parser)]
#[command(name = "latesched", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write a result document.
    Solve {
        #[arg(long, value_enum)]
        alg: SolveAlg,
        #[arg(long)]
        input: PathBuf,
        /// Result document path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include the iteration trace in the result document.
        #[arg(long)]
        trace: bool,
        /// Also export the trace as CSV (h, lambda, delta_min, L, cost).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print blocks, gaps, kernels and Δ values of the initial ED-schedule.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a random instance document.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Instance document path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate, solve and check a batch of instances against the oracles.
    Verify {
        #[arg(long, value_enum)]
        alg: VerifyAlg,
        #[arg(long)]
        trials: usize,
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Exact optima of an instance by exhaustive search.
    Oracle {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Number of jobs.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    max_processing: i64,
    #[arg(long, default_value_t = 30)]
    horizon: i64,
    #[arg(long, default_value_t = 3)]
    cost_max: i64,
    /// `zero`, `unbounded` or `fraction:F`.
    #[arg(long, default_value = "fraction:0.5")]
    budget: String,
}

impl GenArgs {
    fn params(&self) -> Result<GenParams, CliError> {
        Ok(GenParams {
            n: self.n,
            seed: self.seed,
            max_processing: self.max_processing,
            horizon: self.horizon,
            cost_max: self.cost_max,
            budget: BudgetPolicy::parse(&self.budget)?,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveAlg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

impl From<SolveAlg> for Algorithm {
    fn from(a: SolveAlg) -> Self {
        match a {
            SolveAlg::One => Algorithm::Alg1,
            SolveAlg::Two => Algorithm::Alg2,
            SolveAlg::Three => Algorithm::Alg3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyAlg {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

enum CliError {
    Usage(String),
    Core(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::OracleLimit(_)) => 2,
            _ => 1,
        }
    }
}

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("latesched: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve { alg, input, output, trace, csv } => {
            let instance = read_instance(&input)?;
            let outcome = solve(alg.into(), &instance)?;
            emit(output.as_deref(), &write_result(&outcome, &instance, trace))?;
            if let Some(path) = csv {
                let file = fs::File::create(&path).map_err(|e| CliError::Io(path.clone(), e))?;
                write_trace_csv(&outcome.trace, file).map_err(|e| CliError::Io(path, e))?;
            }
            Ok(if outcome.feasible { 0 } else { EXIT_INFEASIBLE })
        }
        Command::Analyze { input } => {
            let instance = read_instance(&input)?;
            emit(None, &analyze(&instance)?)?;
            Ok(0)
        }
        Command::Gen { gen, output } => {
            let instance = gen_instance(&gen.params()?)?;
            emit(output.as_deref(), &write_instance(&instance))?;
            Ok(0)
        }
        Command::Verify { alg, trials, gen } => {
            let algorithm = match alg {
                VerifyAlg::Two => Algorithm::Alg2,
                VerifyAlg::Three => Algorithm::Alg3,
            };
            let config = VerifyConfig { algorithm, trials, seed: gen.seed, params: gen.params()?, limits: limits()? };
            let report = run_verify(&config)?;
            let mut out = String::new();
            for t in &report.trials {
                let status = if t.violations.is_empty() { "ok" } else { "VIOLATION" };
                out.push_str(&format!(
                    "trial {} seed {}: L={} cost={} generic_opt={} certificate={} {status}\n",
                    t.trial, t.seed, t.max_lateness, t.total_cost, t.generic_optimum, t.certificate
                ));
                for v in &t.violations {
                    out.push_str(&format!("  {}: {}\n", v.check, v.detail));
                }
            }
            let violations = report.violations().count();
            out.push_str(&format!("{}: {} trials, {violations} violations\n", algorithm, report.trials.len()));
            emit(None, &out)?;
            Ok(if violations == 0 { 0 } else { EXIT_VIOLATION })
        }
        Command::Oracle { input } => {
            let instance = read_instance(&input)?;
            let limits = limits()?;
            let generic = oracle_generic(&instance, &CompressionVector::zeros(&instance), &limits)?;
            let compressible = match oracle_compressible(&instance, &limits) {
                Ok(found) => Some(found),
                Err(Error::OracleLimit(msg)) => {
                    eprintln!("latesched: compressible oracle skipped: {msg}");
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let doc = OracleDocument::new(&instance, generic, compressible.as_ref().map(|(v, x)| (*v, x)));
            emit(None, &write_oracle(&doc))?;
            Ok(0)
        }
    }
}

fn limits() -> Result<OracleLimits, CliError> {
    OracleLimits::from_env().map_err(|e| CliError::Usage(e.to_string()))
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(parse_instance(&text)?)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io("<stdout>".into(), e)),
    }
}

fn analyze(instance: &Instance) -> Result<String, CliError> {
    let schedule = initial_schedule(instance)?;
    let lateness = schedule.lateness(instance);
    let id = |j: usize| instance.job(j).id.as_str();
    let names = |jobs: &[usize]| jobs.iter().map(|&j| id(j)).collect::<Vec<_>>().join(", ");

    let mut out = format!("ED schedule, L = {}\n", lateness.max);
    for (p, &j) in schedule.sequence().iter().enumerate() {
        out.push_str(&format!(
            "  {} [{}, {}) lateness {}\n",
            id(j),
            schedule.starts()[p],
            schedule.completions()[p],
            lateness.per_position[p]
        ));
    }
    let partition = schedule.blocks(instance);
    out.push_str("blocks:\n");
    for block in &partition.blocks {
        let jobs = &schedule.sequence()[block.clone()];
        out.push_str(&format!(
            "  {{{}}} [{}, {})\n",
            names(jobs),
            schedule.starts()[block.start],
            schedule.completions()[block.end - 1]
        ));
    }
    out.push_str("gaps:\n");
    for gap in &partition.gaps {
        out.push_str(&format!("  ({}, {})\n", gap.start, gap.end));
    }
    out.push_str("kernels:\n");
    for k in extract_kernels(&schedule, instance) {
        let emerging = k.delaying_emerging.map_or_else(|| "none".to_string(), |e| id(e).to_string());
        let delta = k.delta.map_or_else(|| "none".to_string(), |d| d.to_string());
        out.push_str(&format!(
            "  {{{}}} overflow {} r(K)={} e={} delta={}\n",
            names(&k.jobs),
            id(k.overflow),
            k.min_release,
            emerging,
            delta
        ));
    }
    let dmin = delta_min(&schedule, instance).map_or_else(|| "none".to_string(), |d| d.to_string());
    out.push_str(&format!("delta_min = {dmin}\n"));
    Ok(out)
}
