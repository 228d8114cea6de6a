mod files;
mod registry;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qcap::capacity::{
    capacity_via_dilation, constrained_capacity, holevo_capacity, CostConstraint,
};
use qcap::eof::{eof_convex_roof, eof_wootters};
use qcap::examples::{gap_region_scan, superadditivity_search, write_gap_csv};
use qcap::optim::{OptSettings, DEFAULT_EOF_RESTARTS, DEFAULT_RESTARTS, DEFAULT_TOL};
use qcap::quantum::{DensityMatrix, KrausChannel};
use qcap::verify::{self, Level};

use files::{ensemble_json, read_json, ChannelFile, CostFile, MatrixJson, StateFile};

/// Process outcome mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or invalid input (exit 2).
    Input(String),
    /// No input satisfies the cost constraint (exit 3).
    Infeasible(String),
    /// A verification check failed (exit 1).
    Verification(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<qcap::Error> for CliError {
    fn from(e: qcap::Error) -> Self {
        match e {
            qcap::Error::Infeasible(m) => CliError::Infeasible(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qcap",
    version,
    about = "Holevo capacity, entanglement of formation and log-negativity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SearchArgs {
    /// Number of random restarts.
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop once several steps gain less than this.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

impl SearchArgs {
    fn settings(&self, default_restarts: usize) -> Result<OptSettings, CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::input(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        let restarts = self.restarts.unwrap_or(default_restarts);
        if restarts == 0 {
            return Err(CliError::input("need at least one restart"));
        }
        Ok(OptSettings::new(restarts, self.seed).with_tol(self.tol))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Holevo capacity of a channel, optionally under an average cost constraint.
    #[command(group(ArgGroup::new("source").required(true).args(["channel", "example"])))]
    Capacity {
        /// Channel JSON file.
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Named example channel.
        #[arg(long, help = format!("Named example channel ({})", registry::CHANNEL_NAMES))]
        example: Option<String>,
        /// Cost operator JSON file: {"dim": d, "matrix": [...]}.
        #[arg(long, requires = "alpha")]
        constraint: Option<PathBuf>,
        /// Bound on the average cost; fractions accepted.
        #[arg(long, requires = "constraint", allow_negative_numbers = true)]
        alpha: Option<String>,
        /// Ensemble size (default out_dim²).
        #[arg(long)]
        max_ensemble: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Entanglement of formation of a bipartite state.
    #[command(group(ArgGroup::new("source").required(true).args(["state", "example"])))]
    Eof {
        /// State JSON file.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, help = format!("Named example state ({})", registry::STATE_NAMES))]
        example: Option<String>,
        /// Factors on the first side of the cut, comma separated.
        #[arg(long, default_value = "0")]
        cut: String,
        /// Decomposition size (default rank²).
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// CSV of log-negativity against entanglement cost over the Pauli simplex.
    GapScan {
        #[arg(long, default_value = "0.05")]
        grid_step: String,
        /// Output file (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the reproduction checks and reports one line per criterion.
    VerifyPaper {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compare the dilation and direct capacities of this channel.
        #[arg(long)]
        channel: Option<PathBuf>,
    },
    /// Random search for states violating superadditivity of E_f.
    SuperaddSearch {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        /// Output file (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a named example as a channel or state JSON file.
    Export {
        #[arg(long)]
        example: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcap: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// Honours `QCAP_THREADS`; otherwise rayon uses every core.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("QCAP_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::input(format!("QCAP_THREADS={v} is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Capacity {
            channel,
            example,
            constraint,
            alpha,
            max_ensemble,
            search,
        } => {
            let t = load_channel(channel.as_deref(), example.as_deref())?;
            let settings = search.settings(DEFAULT_RESTARTS)?;
            let cost = match (constraint, alpha) {
                (Some(path), Some(a)) => {
                    let f: CostFile = read_json(&path)?;
                    let op = f.matrix.to_matrix(f.dim, f.dim)?;
                    Some(CostConstraint::new(op, registry::parse_number(&a)?)?)
                }
                _ => None,
            };
            let r = match &cost {
                Some(c) => constrained_capacity(&t, c, max_ensemble, &settings)?,
                None => holevo_capacity(&t, max_ensemble, &settings)?,
            };
            let mut out = json!({
                "value_bits": r.value.0,
                "ensemble": ensemble_json(&r.ensemble),
                "optimal_output": MatrixJson::from_matrix(r.optimal_output.op()),
                "converged": r.converged,
                "iterations": r.iterations,
                "restarts": settings.restarts,
                "seed": settings.seed,
            });
            if let Some(c) = &cost {
                out["alpha"] = json!(c.threshold());
            }
            emit_json(&out, None)
        }
        Command::Eof {
            state,
            example,
            cut,
            ensemble_size,
            search,
        } => {
            let rho = load_state(state.as_deref(), example.as_deref())?;
            let cut = parse_cut(&cut)?;
            let settings = search.settings(DEFAULT_EOF_RESTARTS)?;
            let r = eof_convex_roof(&rho, &cut, ensemble_size, &settings)?;
            let mut out = json!({
                "value_bits": r.value.0,
                "ensemble": ensemble_json(&r.ensemble),
                "converged": r.converged,
                "iterations": r.iterations,
                "restarts": settings.restarts,
                "seed": settings.seed,
            });
            if rho.fact().dims() == [2, 2] {
                out["oracle_bits"] = json!(eof_wootters(&rho)?.0);
            }
            emit_json(&out, None)
        }
        Command::GapScan { grid_step, out } => {
            let step = registry::parse_number(&grid_step)?;
            let records = gap_region_scan(step)?;
            let mut buf = Vec::new();
            write_gap_csv(&records, &mut buf)?;
            write_output(&buf, out.as_deref())
        }
        Command::VerifyPaper {
            level,
            seed,
            channel,
        } => {
            let extra = channel
                .as_deref()
                .map(|p| load_channel(Some(p), None))
                .transpose()?;
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            verify_paper(level, seed, extra)
        }
        Command::SuperaddSearch {
            samples,
            seed,
            restarts,
            out,
        } => {
            if restarts == 0 {
                return Err(CliError::input("need at least one restart"));
            }
            let found = superadditivity_search(samples, seed, &OptSettings::new(restarts, seed))?;
            emit_json(&found, out.as_deref())
        }
        Command::Export { example, out } => {
            let doc = match registry::channel(&example) {
                Ok(t) => serde_json::to_value(ChannelFile::from_channel(&t)),
                Err(_) => serde_json::to_value(StateFile::from_density(
                    &registry::state(&example).map_err(|_| {
                        CliError::input(format!(
                            "unknown example `{example}`; channels: {}; states: {}",
                            registry::CHANNEL_NAMES,
                            registry::STATE_NAMES
                        ))
                    })?,
                )),
            }
            .expect("serializable");
            emit_json(&doc, out.as_deref())
        }
    }
}

fn load_channel(path: Option<&Path>, example: Option<&str>) -> Result<KrausChannel, CliError> {
    match (path, example) {
        (Some(p), None) => read_json::<ChannelFile>(p)?.to_channel(),
        (None, Some(name)) => registry::channel(name),
        _ => Err(CliError::input(
            "give exactly one of --channel and --example",
        )),
    }
}

fn load_state(path: Option<&Path>, example: Option<&str>) -> Result<DensityMatrix, CliError> {
    match (path, example) {
        (Some(p), None) => read_json::<StateFile>(p)?.to_density(),
        (None, Some(name)) => registry::state(name),
        _ => Err(CliError::input("give exactly one of --state and --example")),
    }
}

fn parse_cut(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::input(format!("bad cut `{s}`")))
        })
        .collect()
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_output(text.as_bytes(), out)
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::input(format!("cannot write output: {e}"))),
    }
}

fn verify_paper(level: Level, seed: u64, extra: Option<KrausChannel>) -> Result<(), CliError> {
    let label = match level {
        Level::Quick => "quick",
        Level::Full => "full",
    };
    println!("verify-paper level {label}, seed {seed}");
    let mut failed = Vec::new();
    for &(id, _) in verify::CRITERIA.iter() {
        let o = verify::run(id, level, seed);
        println!("{o}");
        let _ = std::io::stdout().flush();
        if !o.passed {
            failed.push(id.to_string());
        }
    }
    if let Some(t) = extra {
        let d = capacity_via_dilation(&t, &OptSettings::new(4, seed))?;
        let gap = (d.value.0 - d.capacity.value.0).abs();
        let ok = gap <= 2e-3;
        println!(
            "{} [--] supplied channel: dilation {:.6} vs direct {:.6} (|diff| {gap:.1e})",
            if ok { "PASS" } else { "FAIL" },
            d.value.0,
            d.capacity.value.0
        );
        if !ok {
            failed.push("supplied channel".into());
        }
    }
    if failed.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "criteria {}",
            failed.join(", ")
        )))
    }
}
