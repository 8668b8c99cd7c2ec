//! `phylsec`: run secrecy sweeps from a JSON scenario and write CSV results.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 when the trial
//! count is too small for the requested statistic, 1 for anything else.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use phylsec_core::{
    dump_trials, emit_csv, emit_wide_tables, read_csv, run_sweep, with_threads, ConfigError, Error,
    FadingParams, Prelog, ScenarioConfig, SchemeId, SchemeSpec, Snr,
};

#[derive(Debug, Parser)]
#[command(
    name = "phylsec",
    version,
    about = "Secrecy capacity and intercept probability sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every scheme x M x MER point of a scenario and write the long CSV.
    Run(RunArgs),
    /// Log-log intercept slope of every curve in an emitted CSV.
    Slope {
        /// CSV written by `run`
        #[arg(long)]
        csv: PathBuf,
        /// Number of highest-MER points per curve
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Dump per-trial outcomes of one point for debugging.
    Trace(TraceArgs),
    /// Print the default scenario as JSON.
    DefaultConfig,
}

#[derive(Debug, clap::Args)]
struct Threads {
    /// Worker threads (results do not depend on this)
    #[arg(long, env = "PHYLSEC_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `master_seed`
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `n_trials`
    #[arg(long)]
    trials: Option<u64>,
    #[command(flatten)]
    threads: Threads,
    /// Also write one plot-ready table per metric into this directory
    #[arg(long)]
    tables: Option<PathBuf>,
    /// MER points used for the slope summary on stderr
    #[arg(long, default_value_t = 3)]
    slope_window: usize,
}

#[derive(Debug, clap::Args)]
struct TraceArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    scheme: String,
    /// Node count; ignored for `direct`
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long)]
    mer_db: f64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Overrides `master_seed`
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_error(message: String) -> Error {
    Error::Config(ConfigError {
        line: None,
        column: None,
        field: None,
        message,
    })
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::from_json_str(&text).map_err(|mut e| {
        e.message = format!("{}: {}", path.display(), e.message);
        Error::Config(e)
    })
}

fn pool<T: Send>(threads: &Threads, f: impl FnOnce() -> T + Send) -> Result<T> {
    let n = match threads.threads {
        Some(0) => return Err(config_error("--threads must be >= 1".into()).into()),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(with_threads(n, f)?)
}

/// Writes next to `path` then renames, so a failed write leaves no partial file.
fn write_atomically(path: &Path, write: impl FnOnce(&Path) -> Result<(), Error>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    write(&tmp)?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = args.trials {
        cfg.n_trials = n;
    }
    let result = pool(&args.threads, || run_sweep(&cfg))??;

    write_atomically(&args.out, |p| emit_csv(&result, p))?;
    eprintln!("wrote {} rows to {}", result.len(), args.out.display());
    if let Some(dir) = &args.tables {
        for p in emit_wide_tables(&result, dir)? {
            eprintln!("wrote {}", p.display());
        }
    }
    for (scheme, m, slope) in result.intercept_slopes(args.slope_window) {
        match slope {
            Ok(s) => eprintln!("intercept slope {scheme} M={m}: {s:.4}"),
            Err(e) => eprintln!("intercept slope {scheme} M={m}: {e}"),
        }
    }
    Ok(())
}

fn slope(csv: &Path, window: usize) -> Result<()> {
    let result = read_csv(csv)?;
    let mut first_err = None;
    for (scheme, m, slope) in result.intercept_slopes(window) {
        match slope {
            Ok(s) => println!("{scheme},{m},{s}"),
            Err(e) => {
                eprintln!("{scheme} M={m}: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn trace(args: TraceArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let scheme: SchemeId = args.scheme.parse()?;
    let spec = SchemeSpec::new(scheme, args.m)
        .with_prelog(Prelog::from_half(cfg.prelog_half))
        .with_eve_mode(cfg.eve_mode);
    let params = FadingParams::from_mer(
        cfg.sigma2_sd,
        cfg.sigma2_sr,
        cfg.sigma2_rd,
        args.mer_db,
        cfg.sigma2_re_rule,
    )?;
    let gamma_s = Snr::from_db(cfg.gamma_s_db)?;
    let seed = args.seed.unwrap_or(cfg.master_seed);
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(std::io::stdout().lock()),
    };
    dump_trials(spec, &params, gamma_s, args.trials, seed, &mut out)?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) => 2,
        Some(Error::InsufficientResolution(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run(args) => run(args),
        Command::Slope { csv, window } => slope(&csv, window),
        Command::Trace(args) => trace(args),
        Command::DefaultConfig => {
            println!("{}", ScenarioConfig::default().to_json_pretty());
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
