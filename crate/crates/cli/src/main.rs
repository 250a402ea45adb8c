use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use grwa_core::sweep::{self, Solver, SweepConfig};
use log::{info, LevelFilter};

/// Sweep the hybrid atom-photon-phonon spectrum and write `data.csv` plus
/// `manifest.json`.
#[derive(Debug, Parser)]
#[command(name = "sweep", version)]
struct Args {
    /// JSON sweep configuration.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in preset instead of a config file.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Output directory [default: out/<preset or config name>].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Grid points evaluated concurrently.
    #[arg(long, value_name = "K")]
    workers: Option<usize>,

    /// Comma-separated subset of exact,grwa,rwa.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    solvers: Option<Vec<String>>,

    /// Lowest exact levels kept for state matching.
    #[arg(long, value_name = "K")]
    levels: Option<usize>,

    /// Print the preset catalog as JSON and exit.
    #[arg(long)]
    list_presets: bool,

    /// Print the resolved configuration and exit.
    #[arg(long)]
    dry_run: bool,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn load(args: &Args) -> Result<SweepConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut cfg: SweepConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if cfg.name.is_none() {
                cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            }
            cfg
        }
        (None, Some(name)) => match sweep::preset(name) {
            Some(p) => p.config,
            None => bail!("unknown preset {name:?}; see --list-presets"),
        },
        _ => bail!("one of --config or --preset is required"),
    };
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(list) = &args.solvers {
        cfg.solvers = list.iter().map(|s| Solver::parse(s)).collect::<Result<_, _>>()?;
    }
    if let Some(k) = args.levels {
        cfg.levels = Some(k);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: Args) -> Result<()> {
    if args.list_presets {
        println!("{}", serde_json::to_string_pretty(&sweep::presets())?);
        return Ok(());
    }
    let cfg = load(&args)?;
    if args.dry_run {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(());
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.name.as_deref().unwrap_or("sweep")));
    info!("{} grid points, {} rows expected", cfg.grid().len(), sweep::expected_rows(&cfg));
    let result = sweep::run_sweep(&cfg)?;
    let manifest = sweep::write_outputs(&out, &cfg, &result)?;
    eprintln!(
        "wrote {} rows to {} in {:.2} s",
        manifest.diagnostics.rows,
        out.join("data.csv").display(),
        manifest.wall_time_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
