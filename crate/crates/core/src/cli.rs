//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration problems (missing or
//! unparsable config, domain violations, missing PDP data), 1 for runtime
//! failures. Diagnostics go to stderr; stdout carries a single end-of-run
//! summary line.

use crate::channel_model::load_pdp_file;
use crate::error::{LinkSimError, Result};
use crate::sim_harness::{
    run_sweep_with_workers, write_csv_file, ScenarioConfig, SweepResultRow,
};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Seed used by the bundled comparison preset.
pub const PAPER_REPRO_SEED: u64 = 2017;

/// PDP data file the preset expects to find (see `LINKSIM_DATA_DIR`).
pub const PAPER_REPRO_PDP: &str = "tdl_a.pdp";

#[derive(Parser)]
#[command(
    name = "linksim",
    version,
    about = "Distributed PDCCH REG-bundling EESM simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file and write one CSV
    Run(SweepArgs),
    /// Write the three bundled comparison sweeps (flat, boost 1:12, boost 1:24)
    PaperRepro(PaperReproArgs),
    /// Parse and validate a config file without running it
    ValidateConfig(ValidateArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config file (flat `key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Config override, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker thread count (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PaperReproArgs {
    /// Output directory for the three CSV files
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Master seed override (the preset default is fixed)
    #[arg(long)]
    seed: Option<u64>,
    /// Config override applied to every preset scenario, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker thread count (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Sweep config file
    #[arg(long)]
    config: PathBuf,
    /// Config override, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
}

/// Parse argv and execute. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::PaperRepro(args) => cmd_paper_repro(args),
        Command::ValidateConfig(args) => cmd_validate(args),
    };
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err((code, message)) => {
            eprintln!("error: {message}");
            code
        }
    }
}

type CmdResult = std::result::Result<String, (i32, String)>;

fn config_err(e: LinkSimError) -> (i32, String) {
    (2, e.to_string())
}

fn runtime_err(e: LinkSimError) -> (i32, String) {
    (1, e.to_string())
}

/// Load a config file, apply `--set` overrides and the seed override.
fn load_config(path: &Path, sets: &[String], seed: Option<u64>) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::from_file(path)?;
    apply_overrides(&mut cfg, sets, seed)?;
    Ok(cfg)
}

fn apply_overrides(cfg: &mut ScenarioConfig, sets: &[String], seed: Option<u64>) -> Result<()> {
    let mut errors = Vec::new();
    for assignment in sets {
        let Some((key, value)) = assignment.split_once('=') else {
            errors.push(format!("--set '{assignment}': expected KEY=VALUE"));
            continue;
        };
        if let Err(e) = cfg.set(key, value) {
            errors.push(match e {
                LinkSimError::Config(msgs) => msgs.join("; "),
                other => other.to_string(),
            });
        }
    }
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(LinkSimError::Config(errors))
    }
}

/// Validate the config and check that its PDP file loads.
fn prepare(cfg: &ScenarioConfig) -> Result<()> {
    cfg.validate()?;
    load_pdp_file(cfg.resolve_pdp_path()?)?;
    Ok(())
}

fn cmd_run(args: SweepArgs) -> CmdResult {
    let cfg = load_config(&args.config, &args.set, args.seed).map_err(config_err)?;
    prepare(&cfg).map_err(config_err)?;
    let rows = run_sweep_with_workers(&cfg, args.workers).map_err(runtime_err)?;
    write_csv_file(&rows, &args.out).map_err(runtime_err)?;
    Ok(format!(
        "wrote {} rows to {} [seed {}]",
        rows.len(),
        args.out.display(),
        cfg.master_seed
    ))
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let cfg = load_config(&args.config, &args.set, args.seed).map_err(config_err)?;
    prepare(&cfg).map_err(config_err)?;
    Ok(format!(
        "config OK: name={} als={:?} regb_sizes={:?} snr_points={} trials={} seed={}",
        cfg.name,
        cfg.aggregation_levels,
        cfg.regb_sizes,
        cfg.snr_points_db.len(),
        cfg.n_trials,
        cfg.master_seed
    ))
}

/// The three comparison scenarios: flat interference with all aggregation
/// levels, 3 dB boost on RBs 1..12 with all levels, and 3 dB boost on RBs
/// 1..24 with levels 1 and 2.
pub fn paper_repro_configs(seed: Option<u64>) -> Vec<ScenarioConfig> {
    let seed = seed.unwrap_or(PAPER_REPRO_SEED);
    let presets: [(&str, Option<u32>, &[u32]); 3] = [
        ("flat", None, &[1, 2, 4, 8]),
        ("boost_1_12", Some(12), &[1, 2, 4, 8]),
        ("boost_1_24", Some(24), &[1, 2]),
    ];
    presets
        .iter()
        .map(|&(name, boost_hi, als)| ScenarioConfig {
            name: name.into(),
            pdp: PAPER_REPRO_PDP.into(),
            boosted_rbs: boost_hi.map(|hi| (1..=hi).collect()).unwrap_or_default(),
            boost_db: 3.0,
            aggregation_levels: als.to_vec(),
            master_seed: seed,
            // search ./data when LINKSIM_DATA_DIR is unset
            config_dir: Some(PathBuf::from("data")),
            ..ScenarioConfig::default()
        })
        .collect()
}

/// Run the preset and write `<out>/<scenario>.csv` per scenario.
pub fn paper_repro(
    out_dir: &Path,
    seed: Option<u64>,
    sets: &[String],
    workers: Option<usize>,
) -> Result<Vec<(PathBuf, Vec<SweepResultRow>)>> {
    let mut outputs = Vec::new();
    for mut cfg in paper_repro_configs(seed) {
        apply_overrides(&mut cfg, sets, None)?;
        prepare(&cfg)?;
        let rows = run_sweep_with_workers(&cfg, workers)?;
        let path = out_dir.join(format!("{}.csv", cfg.name));
        write_csv_file(&rows, &path)?;
        outputs.push((path, rows));
    }
    Ok(outputs)
}

fn cmd_paper_repro(args: PaperReproArgs) -> CmdResult {
    // fail fast on config problems before touching the filesystem
    for mut cfg in paper_repro_configs(args.seed) {
        apply_overrides(&mut cfg, &args.set, None).map_err(config_err)?;
        prepare(&cfg).map_err(config_err)?;
    }
    std::fs::create_dir_all(&args.out).map_err(|e| {
        runtime_err(LinkSimError::Io {
            path: args.out.clone(),
            source: e,
        })
    })?;
    let outputs = paper_repro(&args.out, args.seed, &args.set, args.workers)
        .map_err(runtime_err)?;
    let total_rows: usize = outputs.iter().map(|(_, rows)| rows.len()).sum();
    Ok(format!(
        "wrote {} sweeps ({} rows) to {} [seed {}]",
        outputs.len(),
        total_rows,
        args.out.display(),
        args.seed.unwrap_or(PAPER_REPRO_SEED)
    ))
}
