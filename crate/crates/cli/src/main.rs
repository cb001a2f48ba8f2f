//! Scenario-driven analysis and simulation runs with CSV output.

mod config;
mod output;
mod runner;

use clap::{Parser, ValueEnum};
use sha2::{Digest, Sha256};
use std::process::ExitCode;
use std::time::Instant;

use output::Mode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliMode {
    Analytic,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// One row of metrics for the scenario as given.
    Metrics,
    /// One row per sweep-variable value from the [sweep] section.
    Sweep,
    /// One row per valid (w1, w3) cell of the weight simplex.
    WeightScan,
    /// Poisson-vs-Walker constellation comparison.
    Calibrate,
}

/// Coverage, handover and delay analysis for K-tier LEO downlinks.
#[derive(Debug, Parser)]
#[command(name = "hetsat", version)]
struct Args {
    /// Scenario file (TOML).
    scenario: String,
    /// Which side(s) to compute.
    #[arg(long, value_enum, default_value = "both")]
    mode: CliMode,
    /// What to run.
    #[arg(long, value_enum, default_value = "metrics")]
    command: Command,
    /// Output CSV path (overrides the scenario's [output] section).
    #[arg(long)]
    out: Option<String>,
    /// Replace the scenario's Monte Carlo seed.
    #[arg(long)]
    seed_override: Option<u64>,
    /// Replace the scenario's Monte Carlo trial count.
    #[arg(long)]
    trials_override: Option<usize>,
    /// Worker thread count (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let started = Instant::now();

    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("config error: could not build a {n}-thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", args.scenario);
            return ExitCode::from(2);
        }
    };
    let loaded = match config::load_scenario(&text) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }

    let mut mc_config = loaded.mc;
    if let Some(seed) = args.seed_override {
        mc_config.seed = seed;
    }
    if let Some(trials) = args.trials_override {
        mc_config.trials = trials.max(1);
    }

    let mode = match args.mode {
        CliMode::Analytic => Mode::Analytic,
        CliMode::Mc => Mode::Mc,
        CliMode::Both => Mode::Both,
    };
    let command_name = match args.command {
        Command::Metrics => "metrics",
        Command::Sweep => "sweep",
        Command::WeightScan => "weight-scan",
        Command::Calibrate => "calibrate",
    };

    let outcome = match args.command {
        Command::Metrics => Ok(runner::run_metrics(&loaded, &mc_config, mode)),
        Command::Sweep => runner::run_sweep(&loaded, &mc_config, mode),
        Command::WeightScan => runner::run_weight_scan(&loaded, &mc_config, mode),
        Command::Calibrate => runner::run_calibrate(&loaded, &mc_config),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    let out_path = args
        .out
        .or(loaded.output_path.clone())
        .unwrap_or_else(|| format!("{command_name}.csv"));

    let write = (|| -> std::io::Result<()> {
        let mut writer = csv::Writer::from_path(&out_path)?;
        writer.write_record(&outcome.header)?;
        for record in &outcome.records {
            writer.write_record(record)?;
        }
        writer.flush()?;

        let meta = output::Metadata {
            config_hash: {
                let mut hasher = Sha256::new();
                hasher.update(text.as_bytes());
                hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
            },
            seed: mc_config.seed,
            trials: mc_config.trials,
            command: command_name,
            mode,
            threads: rayon::current_num_threads(),
            warnings: loaded.warnings.clone(),
            rows: outcome.records.len(),
            failed_rows: outcome.failed_rows,
            decay_warning: outcome.decay_warning,
            started,
        };
        output::write_metadata(&format!("{out_path}.meta.json"), &meta)
    })();
    if let Err(e) = write {
        eprintln!("output error: {e}");
        return ExitCode::from(2);
    }

    eprintln!(
        "{command_name}: {} rows -> {out_path} ({:.1}s)",
        outcome.records.len(),
        started.elapsed().as_secs_f64()
    );
    if outcome.failed_rows > 0 {
        eprintln!("{} row(s) carry numerical-tolerance failures; see the status column", outcome.failed_rows);
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
