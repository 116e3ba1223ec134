use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use abrsim::scenario::{run_scenario, ScenarioConfig};
use abrsim::sim::RngStream;
use abrsim::stream::{synth_ladder, LadderSpec, DEFAULT_LADDER_BPS};

#[derive(Debug, Parser)]
#[command(name = "abrsim", version, about = "Adaptive-bitrate streaming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write CSV results.
    Run {
        /// a, b, c or d; overrides the config file.
        #[arg(long)]
        scenario: Option<String>,
        /// Flat key = value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Simulated seconds to run.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Write a synthetic quality ladder as level0.txt .. levelN.txt.
    TraceGen {
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        fps: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated Mb/s per level; defaults to the first LEVELS
        /// entries of 0.5,1,2.5,5,8,16.
        #[arg(long, value_delimiter = ',')]
        bitrates_mbps: Option<Vec<f64>>,
    },
}

fn run(
    scenario: Option<String>,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    horizon: Option<f64>,
) -> Result<()> {
    let mut cfg = match &config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ScenarioConfig::from_text(&text).with_context(|| format!("in {}", path.display()))?
        }
        None if scenario.is_none() => bail!("either --scenario or --config is required"),
        None => ScenarioConfig::default(),
    };
    if let Some(s) = scenario {
        cfg.set("scenario", &s)?;
    }
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = out {
        cfg.out_dir = o;
    }
    if let Some(h) = horizon {
        cfg.set("horizon_s", &h.to_string())?;
    }
    cfg.validate()?;
    run_scenario(&cfg, &mut std::io::stdout().lock())?;
    Ok(())
}

fn trace_gen(
    levels: usize,
    frames: usize,
    fps: f64,
    out: PathBuf,
    seed: u64,
    bitrates_mbps: Option<Vec<f64>>,
) -> Result<()> {
    let bitrates_bps: Vec<u64> = match bitrates_mbps {
        Some(r) if r.len() != levels => bail!("--bitrates-mbps has {} entries, --levels is {levels}", r.len()),
        Some(r) => r.iter().map(|m| (m * 1e6).round() as u64).collect(),
        None if levels == 0 || levels > DEFAULT_LADDER_BPS.len() => {
            bail!("--levels must be 1..={} without --bitrates-mbps", DEFAULT_LADDER_BPS.len())
        }
        None => DEFAULT_LADDER_BPS[..levels].to_vec(),
    };
    let spec = LadderSpec { frames, fps, bitrates_bps, ..LadderSpec::default() };
    let ladder = synth_ladder(&spec, &mut RngStream::new(seed, u32::MAX, "ladder"))?;
    ladder.write_dir(&out)?;
    println!("wrote {} levels of {} frames to {}", ladder.levels(), frames, out.display());
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, config, seed, out, horizon } => run(scenario, config, seed, out, horizon),
        Command::TraceGen { levels, frames, fps, out, seed, bitrates_mbps } => {
            trace_gen(levels, frames, fps, out, seed, bitrates_mbps)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
