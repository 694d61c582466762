//! `seglen`: synthesize data, sweep segment durations, plot and compare.
//!
//! Exit status: 0 on success, 1 on a command-line usage error, 2 when the
//! config or data cannot be used.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seglen_core::report::{cmd_compare, cmd_plot, cmd_sweep, cmd_synth, RunConfig};

#[derive(Parser)]
#[command(name = "seglen", version, about = "EEG segment-duration sweep for biometric identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic dataset described by the config's `synth` section.
    Synth(RunArgs),
    /// Run the duration sweep; writes sweep.csv, knee.csv, knee.txt,
    /// run_manifest.json and SVG plots.
    Sweep(RunArgs),
    /// Render accuracy, normalized and derivative plots from a sweep CSV.
    Plot(PlotArgs),
    /// Correlate sweep curves with a reference curve (duration_s,value CSV).
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run config (JSON), or a run_manifest.json from an earlier sweep.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `master_seed` (sweep) or the synth seed (synth).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep results CSV.
    #[arg(long)]
    results: PathBuf,
    /// Output directory; defaults to the directory of the results file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    results: PathBuf,
    /// Reference curve CSV with header `duration_s,value`.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(args: &RunArgs, synth: bool) -> seglen_core::Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        match (synth, config.synth.as_mut()) {
            (true, Some(spec)) => spec.seed = seed,
            _ => config.master_seed = seed,
        }
    }
    Ok(config)
}

fn out_dir(out: &Option<PathBuf>, results: &Path) -> PathBuf {
    out.clone().unwrap_or_else(|| match results.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    })
}

fn run(cli: Cli) -> seglen_core::Result<()> {
    match cli.command {
        Command::Synth(args) => {
            let manifest = cmd_synth(&load_config(&args, true)?)?;
            println!("wrote {}", manifest.display());
        }
        Command::Sweep(args) => {
            let outputs = cmd_sweep(&load_config(&args, false)?)?;
            for k in &outputs.knees {
                match k.knee_duration() {
                    Some(d) => println!("{} {}: knee at {d} s", k.dataset, k.classifier),
                    None => println!("{} {}: no knee", k.dataset, k.classifier),
                }
            }
            for f in &outputs.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Plot(args) => {
            for f in cmd_plot(&args.results, &out_dir(&args.out, &args.results))? {
                println!("wrote {}", f.display());
            }
        }
        Command::Compare(args) => {
            let rows = cmd_compare(&args.results, &args.reference, &out_dir(&args.out, &args.results))?;
            for r in rows {
                let c = r.correlation;
                println!("{} {}: r = {:.4}, p = {:.3e}, n = {}", r.dataset, r.classifier, c.r, c.p_value, c.n);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
