use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};

use noisy_etc_cli::presets::{list_presets, resolve};
use noisy_etc_cli::run::{batch_names, preset_jobs};
use noisy_etc_cli::{batch, run, validate, CliError, Overrides, RunConfig};

/// Hybrid simulation of event-triggered consensus under measurement noise.
#[derive(Debug, Parser)]
#[command(name = "noisy-etc", version)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config", "batch", "list"])))]
struct Args {
    /// Named experiment (see --list).
    #[arg(long)]
    preset: Option<String>,
    /// TOML configuration or a run manifest.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated preset names, or "all".
    #[arg(long)]
    batch: Option<String>,
    /// Print the preset catalog.
    #[arg(long)]
    list: bool,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    decimate: Option<usize>,
    /// Print derived constants and the Zeno-bound verdicts without simulating.
    #[arg(long)]
    validate_only: bool,
}

fn configs(args: &Args, overrides: &Overrides) -> Result<Vec<(RunConfig, PathBuf)>, CliError> {
    if let Some(name) = &args.preset {
        return preset_jobs(name, overrides, &args.out);
    }
    if let Some(path) = &args.config {
        let mut config = RunConfig::load(path)?;
        overrides.apply(&mut config);
        return Ok(vec![(config, args.out.clone())]);
    }
    let mut all = Vec::new();
    for name in batch_names(args.batch.as_deref().unwrap_or_default()) {
        for mut config in resolve(&name)? {
            overrides.apply(&mut config);
            all.push((config, args.out.join(&name)));
        }
    }
    Ok(all)
}

fn execute(args: &Args) -> Result<i32, CliError> {
    if args.list {
        for p in list_presets() {
            println!("{:<20} {:<32} {}", p.name, p.reproduces, p.description);
        }
        return Ok(0);
    }
    let overrides = Overrides {
        seed: args.seed,
        t_final: args.t_final,
        step: args.step,
        decimate: args.decimate,
    };
    if args.validate_only {
        let mut code = 0;
        for (config, _) in configs(args, &overrides)? {
            let report = validate(&config)?;
            println!("{report}");
            if !report.accepted() {
                code = 2;
            }
        }
        return Ok(code);
    }
    if let Some(list) = &args.batch {
        let mut code = 0;
        for result in batch(&batch_names(list), &overrides, &args.out)? {
            match result {
                Ok(outcome) => println!("{}", outcome.summary()),
                Err(e) => {
                    eprintln!("error: {e}");
                    code = code.max(e.exit_code());
                }
            }
        }
        return Ok(code);
    }
    for (config, dir) in configs(args, &overrides)? {
        println!("{}", run(&config, &dir)?.summary());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
