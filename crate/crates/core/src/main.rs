use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ns_alpha::runner::{
    analyze, classify_regularization, error_exit_code, parse_rational, preset, presets, run,
    AnalyzeOptions, Regime, RunConfig,
};
use ns_alpha::Result;

#[derive(Parser)]
#[command(name = "ns-alpha", version, about = "Fractional alpha models of Navier-Stokes on the 3-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run and write records, manifest and snapshot.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Classify (theta1, theta2) against the critical line 2θ₁ + θ₂ = 1/2.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        theta1: String,
        #[arg(long, allow_hyphen_values = true)]
        theta2: String,
    },
    /// Singularity report for a records file, printed as JSON.
    Analyze {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        exponent: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Show the named presets.
    Preset {
        #[arg(long)]
        list: bool,
        name: Option<String>,
    },
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config } => {
            let c = RunConfig::from_file(&config)?;
            let s = run(&c)?;
            println!(
                "{}: {} steps to t = {} ({} records) -> {}, {}",
                s.manifest.status,
                s.steps,
                s.final_state.t,
                s.manifest.records_count,
                c.records.display(),
                c.manifest.display()
            );
            if let Some(b) = &s.blowup {
                println!("blow-up after t = {} (norm {:e})", b.t_last_finite, b.norm);
            }
            Ok(s.status.exit_code())
        }
        Command::Classify { theta1, theta2 } => {
            let c = classify_regularization(parse_rational(&theta1)?, parse_rational(&theta2)?)?;
            println!("{}", c.summary());
            if c.regime == Regime::Subcritical {
                println!("hausdorff exponent (1-2*theta2-4*theta1)/2 = {}", c.exponent);
            }
            Ok(0)
        }
        Command::Analyze { records, manifest, threshold, exponent, horizon, output } => {
            let report = analyze(&AnalyzeOptions { records, manifest, threshold, exponent, horizon })?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            match output {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Preset { list, name } => {
            let show = |p: ns_alpha::runner::ModelPreset| {
                println!(
                    "{:<22} theta1 = {:<4} theta2 = {:<4} exponent family {}",
                    p.name, p.theta1.to_string(), p.theta2.to_string(), p.exponent_formula
                )
            };
            match name {
                Some(n) => show(preset(&n)?),
                None if list => presets().into_iter().for_each(show),
                None => {
                    return Err(ns_alpha::Error::Config("give a preset name or --list".into()))
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
