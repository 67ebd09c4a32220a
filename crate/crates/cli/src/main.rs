use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monoflow::diagnostics::ConditionVerdict;
use monoflow::experiments::{
    self, config::schema_documentation, emit_outputs, ExperimentConfig, Param, RunOutput, Scenario,
};
use monoflow::{Error, Result};

#[derive(Parser)]
#[command(name = "monoflow", version, about = "Simulate nonautonomous monotone flows and check convergence conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides `outputs.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
    },
    /// Evaluate the viscosity value map listed in the config's `[omega]` table.
    Omega { config: PathBuf },
    /// Classify the scenario's summability conditions without running it.
    CheckConditions { config: PathBuf },
    /// Run a built-in scenario with default parameters.
    Reproduce {
        scenario: String,
        /// Parameter override `key=value` (repeatable).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print every scenario's parameters and defaults.
    Schema,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, out, svg } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            cfg.outputs.svg |= svg;
            let run = experiments::run(&cfg)?;
            finish(&cfg, &run, out.or_else(|| cfg.outputs.dir.clone()).as_deref())
        }
        Command::Omega { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let table = cfg
                .omega
                .as_ref()
                .ok_or_else(|| Error::Config("config has no [omega] table".into()))?;
            println!("epsilon,primal,dual,gap,slope");
            for row in experiments::omega_table(table)? {
                let show = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
                println!(
                    "{:.16e},{},{},{},{}",
                    row.epsilon,
                    show(row.primal),
                    show(row.dual),
                    show(row.gap),
                    show(row.primal.map(|w| w / row.epsilon).filter(|s| s.is_finite()))
                );
            }
            Ok(())
        }
        Command::CheckConditions { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let verdicts = experiments::check_conditions(&cfg)?;
            if verdicts.is_empty() {
                println!("no conditions available for scenario {}", cfg.scenario);
            }
            for v in &verdicts {
                println!("{}", verdict_row(v));
            }
            Ok(())
        }
        Command::Reproduce {
            scenario,
            params,
            out,
            svg,
            seed,
        } => {
            let mut cfg = ExperimentConfig::for_scenario(scenario.parse::<Scenario>()?);
            for kv in &params {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("--param expects key=value, got `{kv}`")))?;
                cfg = cfg.with_param(k.trim(), Param::parse_cli(v.trim()));
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.outputs.svg = svg;
            let run = experiments::run(&cfg)?;
            finish(&cfg, &run, out.as_deref())
        }
        Command::Schema => {
            print!("{}", schema_documentation());
            Ok(())
        }
    }
}

fn verdict_row(v: &ConditionVerdict) -> String {
    let sums: Vec<String> = v.partial_sums.iter().map(|(t, s)| format!("T={t:.0e}:{s:.6e}")).collect();
    format!(
        "{:<10} {:<13} tail_exponent={:<10} {}  {}",
        v.condition_id.label(),
        v.verdict.to_string(),
        v.tail_exponent.map(|e| format!("{e:.4}")).unwrap_or_else(|| "-".into()),
        sums.join(" "),
        v.evidence
    )
}

fn finish(cfg: &ExperimentConfig, run: &RunOutput, dir: Option<&Path>) -> Result<()> {
    println!("{}", run.summary.to_json()?);
    if let Some(dir) = dir {
        for path in emit_outputs(run, &cfg.outputs, dir)? {
            log::info!("wrote {}", path.display());
        }
    }
    Ok(())
}
