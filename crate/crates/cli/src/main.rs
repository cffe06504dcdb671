use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mpcbias_core::scenario::{
    csv_string, emit_csv, emit_plotdata, load_config, preset, preset_names, preset_source,
    run_scenario, Execution, ResultTable, ScenarioConfig,
};
use mpcbias_core::WeightingMode;

/// Multiband WSF delay estimation and unresolved-MPC bias experiments.
#[derive(Parser)]
#[command(name = "mpcbias", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo RMSE against the analytic bias and CRLB.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Trials per sweep point (overrides the config).
        #[arg(long)]
        trials: Option<usize>,
        /// Master seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Run trials on one thread, in order.
        #[arg(long)]
        serial: bool,
        /// CSV output; with a series axis one file per series, suffixed.
        #[arg(long)]
        out: PathBuf,
        /// Also write grouped plot data as JSON.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Analytic bias, CRLB and predicted RMSE only; CSV to stdout.
    PredictBias {
        #[command(flatten)]
        source: Source,
    },
    /// Print a built-in preset as TOML, or list them.
    Preset { name: Option<String> },
}

#[derive(Args)]
struct Source {
    /// Scenario TOML file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: scenario1, scenario2 or scenario3.
    #[arg(long)]
    preset: Option<String>,
    /// identity | eigen (overrides the config).
    #[arg(long)]
    weighting: Option<WeightingMode>,
}

impl Source {
    fn load(&self) -> mpcbias_core::Result<ScenarioConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => load_config(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => unreachable!("clap requires a source"),
        };
        if let Some(w) = self.weighting {
            cfg.run.weighting = w;
        }
        Ok(cfg)
    }
}

fn series_path(out: &Path, table: &ResultTable, count: usize) -> PathBuf {
    match table.series {
        Some((var, value)) if count > 1 => {
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
            let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
            out.with_file_name(format!("{stem}_{}_{value}.{ext}", var.as_str()))
        }
        _ => out.to_path_buf(),
    }
}

fn report_warnings(tables: &[ResultTable]) {
    let mut seen: Vec<&str> = Vec::new();
    for w in tables.iter().flat_map(|t| &t.warnings) {
        if !seen.contains(&w.as_str()) {
            eprintln!("warning: {w}");
            seen.push(w);
        }
    }
}

fn run(cli: Cli) -> mpcbias_core::Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Simulate {
            source,
            trials,
            seed,
            serial,
            out,
            plot,
        } => {
            let mut cfg = source.load()?;
            if let Some(t) = trials {
                cfg.run.trials = t;
            }
            if let Some(s) = seed {
                cfg.run.seed = s;
            }
            let exec = if serial { Execution::Serial } else { Execution::Parallel };
            let tables = run_scenario(&cfg, exec)?;
            report_warnings(&tables);
            for t in &tables {
                let path = series_path(&out, t, tables.len());
                emit_csv(t, &path)?;
                eprintln!("wrote {}", path.display());
            }
            if let Some(p) = plot {
                emit_plotdata(&tables, &p)?;
                eprintln!("wrote {}", p.display());
            }
        }
        Command::PredictBias { source } => {
            let mut cfg = source.load()?;
            cfg.run.trials = 0;
            let tables = run_scenario(&cfg, Execution::Serial)?;
            report_warnings(&tables);
            for t in &tables {
                if let Some((var, value)) = t.series {
                    writeln!(stdout, "# {}={value}", var.as_str())?;
                }
                write!(stdout, "{}", csv_string(t))?;
            }
        }
        Command::Preset { name: None } => {
            for n in preset_names() {
                writeln!(stdout, "{n}")?;
            }
        }
        Command::Preset { name: Some(name) } => match preset_source(&name) {
            Some(src) => write!(stdout, "{src}")?,
            None => {
                preset(&name)?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(mpcbias_core::Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
