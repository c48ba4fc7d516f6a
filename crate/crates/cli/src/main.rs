use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use isac_cli::config::{parse_engine, EngineKind, RunConfig};
use isac_cli::csv::Table;
use isac_cli::plot::PlotSpec;
use isac_cli::validate::{self, ValidateOptions};
use isac_cli::{commands, CliError, ConfigError};

#[derive(Parser)]
#[command(name = "isac", version, about = "Outage and ergodic metrics for SJB and LB ISAC beamforming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// analytic or mc.
    #[arg(long, value_parser = parse_engine)]
    engine: Option<EngineKind>,
    /// Output CSV path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    emit_plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// User outage over the configured γ list.
    OpUser(Common),
    /// Target outage over the configured ε list.
    OpTarget(Common),
    /// Ergodic rate, or truncated ergodic CRB per cap.
    Ergodic(Common),
    /// Outage region sweep, Pareto flags and time-sharing line.
    Region(Common),
    /// Monte Carlo estimate of the configured metric.
    Mc(Common),
    /// Run the acceptance suite.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated criterion numbers; all when absent.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

fn load(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = Some(s);
    }
    if let Some(n) = c.samples {
        cfg.samples = n;
    }
    if let Some(e) = c.engine {
        cfg.engine = e;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    cfg.emit_plots |= c.emit_plots;
    if cfg.engine == EngineKind::Mc && cfg.samples < 1000 {
        return Err(ConfigError::Missing { field: "samples".into(), msg: "Monte Carlo needs at least 1000 samples".into() }.into());
    }
    if cfg.emit_plots && cfg.out.is_none() {
        return Err(ConfigError::Missing { field: "out".into(), msg: "--emit-plots needs an output path".into() }.into());
    }
    Ok(cfg)
}

fn write(cfg: &RunConfig, table: &Table, plot: &PlotSpec) -> Result<(), CliError> {
    let text = table.render();
    match &cfg.out {
        None => print!("{text}"),
        Some(path) => {
            std::fs::write(path, &text).map_err(|source| CliError::Io { path: path.clone(), source })?;
            if cfg.emit_plots {
                if let Some(script) = plot.script(path, table) {
                    let gp = Path::new(path).with_extension("gp");
                    std::fs::write(&gp, script)
                        .map_err(|source| CliError::Io { path: gp.display().to_string(), source })?;
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let (cfg, result) = match &cli.command {
        Command::OpUser(c) => {
            let cfg = load(c)?;
            let r = commands::op_user(&cfg)?;
            (cfg, r)
        }
        Command::OpTarget(c) => {
            let cfg = load(c)?;
            let r = commands::op_target(&cfg)?;
            (cfg, r)
        }
        Command::Ergodic(c) => {
            let cfg = load(c)?;
            let r = commands::ergodic(&cfg)?;
            (cfg, r)
        }
        Command::Region(c) => {
            let cfg = load(c)?;
            let r = commands::region(&cfg)?;
            (cfg, r)
        }
        Command::Mc(c) => {
            let cfg = load(c)?;
            let r = commands::mc_cmd(&cfg)?;
            (cfg, r)
        }
        Command::Validate { common, criteria } => {
            let cfg = load(common)?;
            let opts = ValidateOptions { seed: cfg.seed(), samples: cfg.samples };
            let ids: Vec<u8> = criteria.clone().unwrap_or_else(|| validate::CRITERIA.collect());
            let mut reports = Vec::new();
            for id in ids {
                let r = validate::run_criterion(id, &cfg.scenario, &opts)?;
                eprintln!("{}  [{:.1} s]", r.summary_line(), r.seconds);
                reports.push(r);
            }
            write(&cfg, &validate::table(&reports), &PlotSpec::None)?;
            eprintln!("total {:.1} s", start.elapsed().as_secs_f64());
            let failed = reports.iter().filter(|r| !r.passed()).count();
            return if failed == 0 { Ok(()) } else { Err(CliError::Validation(failed)) };
        }
    };
    write(&cfg, &result.0, &result.1)?;
    eprintln!("done in {:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
