//! Command-line surface and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::CliError;
use crate::graph_spec::parse_graph_spec;
use crate::output::Format;
use crate::plot::PlotKind;

pub const OUT_ENV: &str = "WALKSEARCH_OUT";
pub const DEFAULT_OUT: &str = "walksearch-out";

#[derive(Debug, Parser)]
#[command(
    name = "walksearch",
    version,
    about = "Quantum-walk spatial search experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory
    #[arg(long, short, global = true, env = OUT_ENV, default_value = DEFAULT_OUT)]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Plot script to emit (`figures` defaults to gnuplot)
    #[arg(long, global = true, value_enum)]
    pub plot: Option<PlotKind>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CommandArgs {
    /// Table of I, c, S, A and x0 constants
    Constants,
    /// Relevant eigenvalues with weights, plus the pole levels
    Spectrum {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        gamma: f64,
    },
    /// Gap and overlaps over a uniform gamma grid
    Scan {
        #[arg(long)]
        graph: String,
        /// LO,HI (default: 0.5 and 1.5 times the measured critical coupling)
        #[arg(long, value_parser = parse_pair)]
        gamma_range: Option<(f64, f64)>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Success amplitude over time
    Evolve {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        gamma: f64,
        /// Single time; overrides --time-range
        #[arg(long)]
        time: Option<f64>,
        /// LO,HI (default: 0,4 sqrt N)
        #[arg(long, value_parser = parse_pair)]
        time_range: Option<(f64, f64)>,
        #[arg(long, default_value_t = 1025)]
        points: usize,
    },
    /// Critical coupling and the bound suites around it
    Critical {
        #[arg(long)]
        graph: String,
        /// Check bounds here instead of at 0.5 and 2 times gamma_c
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Finite-size scaling on d-dimensional lattices
    Scaling {
        #[arg(long)]
        dim: u32,
        /// Comma-separated sides
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
    },
    /// Spectral route against dense diagonalization
    Validate {
        /// Repeatable; defaults to the standard validation families
        #[arg(long)]
        graph: Vec<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1296)]
        oracle_cap: usize,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Datasets and plot scripts for the four figures
    Figures,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Constants,
    Spectrum,
    Scan,
    Evolve,
    Critical,
    Scaling,
    Validate,
    Figures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Spectrum => "spectrum",
            Command::Scan => "scan",
            Command::Evolve => "evolve",
            Command::Critical => "critical",
            Command::Scaling => "scaling",
            Command::Validate => "validate",
            Command::Figures => "figures",
        }
    }
}

/// Everything a run depends on. Commands fill in defaults they resolve
/// (such as a scan range around the measured critical coupling) before the
/// manifest is written.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub graph: Vec<String>,
    pub gamma: Option<f64>,
    pub gamma_range: Option<(f64, f64)>,
    pub time: Option<f64>,
    pub time_range: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub dim: Option<u32>,
    pub sides: Vec<usize>,
    pub output: PathBuf,
    pub format: Format,
    pub plot: PlotKind,
    pub seed: Option<u64>,
    pub oracle_cap: Option<usize>,
    pub draws: Option<usize>,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    fn base(command: Command, common: &Common) -> Self {
        let default_plot = match command {
            Command::Figures if common.format == Format::Csv => PlotKind::Gnuplot,
            _ => PlotKind::None,
        };
        RunConfig {
            command,
            graph: Vec::new(),
            gamma: None,
            gamma_range: None,
            time: None,
            time_range: None,
            points: None,
            dim: None,
            sides: Vec::new(),
            output: common.out.clone(),
            format: common.format,
            plot: common.plot.unwrap_or(default_plot),
            seed: None,
            oracle_cap: None,
            draws: None,
            tolerance: None,
        }
    }

    /// Checks graph specs and numeric ranges; errors here exit with code 2.
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let c = &cli.common;
        let cfg = match cli.command.clone() {
            CommandArgs::Constants => RunConfig::base(Command::Constants, c),
            CommandArgs::Spectrum { graph, gamma } => RunConfig {
                graph: vec![graph],
                gamma: Some(gamma),
                ..RunConfig::base(Command::Spectrum, c)
            },
            CommandArgs::Scan {
                graph,
                gamma_range,
                points,
            } => RunConfig {
                graph: vec![graph],
                gamma_range,
                points: Some(points),
                ..RunConfig::base(Command::Scan, c)
            },
            CommandArgs::Evolve {
                graph,
                gamma,
                time,
                time_range,
                points,
            } => RunConfig {
                graph: vec![graph],
                gamma: Some(gamma),
                time,
                time_range: if time.is_some() { None } else { time_range },
                points: if time.is_some() { None } else { Some(points) },
                ..RunConfig::base(Command::Evolve, c)
            },
            CommandArgs::Critical { graph, gamma } => RunConfig {
                graph: vec![graph],
                gamma,
                ..RunConfig::base(Command::Critical, c)
            },
            CommandArgs::Scaling { dim, sides } => RunConfig {
                dim: Some(dim),
                sides,
                ..RunConfig::base(Command::Scaling, c)
            },
            CommandArgs::Validate {
                graph,
                seed,
                oracle_cap,
                draws,
                tolerance,
            } => RunConfig {
                graph,
                seed: Some(seed),
                oracle_cap: Some(oracle_cap),
                draws: Some(draws),
                tolerance: Some(tolerance),
                ..RunConfig::base(Command::Validate, c)
            },
            CommandArgs::Figures => RunConfig::base(Command::Figures, c),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        for g in &self.graph {
            parse_graph_spec(g)?;
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        if let Some(g) = self.gamma {
            positive("gamma", g)?;
        }
        if let Some((lo, hi)) = self.gamma_range {
            positive("gamma range start", lo)?;
            if !(hi > lo && hi.is_finite()) {
                return Err(CliError::Config(format!("empty gamma range [{lo}, {hi}]")));
            }
        }
        if let Some(t) = self.time {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("time must be >= 0, got {t}")));
            }
        }
        if let Some((lo, hi)) = self.time_range {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(CliError::Config(format!(
                    "need 0 <= LO < HI, got [{lo}, {hi}]"
                )));
            }
        }
        if let Some(p) = self.points {
            if p < 2 {
                return Err(CliError::Config(format!("need at least 2 points, got {p}")));
            }
        }
        if let Some(tol) = self.tolerance {
            positive("tolerance", tol)?;
        }
        if self.draws == Some(0) {
            return Err(CliError::Config("draws must be at least 1".into()));
        }
        if self.command == Command::Scaling {
            if let Some(&s) = self.sides.iter().find(|&&s| s < 2) {
                return Err(CliError::Config(format!(
                    "lattice side must be at least 2, got {s}"
                )));
            }
            if self.dim == Some(0) {
                return Err(CliError::Config("dimension must be at least 1".into()));
            }
        }
        let plottable = matches!(
            self.command,
            Command::Scan | Command::Evolve | Command::Figures
        );
        if self.plot != PlotKind::None {
            if !plottable {
                return Err(CliError::Config(format!(
                    "`{}` has no plot; use --plot none",
                    self.command.name()
                )));
            }
            if self.format != Format::Csv {
                return Err(CliError::Config(
                    "plots are rendered from CSV; use --format csv".into(),
                ));
            }
        }
        Ok(())
    }
}
