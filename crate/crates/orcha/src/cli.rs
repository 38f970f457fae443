use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use orcha_core::config::{Config, ConfigError};
use orcha_core::graph::BuildError;
use orcha_core::model::{self, ChartSpec, Violation};
use orcha_core::render::{render, RenderStats};
use orcha_core::session::write_atomic;
use thiserror::Error;

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "ORCHA_SEED";

#[derive(Debug, Parser)]
#[command(name = "orcha", version, about = "Organic narrative charts from CSV tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a chart to an SVG file.
    Render(RenderArgs),
    /// Serve the authoring API for a dataset directory.
    Serve(ServeArgs),
}

/// Overrides shared by both commands.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    /// Discretization step in chart time units.
    #[arg(long)]
    pub step: Option<f64>,
    /// Layout and texture seed; wins over ORCHA_SEED and the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub streams: PathBuf,
    #[arg(long)]
    pub links: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory holding streams.csv, links.csv and labels.csv.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("ORCHA_SEED must be an unsigned integer, got `{0}`")]
    BadSeed(String),
    #[error("{0}")]
    Parse(model::Error),
    #[error("{} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Build(String),
}

impl CliError {
    /// Lines to print on failure: one per violation, or the error itself.
    pub fn report(&self) -> Vec<String> {
        match self {
            CliError::Invalid(v) => v.iter().map(|v| format!("error: {v}")).collect(),
            other => vec![format!("error: {other}")],
        }
    }
}

impl From<model::Error> for CliError {
    fn from(e: model::Error) -> Self {
        match e {
            model::Error::Invalid(v) => CliError::Invalid(v),
            other => CliError::Parse(other),
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Invalid(v) => CliError::Invalid(v),
            other => CliError::Build(other.to_string()),
        }
    }
}

/// Config file, then `ORCHA_SEED`, then flags.
pub fn resolve_config(args: &ConfigArgs, env_seed: Option<&str>) -> Result<Config, CliError> {
    let mut config = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(raw) = env_seed.map(str::trim).filter(|s| !s.is_empty()) {
        config.style.seed = raw.parse().map_err(|_| CliError::BadSeed(raw.to_string()))?;
    }
    if let Some(w) = args.width {
        config.canvas.width = w;
    }
    if let Some(h) = args.height {
        config.canvas.height = h;
    }
    if let Some(step) = args.step {
        config.graph.step = step;
    }
    if let Some(seed) = args.seed {
        config.style.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn load_spec(args: &RenderArgs) -> Result<ChartSpec, CliError> {
    let streams = read(&args.streams)?;
    let links = args.links.as_deref().map(read).transpose()?;
    let labels = args.labels.as_deref().map(read).transpose()?;
    Ok(ChartSpec::from_csv(&streams, links.as_deref(), labels.as_deref())?)
}

/// Renders to `args.out`. Nothing is written unless the whole pipeline succeeds.
pub fn run_render(args: &RenderArgs, env_seed: Option<&str>) -> Result<RenderStats, CliError> {
    let config = resolve_config(&args.config, env_seed)?;
    let spec = load_spec(args)?;
    let rendered = render(&spec, &config)?;
    write_atomic(&args.out, rendered.svg.xml.as_bytes())
        .map_err(|e| CliError::Io(args.out.display().to_string(), e))?;
    Ok(rendered.stats)
}

pub fn print_stats(stats: &RenderStats, out: &Path, mut err: impl Write) {
    let _ = writeln!(
        err,
        "nodes={} edges={} ticks={} -> {}",
        stats.nodes,
        stats.edges,
        stats.ticks,
        out.display()
    );
}
