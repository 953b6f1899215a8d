use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "fluxvol",
    version,
    about = "Volumes enclosed by flux surfaces of integrable magnetic fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume between two surfaces by one or more methods.
    Volume(RunArgs),
    /// Reproduce an accuracy table (table1 or table2).
    Table {
        which: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Return times and mean densities along a ladder of surfaces.
    Diagnostics(RunArgs),
    /// Run the seeded invariant suite.
    Check(RunArgs),
    /// Print the effective configuration.
    Config(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Volume(_) => "volume",
            Command::Table { .. } => "table",
            Command::Diagnostics(_) => "diagnostics",
            Command::Check(_) => "check",
            Command::Config(_) => "config",
        }
    }
}

/// Options shared by every subcommand. Each flag overrides the config key
/// of the same name; `--set key=value` reaches any key.
#[derive(Debug, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override any config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// axisym or helical.
    #[arg(long)]
    pub field: Option<String>,
    /// Comma-separated: grid, contour, thm1, thm3p, thm4.
    #[arg(long)]
    pub method: Option<String>,
    /// inner, island or outer.
    #[arg(long)]
    pub region: Option<String>,
    /// Outer label; the inner one defaults to the region anchor.
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long)]
    pub psi1: Option<String>,
    #[arg(long)]
    pub psi2: Option<String>,
    /// Inner surface through the section point (y1, 0).
    #[arg(long)]
    pub y1: Option<String>,
    /// Outer surface through the section point (y2, 0).
    #[arg(long)]
    pub y2: Option<String>,
    /// Comma-separated surfaces for `diagnostics`.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
    /// Ladder intervals.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub separatrix_clip: Option<String>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub grid_x: Option<String>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub grid_y: Option<String>,
    /// n1,n2
    #[arg(long)]
    pub grid_counts: Option<String>,
    #[arg(long)]
    pub grid_layout: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub n_avg: Option<String>,
    #[arg(long)]
    pub n_g: Option<String>,
    /// `exact` or a number.
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON sidecar path; defaults to the CSV path with a .json extension.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Exit with status 2 on any numerical failure.
    #[arg(long)]
    pub strict: bool,
    /// Record runtimes in table output.
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub unit_density: bool,
}

impl RunArgs {
    /// Defaults, then the config file, then `--set`, then named flags.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
            c.apply_text(&text)?;
        }
        for kv in &self.set {
            c.set_pair(kv)?;
        }
        let flags: [(&str, &Option<String>); 20] = [
            ("field", &self.field),
            ("method", &self.method),
            ("region", &self.region),
            ("psi", &self.psi),
            ("psi1", &self.psi1),
            ("psi2", &self.psi2),
            ("y1", &self.y1),
            ("y2", &self.y2),
            ("levels", &self.levels),
            ("n", &self.n),
            ("separatrix_clip", &self.separatrix_clip),
            ("grid.x", &self.grid_x),
            ("grid.y", &self.grid_y),
            ("grid.counts", &self.grid_counts),
            ("grid.layout", &self.grid_layout),
            ("q", &self.q),
            ("n_avg", &self.n_avg),
            ("n_g", &self.n_g),
            ("reference", &self.reference),
            ("seed", &self.seed),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, v)?;
            }
        }
        if let Some(p) = &self.out {
            c.out = Some(p.clone());
        }
        if let Some(p) = &self.meta {
            c.meta = Some(p.clone());
        }
        c.strict |= self.strict;
        c.timings |= self.timings;
        c.options.unit_density |= self.unit_density;
        Ok(c)
    }
}
