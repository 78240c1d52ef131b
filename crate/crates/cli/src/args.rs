use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "hypack", version, about = "Packings, nets and bunched-ball search in hyperbolic space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate and verify the planar packing of B(o, R) by balls of radius C.
    Pack(Opts),
    /// Tabulate family size and its lower bound over a range of R.
    Growth(Opts),
    /// Find k far-apart balls with bunched images and certify them.
    Search(Opts),
    /// Extrinsic against intrinsic distance on the bump-graph surface.
    DemoFlat(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Every flag is optional so that a config file can fill the gaps; flags
/// given on the command line win.
#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Opts {
    /// Small-ball radius.
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// Enclosing-ball radius.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    #[arg(long = "R-from")]
    #[serde(rename = "R_from")]
    pub r_from: Option<f64>,
    #[arg(long = "R-to")]
    #[serde(rename = "R_to")]
    pub r_to: Option<f64>,
    /// Largest radius of the search schedule.
    #[arg(long = "R-max")]
    #[serde(rename = "R_max")]
    pub r_max: Option<f64>,
    /// Explicit search schedule, comma separated.
    #[arg(long = "R-schedule", value_delimiter = ',')]
    #[serde(rename = "R_schedule")]
    pub r_schedule: Option<Vec<f64>>,
    /// Dimension of the hyperbolic space.
    #[arg(long)]
    pub m: Option<usize>,
    /// Maximum number of centres per family.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Map label: poincare, busemann, constant or radial.
    #[arg(long)]
    pub map: Option<String>,
    /// Ball radius of the search.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Configuration size for search; largest bump index for demo-flat.
    #[arg(long)]
    pub k: Option<usize>,
    /// Bunch whole balls in Hausdorff distance.
    #[arg(long)]
    #[serde(default)]
    pub hausdorff: bool,
    /// Random points per ball in the sampled certificate check.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Slack on verification inequalities.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of the options above; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Opts {
    /// Fills unset flags from the config file, if one was given.
    pub fn resolve(self) -> Result<Self, String> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        Ok(Self {
            c: self.c.or(file.c),
            big_r: self.big_r.or(file.big_r),
            r_from: self.r_from.or(file.r_from),
            r_to: self.r_to.or(file.r_to),
            r_max: self.r_max.or(file.r_max),
            r_schedule: self.r_schedule.or(file.r_schedule),
            m: self.m.or(file.m),
            cap: self.cap.or(file.cap),
            map: self.map.or(file.map),
            r: self.r.or(file.r),
            eps: self.eps.or(file.eps),
            k: self.k.or(file.k),
            hausdorff: self.hausdorff || file.hausdorff,
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed),
            tolerance: self.tolerance.or(file.tolerance),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            config: Some(path),
        })
    }
}

fn read_config(path: &Path) -> Result<Opts, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}
