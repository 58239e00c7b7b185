//! Optional JSON config whose keys mirror the long flag names.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Config {
    /// Free text for recipe files.
    #[allow(dead_code)]
    pub description: Option<String>,
    /// Subcommand the file is meant for; checked when present.
    pub command: Option<String>,

    pub v: Option<f64>,
    pub w: Option<f64>,
    pub g: Option<f64>,
    pub a: Option<f64>,
    pub n: Option<usize>,

    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub g_steps: Option<usize>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub a_steps: Option<usize>,
    pub axis: Option<String>,
    pub order_axis: Option<String>,

    pub format: Option<String>,
    pub out: Option<PathBuf>,

    pub vectors: Option<bool>,

    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub points: Option<usize>,
    pub target_re: Option<f64>,
    pub target_im: Option<f64>,

    pub t_total: Option<f64>,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub renormalize: Option<bool>,
    pub until_converged: Option<bool>,
    pub init: Option<String>,
    pub edge_k: Option<usize>,
    pub side: Option<String>,

    pub samples: Option<usize>,
}

impl Config {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(c) = &cfg.command {
            anyhow::ensure!(
                c == command,
                "config {} is for `{c}`, not `{command}`",
                path.display()
            );
        }
        Ok(cfg)
    }
}

/// Flag value if given, else the config value.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Boolean switch: set on the command line, else the config value, else off.
pub fn switch(flag: bool, file: Option<bool>) -> bool {
    flag || file.unwrap_or(false)
}
