use std::path::{Path, PathBuf};

use serde::Deserialize;
use srvf::io::{read_to_string, Format};
use srvf::{DpOptions, SrvfError};

/// Settings shared by all commands after layering flags over the config file
/// over the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub grid_n: usize,
    pub dp_w: usize,
    pub axis_moves: bool,
    pub tol: f64,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            grid_n: 1024,
            dp_w: 4,
            axis_moves: true,
            tol: 1e-6,
            output_dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

/// One layer of settings; unset keys fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub dp_w: Option<usize>,
    pub axis_moves: Option<bool>,
    pub tol: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Overrides {
    pub fn from_toml(text: &str, path: &Path) -> srvf::Result<Self> {
        toml::from_str(text).map_err(|e| SrvfError::Config(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> srvf::Result<Self> {
        Self::from_toml(&read_to_string(path)?, path)
    }

    fn apply(&self, cfg: &mut CliConfig) {
        if let Some(v) = self.grid_n {
            cfg.grid_n = v;
        }
        if let Some(v) = self.dp_w {
            cfg.dp_w = v;
        }
        if let Some(v) = self.axis_moves {
            cfg.axis_moves = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
    }
}

impl CliConfig {
    /// `flags` win over `file`, which wins over the defaults.
    pub fn resolve(flags: &Overrides, file: Option<&Overrides>) -> srvf::Result<Self> {
        let mut cfg = CliConfig::default();
        if let Some(file) = file {
            file.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> srvf::Result<()> {
        if self.grid_n < 2 {
            return Err(SrvfError::Config(format!(
                "grid_n must be ≥ 2, got {}",
                self.grid_n
            )));
        }
        if self.dp_w < 1 {
            return Err(SrvfError::Config("dp_w must be ≥ 1".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(SrvfError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn dp_options(&self) -> DpOptions {
        DpOptions::new(self.dp_w, self.axis_moves)
    }

    /// `output_dir/name.ext` for the configured format.
    pub fn output_path(&self, name: &str) -> PathBuf {
        self.output_dir
            .join(format!("{name}.{}", self.format.extension()))
    }
}
