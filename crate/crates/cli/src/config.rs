//! Optional TOML config. Keys match the long flag names; a flag given on the
//! command line always wins.

use std::path::Path;

use serde::Deserialize;

use crate::args::{AlgorithmChoice, DanglingChoice, OutputFormat};
use crate::failure::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub t: Option<u32>,
    pub min_refs: Option<u32>,
    pub emit_undefined: Option<bool>,
    pub parallelism: Option<usize>,
    pub algorithm: Option<AlgorithmChoice>,
    pub dangling: Option<DanglingChoice>,
    pub lenient_years: Option<bool>,
    pub output_format: Option<OutputFormat>,
    pub top_fraction: Option<f64>,
    pub bin_width: Option<f64>,
    pub seed: Option<u64>,
    pub sample: Option<usize>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, Failure> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Failure::invalid(format!("config {}: {e}", path.display())))
    }
}
