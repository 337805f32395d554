//! Output files, JSON rendering and the run manifest that accompanies them.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use orient_core::observables::{DEFAULT_GAMMA, DEFAULT_RESOLUTION};
use orient_core::optimal::MAX_TABLE_DIM;
use orient_core::propagator::{DEFAULT_AUDIT_TOL, MAX_ADAPTIVE_JMAX};
use orient_core::scan::DEFAULT_RATIO;
use orient_core::thermal::DEFAULT_WEIGHT_CUTOFF;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Serialize)]
pub struct Defaults {
    pub gamma: f64,
    pub resolution: usize,
    pub ratio: f64,
    pub audit_tol: f64,
    pub max_adaptive_jmax: u32,
    pub thermal_weight_cutoff: f64,
    pub optimal_table_max_n: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            resolution: DEFAULT_RESOLUTION,
            ratio: DEFAULT_RATIO,
            audit_tol: DEFAULT_AUDIT_TOL,
            max_adaptive_jmax: MAX_ADAPTIVE_JMAX,
            thermal_weight_cutoff: DEFAULT_WEIGHT_CUTOFF,
            optimal_table_max_n: MAX_TABLE_DIM,
        }
    }
}

/// `j_max` values chosen by the adaptive truncation.
#[derive(Debug, Default, Serialize)]
pub struct JmaxUsage {
    pub min: Option<u32>,
    pub max: Option<u32>,
    pub distinct: Vec<u32>,
}

impl JmaxUsage {
    pub fn from_values(values: impl IntoIterator<Item = u32>) -> Self {
        let mut distinct: Vec<u32> = values.into_iter().filter(|&j| j > 0).collect();
        distinct.sort_unstable();
        distinct.dedup();
        Self {
            min: distinct.first().copied(),
            max: distinct.last().copied(),
            distinct,
        }
    }
}

/// Provenance record written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub parameters: Value,
    pub defaults: Defaults,
    pub execution: String,
    pub format: Format,
    pub output: Option<String>,
    pub wall_seconds: f64,
    pub j_max_used: JmaxUsage,
    pub summary: Value,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, parameters: impl Serialize) -> Self {
        Self {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            parameters: to_value(parameters),
            defaults: Defaults::default(),
            execution: String::new(),
            format: Format::Csv,
            output: None,
            wall_seconds: 0.0,
            j_max_used: JmaxUsage::default(),
            summary: Value::Null,
        }
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_seconds = elapsed.as_secs_f64();
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn json_text(v: impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(&v).unwrap_or_else(|_| "null".into());
    s.push('\n');
    s
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Write `body` to `out` (or stdout) and the manifest beside it (or to stderr).
pub fn emit(body: &str, out: Option<&Path>, manifest: &RunManifest) -> io::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, body)?;
            fs::write(manifest_path(path), json_text(manifest))?;
        }
        None => {
            io::stdout().lock().write_all(body.as_bytes())?;
            io::stderr().lock().write_all(json_text(manifest).as_bytes())?;
        }
    }
    Ok(())
}
