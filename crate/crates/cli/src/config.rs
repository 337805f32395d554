//! `key = value` configuration files merged into the command line.
//!
//! Keys are long flag names (`ahcp`, `ttilde`, `hcp_envelope`, ...). Keys
//! before any `[section]` apply to every subcommand; keys under `[trace]`,
//! `[scan2d]`, ... apply only to that subcommand. Flags given on the command
//! line win over the file. `true`/`false` toggle switches such as `approx`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config {}: {}", self.path, self.message)
        } else {
            write!(f, "config {}:{}: {}", self.path, self.line, self.message)
        }
    }
}

/// Parsed file: section name (empty for the global part) to ordered keys.
#[derive(Debug, Default, PartialEq)]
pub struct ConfigFile {
    sections: BTreeMap<String, Vec<(String, String)>>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        let mut cfg = ConfigFile::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| ConfigError {
                path: path.to_string(),
                line: i + 1,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header `{line}`")))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let key = key.trim().replace('_', "-");
            if key.is_empty() || key.starts_with('-') {
                return Err(err(format!("bad key `{}`", key)));
            }
            if key == "config" {
                return Err(err("nested `config` keys are not supported".into()));
            }
            let value = value.trim().trim_matches('"').to_string();
            cfg.sections.entry(section.clone()).or_default().push((key, value));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: shown.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        Self::parse(&text, &shown)
    }

    /// Extra arguments for `subcommand` that are not already on the command line.
    pub fn extra_args(&self, subcommand: Option<&str>, argv: &[String]) -> Vec<String> {
        let given: Vec<&str> = argv
            .iter()
            .filter_map(|a| a.strip_prefix("--"))
            .map(|a| a.split('=').next().unwrap_or(a))
            .collect();
        let mut out = Vec::new();
        let mut seen: Vec<String> = Vec::new();
        // section entries, then global ones
        let scoped = subcommand.and_then(|s| self.sections.get(s)).into_iter().flatten();
        let global = self.sections.get("").into_iter().flatten();
        for (key, value) in scoped.chain(global) {
            if given.contains(&key.as_str()) || seen.contains(key) {
                continue;
            }
            seen.push(key.clone());
            match value.as_str() {
                "true" => out.push(format!("--{key}")),
                "false" => {}
                _ => out.push(format!("--{key}={value}")),
            }
        }
        out
    }
}

/// Value of `--config` in `argv`, if any.
pub fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}
