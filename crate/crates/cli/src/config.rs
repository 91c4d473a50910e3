//! Embedded run configurations.
//!
//! Every output carries the resolved settings of the run that produced it:
//! CSV files start with `# key = value` lines and JSON files have a
//! `"config"` object. `--config FILE` turns such a block back into command
//! line flags, inserted before the user's own flags so that those win.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

/// Keys that describe a run but are not command-line flags.
const INFORMATIONAL: [&str; 3] = ["command", "rng", "version"];

/// Ordered `key = value` settings of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut cfg = Self::default();
        cfg.push("command", command);
        cfg.push("version", env!("CARGO_PKG_VERSION"));
        cfg.push("rng", icspec::rng::RNG_ALGORITHM);
        cfg
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_list<T: ToString>(&mut self, key: &str, values: &[T]) -> &mut Self {
        let joined = values.iter().map(T::to_string).collect::<Vec<_>>().join(",");
        self.push(key, joined)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// `# key = value` lines for the top of a CSV file.
    pub fn csv_preamble(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        Value::Object(map)
    }

    /// Reads the block embedded in a CSV or JSON output, or a flat
    /// `key = value` file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        if text.trim_start().starts_with('{') {
            let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
            let block = value.get("config").unwrap_or(&value);
            let obj = block.as_object().ok_or("config is not a JSON object")?;
            let entries = obj
                .iter()
                .map(|(k, v)| {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    (k.clone(), v)
                })
                .collect();
            return Ok(Self { entries });
        }
        let mut entries = Vec::new();
        for line in text.lines() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let (commented, body) = match trimmed.strip_prefix('#') {
                Some(rest) => (true, rest.trim()),
                None => (false, trimmed),
            };
            match body.split_once('=') {
                Some((k, v)) => entries.push((k.trim().to_string(), v.trim().to_string())),
                None if commented => continue,
                None => break,
            }
        }
        if entries.is_empty() {
            return Err("no configuration entries found".into());
        }
        Ok(Self { entries })
    }

    /// Flags reproducing this configuration.
    pub fn to_flags(&self) -> Vec<OsString> {
        let mut flags = Vec::new();
        for (k, v) in &self.entries {
            if INFORMATIONAL.contains(&k.as_str()) {
                continue;
            }
            match v.as_str() {
                "true" => flags.push(format!("--{k}").into()),
                "false" => flags.push(format!("--no-{k}").into()),
                _ => {
                    flags.push(format!("--{k}").into());
                    flags.push(v.into());
                }
            }
        }
        flags
    }
}

/// Options that take a value and may precede the subcommand.
const GLOBAL_VALUE_FLAGS: [&str; 2] = ["--threads", "--config"];

/// Rewrites `argv` so that the flags stored in a `--config` file follow
/// the subcommand, ahead of the user's own flags.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut config_path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut iter = argv.into_iter();
    if let Some(program) = iter.next() {
        rest.push(program);
    }
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let value = iter
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            config_path = Some(value);
        } else if let Some(value) = s.strip_prefix("--config=") {
            config_path = Some(value.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config_path else {
        return Ok(rest);
    };
    let cfg = RunConfig::load(Path::new(&path))?;

    // Locate the subcommand: the first bare word not consumed by a global flag.
    let mut idx = 1;
    while idx < rest.len() {
        let s = rest[idx].to_string_lossy();
        if GLOBAL_VALUE_FLAGS.contains(&s.as_ref()) {
            idx += 2;
        } else if s.starts_with('-') {
            idx += 1;
        } else {
            break;
        }
    }
    let command = cfg.get("command").map(str::to_string);
    if idx >= rest.len() {
        // No subcommand given: take it from the file.
        let command = command.ok_or_else(|| CliError::Usage("config names no command".into()))?;
        rest.push(command.into());
    } else if let Some(command) = command {
        if rest[idx].to_string_lossy() != command {
            return Err(CliError::Usage(format!(
                "config was written by '{command}', not '{}'",
                rest[idx].to_string_lossy()
            )));
        }
    }
    let insert_at = (idx + 1).min(rest.len());
    let tail = rest.split_off(insert_at);
    rest.extend(cfg.to_flags());
    rest.extend(tail);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_preamble_round_trips() {
        let mut cfg = RunConfig::new("estimate");
        cfg.push("d", 32).push("fpc", true).push_list("levels", &[0.25, 0.5]);
        let text = format!("{}ell,lambda\n0,0\n", cfg.csv_preamble());
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
        let flags: Vec<String> = cfg
            .to_flags()
            .into_iter()
            .map(|f| f.into_string().unwrap())
            .collect();
        assert_eq!(flags, ["--d", "32", "--fpc", "--levels", "0.25,0.5"]);
    }

    #[test]
    fn json_block_is_read() {
        let cfg = RunConfig::parse(r#"{"statistic": 1.0, "config": {"command": "test-tr", "b": "32", "fpc": "false"}}"#)
            .unwrap();
        assert_eq!(cfg.get("b"), Some("32"));
        let flags: Vec<String> = cfg.to_flags().into_iter().map(|f| f.into_string().unwrap()).collect();
        assert_eq!(flags, ["--b", "32", "--no-fpc"]);
    }

    #[test]
    fn flat_file_and_errors() {
        assert_eq!(RunConfig::parse("d = 16\nalpha=0.1\n").unwrap().entries.len(), 2);
        assert!(RunConfig::parse("x\n1\n2\n").is_err());
    }
}
