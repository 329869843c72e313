//! Experiment configuration files.
//!
//! Grammar, one item per line:
//!
//! ```text
//! line    := blank | comment | section | entry
//! comment := ('#' | ';') any*
//! section := '[' name ']'
//! entry   := key '=' value [comment]
//! ```
//!
//! Keys before the first section belong to the unnamed section `""`.
//! Names and keys are case-sensitive; whitespace around them is ignored.
//! A key may appear once per section.
//!
//! Recognized sections and keys:
//!
//! ```text
//! [channel]  eps1, eps2, eps12
//! [weights]  alpha1
//! [policy]   kind = randomized | max-weight, coded = true | false, mu = m1,m2,m3
//! [run]      horizon, reps, seed, initial = h1,h2,w1,w2
//! [sweep]    eps_start, eps_stop, eps_step, eps12_scale, tolerance, out
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

const KNOWN: &[(&str, &[&str])] = &[
    ("channel", &["eps1", "eps2", "eps12"]),
    ("weights", &["alpha1"]),
    ("policy", &["kind", "coded", "mu"]),
    ("run", &["horizon", "reps", "seed", "initial"]),
    ("sweep", &["eps_start", "eps_stop", "eps_step", "eps12_scale", "tolerance", "out"]),
];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: String,
    line: usize,
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

fn strip_comment(s: &str) -> &str {
    match s.find(['#', ';']) {
        Some(i) => &s[..i],
        None => s,
    }
}

impl ConfigFile {
    /// Parses any `[section]` / `key = value` text without checking names.
    pub fn parse_any(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse { line, msg: "section header is missing ']'".into() })?
                    .trim();
                if name.is_empty() {
                    return Err(Error::Parse { line, msg: "empty section name".into() });
                }
                current = name.to_string();
                cfg.sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected 'key = value', got '{body}'") })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse { line, msg: "empty key".into() });
            }
            let section = cfg.sections.entry(current.clone()).or_default();
            if let Some(prev) = section.get(key) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate key '{key}' (first set on line {})", prev.line),
                });
            }
            section.insert(key.to_string(), Entry { value: value.trim().to_string(), line });
        }
        Ok(cfg)
    }

    /// Parses and rejects sections or keys this crate does not use.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg = Self::parse_any(text)?;
        for (name, entries) in &cfg.sections {
            let known = KNOWN.iter().find(|(s, _)| s == name).map(|(_, keys)| *keys);
            for (key, e) in entries {
                match known {
                    None => {
                        return Err(Error::Parse { line: e.line, msg: format!("unknown section '[{name}]'") })
                    }
                    Some(keys) if !keys.contains(&key.as_str()) => {
                        return Err(Error::Parse { line: e.line, msg: format!("unknown key '{key}' in [{name}]") })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|e| e.value.as_str())
    }

    /// Typed lookup; `Ok(None)` when absent.
    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.sections.get(section).and_then(|s| s.get(key)) else {
            return Ok(None);
        };
        e.value
            .parse::<T>()
            .map(Some)
            .map_err(|err| Error::Parse { line: e.line, msg: format!("[{section}] {key} = '{}': {err}", e.value) })
    }

    /// Comma-separated list of numbers.
    pub fn get_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.sections.get(section).and_then(|s| s.get(key)) else {
            return Ok(None);
        };
        parse_list(&e.value)
            .map(Some)
            .map_err(|msg| Error::Parse { line: e.line, msg: format!("[{section}] {key}: {msg}") })
    }
}

/// Parses `a,b,c` into numbers.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{}': {e}", p.trim())))
        .collect()
}
