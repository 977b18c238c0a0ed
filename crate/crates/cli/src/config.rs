//! Sectioned `key = value` configuration files.
//!
//! ```text
//! # comment
//! [topology]
//! r_r1_um = 5.0
//! [link] n1 = 500
//! ```
//!
//! A key may follow its section header on the same line. Every key must be
//! known for its section, and each may appear once.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Keys accepted in each section.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "topology",
        &[
            "r_r1_um",
            "r_r2_um",
            "d1_um",
            "d2_um",
            "d_tx1_rx2_um",
            "d_tx2_rx1_um",
            "ell_um",
            "diffusion_um2_per_s",
        ],
    ),
    ("capture", &["max_terms"]),
    ("channel", &["t_end_s", "points", "n1", "t_s", "t_c", "taps"]),
    (
        "simulation",
        &[
            "molecules",
            "dt_s",
            "t_end_s",
            "emitter",
            "absorption",
            "replications",
            "grid_points",
            "dump_hits",
        ],
    ),
    (
        "link",
        &[
            "n1",
            "t_s",
            "duplex",
            "modulation",
            "tau_m",
            "tau_points",
            "thresholds",
            "t_c",
            "a_sic",
            "d_sic",
            "noise_var",
            "isi_taps",
            "symbols",
            "sampling",
            "channel",
        ],
    ),
    ("sweep", &["tau_points", "tc_points"]),
    (
        "compare",
        &["cases", "n1", "t_hd", "noise_var", "tau_points", "tc_points"],
    ),
];

/// Topology keys that have no default.
pub const REQUIRED_TOPOLOGY: [&str; 6] = [
    "r_r1_um",
    "r_r2_um",
    "d1_um",
    "d2_um",
    "d_tx1_rx2_um",
    "diffusion_um2_per_s",
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    entries: BTreeMap<(String, String), Entry>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let mut rest = strip_comment(raw).trim();
            if rest.is_empty() {
                continue;
            }
            if let Some(after) = rest.strip_prefix('[') {
                let close = after.find(']').ok_or_else(|| CliError::Parse {
                    line,
                    message: "unterminated section header".into(),
                })?;
                let name = after[..close].trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(CliError::Parse {
                        line,
                        message: format!("unknown section [{name}]"),
                    });
                }
                section = Some(name.to_string());
                rest = after[close + 1..].trim();
                if rest.is_empty() {
                    continue;
                }
            }
            let Some((key, value)) = rest.split_once('=') else {
                return Err(CliError::Parse {
                    line,
                    message: format!("expected `key = value`, found `{rest}`"),
                });
            };
            let (key, value) = (key.trim(), unquote(value.trim()));
            let Some(sec) = section.as_deref() else {
                return Err(CliError::Parse {
                    line,
                    message: format!("key `{key}` appears before any section header"),
                });
            };
            let known = SCHEMA.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !known.contains(&key) {
                return Err(CliError::Parse {
                    line,
                    message: format!("unknown key `{key}` in [{sec}]"),
                });
            }
            if value.is_empty() {
                return Err(CliError::Parse {
                    line,
                    message: format!("empty value for `{key}`"),
                });
            }
            let previous = entries.insert(
                (sec.to_string(), key.to_string()),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
            if let Some(prev) = previous {
                return Err(CliError::Parse {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {})", prev.line),
                });
            }
        }
        Ok(Self { entries })
    }

    /// SHA-256 over the sorted `section.key=value` lines, so comments,
    /// ordering and whitespace do not change it.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for ((sec, key), e) in &self.entries {
            h.update(format!("{sec}.{key}={}\n", e.value).as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    pub fn contains(&self, section: &str, key: &str) -> bool {
        self.entry(section, key).is_some()
    }

    /// Parsed value, or `None` when the key is absent.
    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        e.value.parse().map(Some).map_err(|err: T::Err| CliError::InvalidValue {
            line: e.line,
            key: format!("{section}.{key}"),
            message: err.to_string(),
        })
    }

    pub fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(section, key)?.ok_or_else(|| CliError::MissingKey {
            section: section.to_string(),
            key: key.to_string(),
        })
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                item.trim().parse().map_err(|err: T::Err| CliError::InvalidValue {
                    line: e.line,
                    key: format!("{section}.{key}"),
                    message: format!("`{}`: {err}", item.trim()),
                })
            })
            .collect::<CliResult<Vec<T>>>()
            .map(Some)
    }

    /// One of a fixed set of lowercase words.
    pub fn choice<'a>(
        &self,
        section: &str,
        key: &str,
        options: &[&'a str],
        default: &'a str,
    ) -> CliResult<&'a str> {
        let Some(e) = self.entry(section, key) else {
            return Ok(default);
        };
        let v = e.value.to_ascii_lowercase();
        options.iter().copied().find(|o| *o == v).ok_or_else(|| CliError::InvalidValue {
            line: e.line,
            key: format!("{section}.{key}"),
            message: format!("expected one of {}, found `{}`", options.join(" | "), e.value),
        })
    }

    /// Error tied to the line that set `section.key`.
    pub fn invalid(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::InvalidValue {
            line: self.entry(section, key).map_or(0, |e| e.line),
            key: format!("{section}.{key}"),
            message: message.into(),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}
