//! TOML config files, flag overrides and line-precise validation errors.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A problem with the user's configuration (file or flags). Exit code 4.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Top-level keys of a config file. Each command reads its own table.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub format: Option<String>,
    pub sweep_rademacher: Option<toml::Table>,
    pub certify: Option<toml::Table>,
    pub learn: Option<toml::Table>,
    pub covering: Option<toml::Table>,
    pub quote: Option<toml::Table>,
    pub qra: Option<toml::Table>,
    pub khintchine: Option<toml::Table>,
}

/// A loaded config file, kept as text so errors can point at lines.
#[derive(Debug, Default)]
pub struct Source {
    pub path: Option<PathBuf>,
    text: String,
    pub file: FileConfig,
}

impl Source {
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let file: FileConfig = toml::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: {}", path.display(), e.to_string().trim_end())))?;
        Ok(Self {
            path: Some(path.to_path_buf()),
            text,
            file,
        })
    }

    pub fn table(&self, section: &str) -> Option<&toml::Table> {
        let f = &self.file;
        match section {
            "sweep_rademacher" => f.sweep_rademacher.as_ref(),
            "certify" => f.certify.as_ref(),
            "learn" => f.learn.as_ref(),
            "covering" => f.covering.as_ref(),
            "quote" => f.quote.as_ref(),
            "qra" => f.qra.as_ref(),
            "khintchine" => f.khintchine.as_ref(),
            _ => None,
        }
    }

    /// 1-based line of `key = ...` inside `[section]` (or at top level when
    /// `section` is empty).
    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('[') {
                current = rest.trim_end_matches(']').trim().to_string();
                continue;
            }
            if current != section {
                continue;
            }
            if let Some((k, _)) = line.split_once('=') {
                if k.trim().trim_matches('"') == key {
                    return Some(i + 1);
                }
            }
        }
        None
    }

    /// Where a setting came from, for error messages.
    pub fn locate(&self, section: &str, key: &str, from_flag: bool) -> String {
        if !from_flag {
            if let (Some(path), Some(line)) = (&self.path, self.line_of(section, key)) {
                let name = if section.is_empty() {
                    key.to_string()
                } else {
                    format!("{section}.{key}")
                };
                return format!("{}:{line}: {name}", path.display());
            }
        }
        format!("--{}", key.replace('_', "-"))
    }

    /// Overlays the flags (non-null entries of `flags`) on the file table
    /// `section` and deserializes the result. Returns the merged settings and
    /// the names of the keys that came from flags.
    pub fn merge<T: Serialize + DeserializeOwned>(
        &self,
        section: &str,
        flags: &T,
    ) -> Result<(T, Vec<String>), ConfigError> {
        let mut merged = serde_json::Map::new();
        if let Some(table) = self.table(section) {
            let v = serde_json::to_value(table).map_err(|e| ConfigError(e.to_string()))?;
            if let Value::Object(m) = v {
                merged = m;
            }
        }
        let mut from_flags = Vec::new();
        let flag_value = serde_json::to_value(flags).map_err(|e| ConfigError(e.to_string()))?;
        if let Value::Object(m) = flag_value {
            for (k, v) in m {
                if !v.is_null() {
                    from_flags.push(k.clone());
                    merged.insert(k, v);
                }
            }
        }
        let value = Value::Object(merged);
        let parsed = serde_json::from_value(value).map_err(|e| {
            // unknown keys and type errors in the table
            let msg = e.to_string();
            let key = msg
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_default();
            match (&self.path, self.line_of(section, &key)) {
                (Some(p), Some(line)) => {
                    ConfigError(format!("{}:{line}: [{section}] {msg}", p.display()))
                }
                (Some(p), None) => ConfigError(format!("{}: [{section}] {msg}", p.display())),
                _ => ConfigError(msg),
            }
        })?;
        Ok((parsed, from_flags))
    }
}

/// Validation context for one command: produces errors that name the file
/// line or the flag that supplied the bad value.
pub struct Checker<'a> {
    pub source: &'a Source,
    pub section: &'static str,
    pub from_flags: Vec<String>,
}

impl Checker<'_> {
    pub fn fail(&self, key: &str, msg: impl fmt::Display) -> ConfigError {
        let from_flag = self.from_flags.iter().any(|k| k == key);
        ConfigError(format!("{}: {msg}", self.source.locate(self.section, key, from_flag)))
    }

    pub fn require<T: Clone>(&self, key: &str, v: &Option<T>) -> Result<T, ConfigError> {
        v.clone().ok_or_else(|| {
            ConfigError(format!(
                "missing setting '{key}' (flag --{} or key [{}] {key})",
                key.replace('_', "-"),
                self.section
            ))
        })
    }

    pub fn positive(&self, key: &str, v: usize) -> Result<usize, ConfigError> {
        if v == 0 {
            return Err(self.fail(key, "must be positive"));
        }
        Ok(v)
    }

    pub fn open_unit(&self, key: &str, v: f64) -> Result<f64, ConfigError> {
        if !(v > 0.0 && v < 1.0) {
            return Err(self.fail(key, format!("{v} is outside (0, 1)")));
        }
        Ok(v)
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str, s: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        s.parse().map_err(|e| self.fail(key, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_lines_per_section() {
        let src = Source {
            path: Some("c.toml".into()),
            text: "seed = 1\n[learn]\nd = 3\n\n[quote]\nd = 4\n".into(),
            file: FileConfig::default(),
        };
        assert_eq!(src.line_of("", "seed"), Some(1));
        assert_eq!(src.line_of("learn", "d"), Some(3));
        assert_eq!(src.line_of("quote", "d"), Some(6));
        assert_eq!(src.locate("quote", "d", false), "c.toml:6: quote.d");
        assert_eq!(src.locate("quote", "d", true), "--d");
    }
}
