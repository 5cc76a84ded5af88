//! Key-value run files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' any*
//! entry   := key ws* '=' ws* value ws* ('#' any*)?
//! key     := [a-z0-9_-]+        ('-' and '_' are interchangeable)
//! value   := any non-'#' text, trimmed; may be empty only if quoted as ""
//! ```
//!
//! Keys match the long flag names of the subcommand. Repeated keys are an
//! error, as are keys the subcommand does not know.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, (usize, String)>,
}

fn normalize(key: &str) -> String {
    key.replace('-', "_")
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| ConfigError {
                line: line_no,
                message,
            };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {body:?}")))?;
            let key = key.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
            {
                return Err(err(format!("invalid key {key:?}")));
            }
            let mut value = value.trim();
            if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                value = &value[1..value.len() - 1];
            } else if value.is_empty() {
                return Err(err(format!("missing value for {key}")));
            }
            let key = normalize(key);
            if let Some((first, _)) = entries.get(&key) {
                return Err(err(format!("{key} already set on line {first}")));
            }
            entries.insert(key, (line_no, value.to_string()));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(|(_, v)| v.as_str())
    }

    /// Parsed value for `key`, if present.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let Some((line, value)) = self.entries.get(&normalize(key)) else {
            return Ok(None);
        };
        value.parse().map(Some).map_err(|e| ConfigError {
            line: *line,
            message: format!("{key}: {e}"),
        })
    }

    /// Rejects any key outside `allowed`.
    pub fn restrict(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for (key, (line, _)) in &self.entries {
            if !allowed.iter().any(|a| normalize(a) == *key) {
                return Err(ConfigError {
                    line: *line,
                    message: format!("unknown key {key}"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_comments() {
        let cfg = Config::parse("# portrait\nxi-min = 0.01\n\nxi_max=2 # upper\nlabel = \"a b\"\n").unwrap();
        assert_eq!(cfg.get::<f64>("xi_min").unwrap(), Some(0.01));
        assert_eq!(cfg.get::<f64>("xi-max").unwrap(), Some(2.0));
        assert_eq!(cfg.raw("label"), Some("a b"));
        assert_eq!(cfg.get::<f64>("missing").unwrap(), None);
    }

    #[test]
    fn reports_line_numbers() {
        let e = Config::parse("a = 1\nnonsense\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = Config::parse("a = 1\na = 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = Config::parse("Upper = 1\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = Config::parse("a =\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn typed_errors_carry_the_line() {
        let cfg = Config::parse("\nn = twenty\n").unwrap();
        let e = cfg.get::<usize>("n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn restrict_rejects_unknown_keys() {
        let cfg = Config::parse("xi_min = 1\nbogus = 2\n").unwrap();
        assert!(cfg.restrict(&["xi-min", "bogus"]).is_ok());
        assert_eq!(cfg.restrict(&["xi-min"]).unwrap_err().line, 2);
    }
}
