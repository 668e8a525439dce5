//! Run configuration files.
//!
//! Line-oriented `key = value` pairs grouped under `[section]` headers.
//! `#` starts a comment, lists are comma-separated. Recognised sections:
//!
//! ```text
//! [run]        algorithm, hamiltonian, accelerator, shots, seed
//! [ansatz]     kind (hf | uccsd | kernel | none), ne, nq, file, parameters
//!              (`ne` alone, without `kind`, feeds `n-electrons`)
//! [optimizer]  name, then any optimizer option
//! [options]    forwarded to the algorithm
//! [sweep]      hamiltonians (list of files), labels (optional list)
//! ```
//!
//! Values in `[optimizer]` and `[options]` are typed by their spelling:
//! `true`/`false` are booleans, digits without `.` or exponent are
//! integers, other numbers (including `inf`) are reals, comma lists of
//! numbers are real lists, other comma lists are string lists, anything
//! else is a string. Keys in [`REAL_LIST_KEYS`] are always real lists.

use std::collections::BTreeMap;
use std::fmt;

use crate::registry::{HeterogeneousMap, Value};

pub const SECTIONS: [&str; 5] = ["ansatz", "optimizer", "options", "run", "sweep"];

/// Keys whose values are always real lists, even when a single number is
/// given.
pub const REAL_LIST_KEYS: [&str; 4] = ["initial-parameters", "initial-point", "lower-bounds", "upper-bounds"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// One `key = value` entry with its source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// Parsed configuration: section name to ordered entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, "section header is missing `]`"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(
                        line,
                        format!("unknown section `[{name}]`; expected one of {}", SECTIONS.join(", ")),
                    ));
                }
                cfg.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, found `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(err(line, "empty key"));
            }
            let section = current
                .as_ref()
                .ok_or_else(|| err(line, format!("`{key}` appears before any [section] header")))?;
            let entries = cfg.sections.get_mut(section).expect("section exists");
            if let Some(prev) = entries.get(key) {
                return Err(err(line, format!("duplicate key `{key}` (first set on line {})", prev.line)));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(cfg)
    }

    pub fn section(&self, name: &str) -> Option<&BTreeMap<String, Entry>> {
        self.sections.get(name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn string(&self, section: &str, key: &str) -> Option<&str> {
        self.get(section, key).map(|e| e.value.as_str())
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.string(section, key)
            .ok_or_else(|| err(0, format!("missing `{key}` in [{section}]")))
    }

    /// A non-negative integer entry.
    pub fn count(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<u64>()
                .map(Some)
                .map_err(|_| err(e.line, format!("`{key}` must be a non-negative integer, found `{}`", e.value))),
        }
    }

    pub fn list(&self, section: &str, key: &str) -> Option<Vec<String>> {
        self.string(section, key).map(split_list)
    }

    /// Every entry of `section` except `skip`, typed as in the module docs.
    pub fn typed_section(&self, section: &str, skip: &[&str]) -> Result<HeterogeneousMap, ConfigError> {
        let mut map = HeterogeneousMap::new();
        if let Some(entries) = self.section(section) {
            for (k, e) in entries {
                if skip.contains(&k.as_str()) {
                    continue;
                }
                let v = match typed_value(&e.value).map_err(|m| err(e.line, m))? {
                    Value::Real(x) if REAL_LIST_KEYS.contains(&k.as_str()) => Value::RealList(vec![x]),
                    Value::Int(i) if REAL_LIST_KEYS.contains(&k.as_str()) => Value::RealList(vec![i as f64]),
                    v => v,
                };
                map.insert(k.clone(), v);
            }
        }
        Ok(map)
    }
}

pub fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn is_integer(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn parse_real(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    (!v.is_nan()).then_some(v)
}

/// Types a raw value by its spelling.
pub fn typed_value(s: &str) -> Result<Value, String> {
    if s.contains(',') {
        let items = split_list(s);
        if items.is_empty() {
            return Err(format!("empty list `{s}`"));
        }
        if let Some(reals) = items.iter().map(|x| parse_real(x)).collect::<Option<Vec<f64>>>() {
            return Ok(Value::RealList(reals));
        }
        return Ok(Value::StrList(items));
    }
    match s {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if is_integer(s) {
        return s.parse::<i64>().map(Value::Int).map_err(|e| format!("`{s}`: {e}"));
    }
    if let Some(v) = parse_real(s) {
        return Ok(Value::Real(v));
    }
    if s.is_empty() {
        return Err("empty value".into());
    }
    Ok(Value::Str(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let c = Config::parse("# top\n[run]\nalgorithm = vqe  # trailing\n\n[options]\nsteps = 3\n").unwrap();
        assert_eq!(c.string("run", "algorithm"), Some("vqe"));
        assert_eq!(c.get("options", "steps").unwrap().line, 6);
        assert!(c.section("sweep").is_none());
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(Config::parse("a = 1").unwrap_err().line, 1);
        assert_eq!(Config::parse("[run]\n\n[bogus]").unwrap_err().line, 3);
        assert_eq!(Config::parse("[run]\nx = 1\nx = 2").unwrap_err().line, 3);
        assert_eq!(Config::parse("[run]\nnovalue").unwrap_err().line, 2);
        assert_eq!(Config::parse("[run").unwrap_err().line, 1);
    }

    #[test]
    fn value_typing() {
        assert!(matches!(typed_value("3"), Ok(Value::Int(3))));
        assert!(matches!(typed_value("-3"), Ok(Value::Int(-3))));
        assert!(matches!(typed_value("3.0"), Ok(Value::Real(x)) if x == 3.0));
        assert!(matches!(typed_value("1e-3"), Ok(Value::Real(x)) if x == 1e-3));
        assert!(matches!(typed_value("inf"), Ok(Value::Real(x)) if x.is_infinite()));
        assert!(matches!(typed_value("true"), Ok(Value::Bool(true))));
        assert!(matches!(typed_value("0, 1"), Ok(Value::RealList(v)) if v == [0.0, 1.0]));
        assert!(matches!(typed_value("a, b"), Ok(Value::StrList(v)) if v == ["a", "b"]));
        assert!(matches!(typed_value("uccsd"), Ok(Value::Str(s)) if s == "uccsd"));
        assert!(typed_value(",").is_err());
    }

    #[test]
    fn single_value_lists() {
        let c = Config::parse("[optimizer]\ninitial-point = 0.5\nupper-bounds = 1\nother = 2").unwrap();
        let m = c.typed_section("optimizer", &[]).unwrap();
        assert_eq!(m.get::<Vec<f64>>("initial-point").unwrap(), [0.5]);
        assert_eq!(m.get::<Vec<f64>>("upper-bounds").unwrap(), [1.0]);
        assert_eq!(m.get::<i64>("other").unwrap(), 2);
    }

    #[test]
    fn counts() {
        let c = Config::parse("[run]\nshots = 100\nseed = -1").unwrap();
        assert_eq!(c.count("run", "shots").unwrap(), Some(100));
        assert_eq!(c.count("run", "seed").unwrap_err().line, 3);
        assert_eq!(c.count("run", "missing").unwrap(), None);
    }
}
