//! Sectioned `key = value` experiment configs.
//!
//! A config file groups keys under `[command]` headers; keys before any
//! header are global and visible to every command. Command-line flags always
//! override config values. Keys that the invoked command does not consume are
//! rejected before any computation starts.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::path::Path;

#[derive(Debug, Default)]
pub struct Config {
    entries: HashMap<(String, String), String>,
    used: RefCell<HashSet<(String, String)>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = HashMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("config line {}: expected key = value", idx + 1));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries
                .insert((section.clone(), key.clone()), value)
                .is_some()
            {
                return Err(format!(
                    "config line {}: duplicate key {key:?} in section {section:?}",
                    idx + 1
                ));
            }
        }
        Ok(Config {
            entries,
            used: RefCell::new(HashSet::new()),
        })
    }

    /// Raw lookup: the command's own section wins over the global section.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        for sec in [section, ""] {
            let full = (sec.to_string(), key.to_string());
            if let Some(v) = self.entries.get(&full) {
                self.used.borrow_mut().insert(full);
                return Some(v);
            }
        }
        None
    }

    /// Parsed lookup with a flag override.
    pub fn resolve<T: Clone>(
        &self,
        section: &str,
        key: &str,
        flag: Option<T>,
        parse: impl Fn(&str) -> Result<T, String>,
        default: T,
    ) -> Result<T, String> {
        if let Some(v) = flag {
            self.get(section, key); // flag overrides; still mark the key used
            return Ok(v);
        }
        match self.get(section, key) {
            Some(raw) => parse(raw).map_err(|e| format!("config key {key:?}: {e}")),
            None => Ok(default),
        }
    }

    /// Required parameter from flag or config.
    pub fn resolve_required<T>(
        &self,
        section: &str,
        key: &str,
        flag: Option<T>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, String> {
        if let Some(v) = flag {
            self.get(section, key);
            return Ok(v);
        }
        match self.get(section, key) {
            Some(raw) => parse(raw).map_err(|e| format!("config key {key:?}: {e}")),
            None => Err(format!("missing required parameter --{key}")),
        }
    }

    /// Optional parameter from flag or config.
    pub fn resolve_optional<T>(
        &self,
        section: &str,
        key: &str,
        flag: Option<T>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, String> {
        if let Some(v) = flag {
            self.get(section, key);
            return Ok(Some(v));
        }
        match self.get(section, key) {
            Some(raw) => parse(raw)
                .map(Some)
                .map_err(|e| format!("config key {key:?}: {e}")),
            None => Ok(None),
        }
    }

    /// Reject keys in the command's section (or global) that were never read.
    pub fn finish(&self, section: &str) -> Result<(), String> {
        let used = self.used.borrow();
        let mut unknown: Vec<String> = self
            .entries
            .keys()
            .filter(|(sec, _)| sec == section || sec.is_empty())
            .filter(|k| !used.contains(*k))
            .map(|(sec, key)| {
                if sec.is_empty() {
                    key.clone()
                } else {
                    format!("{sec}.{key}")
                }
            })
            .collect();
        // Keys for other commands' sections are fine; they are simply unused.
        if unknown.is_empty() {
            Ok(())
        } else {
            unknown.sort();
            Err(format!("unknown config keys: {}", unknown.join(", ")))
        }
    }
}

pub fn parse_ext_real(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "Inf" | "INF" | "infinity" | "oo" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("expected a number or \"inf\", got {other:?}")),
    }
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("bad integer {s:?}"))
}

pub fn parse_u32(s: &str) -> Result<u32, String> {
    s.trim().parse().map_err(|_| format!("bad integer {s:?}"))
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| format!("bad integer {s:?}"))
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("bad number {s:?}"))
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("bad boolean {other:?}")),
    }
}

/// Comma-separated strictly increasing sizes, e.g. `4,8,16,32`.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, String> {
    let list: Result<Vec<usize>, String> = s
        .split(',')
        .map(|tok| parse_usize(tok).map_err(|e| format!("in n-list: {e}")))
        .collect();
    let list = list?;
    if list.is_empty() {
        return Err("n-list must not be empty".into());
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_overrides() {
        let cfg = Config::parse("seed = 7\n[sweep]\nm = 2\np = inf\n").unwrap();
        assert_eq!(cfg.get("sweep", "m"), Some("2"));
        assert_eq!(cfg.get("sweep", "seed"), Some("7"));
        assert_eq!(cfg.get("fit", "m"), None);
        let p = cfg
            .resolve("sweep", "p", None, parse_ext_real, 2.0)
            .unwrap();
        assert!(p.is_infinite());
        // Flag wins over config.
        let m = cfg.resolve("sweep", "m", Some(5u32), parse_u32, 1).unwrap();
        assert_eq!(m, 5);
        cfg.finish("sweep").unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let cfg = Config::parse("[sweep]\nbogus = 1\n").unwrap();
        assert!(cfg.finish("sweep").is_err());
        // Sections for other commands are left alone.
        let cfg = Config::parse("[fit]\ntol = 0.1\n").unwrap();
        cfg.finish("sweep").unwrap();
    }

    #[test]
    fn parse_errors() {
        assert!(Config::parse("just a line\n").is_err());
        assert!(Config::parse("[s]\na = 1\na = 2\n").is_err());
        assert!(parse_ext_real("xyz").is_err());
        assert_eq!(parse_n_list("4,8").unwrap(), vec![4, 8]);
        assert!(parse_n_list("4,,8").is_err());
    }
}
