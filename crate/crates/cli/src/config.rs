//! Flat `key = value` configuration files with optional `[section]` headers.
//!
//! Sections only group keys for readability; every key names a CLI flag
//! (dashes and underscores are interchangeable) and must appear once.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return Err(format!("line {}: malformed section header '{line}'", no + 1));
                }
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("line {}: expected 'key = value', got '{line}'", no + 1));
            };
            let key = normalize(k);
            if key.is_empty() {
                return Err(format!("line {}: empty key", no + 1));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key '{key}'", no + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_dashes() {
        let cfg = ConfigFile::parse(
            "# bath\n[bath]\ngamma0 = 0.2\nomega-c=40 ; cutoff\n\n[time]\nt_max = 20\n",
        )
        .unwrap();
        assert_eq!(cfg.get("gamma0"), Some("0.2"));
        assert_eq!(cfg.get("omega_c"), Some("40"));
        assert_eq!(cfg.get("t-max"), Some("20"));
        assert_eq!(cfg.keys().count(), 3);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(ConfigFile::parse("gamma0 0.1").is_err());
        assert!(ConfigFile::parse("[bath\n").is_err());
        assert!(ConfigFile::parse("r = 1\nr = 2").is_err());
    }
}
