use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Keys accepted in a config file; the same names as the long flags.
pub const KEYS: [&str; 14] = [
    "Z",
    "alpha",
    "mu0",
    "nr",
    "ell",
    "dim",
    "alignment",
    "branch",
    "delta-policy",
    "formula",
    "grid",
    "format",
    "plot",
    "out",
];

/// Flat `key = value` file. Blank lines and lines starting with `#` are
/// skipped; `z` is accepted for `Z` and `_` for `-`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key=value, got '{line}'", i + 1)));
            };
            let key = normalize_key(k.trim());
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{}'", i + 1, k.trim())));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

fn normalize_key(k: &str) -> String {
    let k = k.trim_start_matches("--").replace('_', "-");
    if k.eq_ignore_ascii_case("z") {
        "Z".to_string()
    } else {
        k.to_ascii_lowercase()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let c = ConfigFile::parse("# comment\nz = 2\nalpha=0.3\n\ndelta_policy = literal\n").unwrap();
        assert_eq!(c.get("Z"), Some("2"));
        assert_eq!(c.get("alpha"), Some("0.3"));
        assert_eq!(c.get("delta-policy"), Some("literal"));
    }

    #[test]
    fn rejects_unknown_keys_and_bare_lines() {
        assert!(ConfigFile::parse("colour=red").is_err());
        assert!(ConfigFile::parse("alpha").is_err());
    }
}
