//! Flat key-value configuration files.
//!
//! ```text
//! # comment
//! tolerance = 1e-10
//! [model]
//! ambient = CP
//! n = 3
//! [jet]
//! alpha: 1.5
//! ```
//!
//! Keys before the first `[section]` header live in the unnamed section `""`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{GeometryError, Result};

pub type Section = BTreeMap<String, String>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub sections: BTreeMap<String, Section>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    GeometryError::InvalidSpec(format!(
                        "line {}: unterminated section header",
                        lineno + 1
                    ))
                })?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let split = line.find(['=', ':']).ok_or_else(|| {
                GeometryError::InvalidSpec(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = line[..split].trim();
            let value = line[split + 1..].trim().trim_matches('"');
            if key.is_empty() {
                return Err(GeometryError::InvalidSpec(format!(
                    "line {}: empty key",
                    lineno + 1
                )));
            }
            sections
                .entry(current.clone())
                .or_default()
                .insert(key.replace('-', "_"), value.to_string());
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            GeometryError::InvalidSpec(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn section(&self, name: &str) -> Section {
        self.sections.get(name).cloned().unwrap_or_default()
    }

    /// Key from `section`, falling back to the unnamed section.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .or_else(|| self.sections.get("").and_then(|s| s.get(key)))
            .map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_separators() {
        let cfg = ConfigFile::parse(
            "tolerance = 1e-10 # tight\n\n[model]\nambient = CP\nflip-normal: true\n[jet]\nalpha=\"1.5\"\n",
        )
        .unwrap();
        assert_eq!(cfg.get("", "tolerance"), Some("1e-10"));
        assert_eq!(cfg.get("model", "ambient"), Some("CP"));
        assert_eq!(cfg.get("model", "flip_normal"), Some("true"));
        assert_eq!(cfg.get("model", "tolerance"), Some("1e-10"));
        assert_eq!(cfg.section("jet")["alpha"], "1.5");
        assert!(cfg.section("missing").is_empty());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("[model\n").is_err());
        assert!(ConfigFile::parse("just words\n").is_err());
        assert!(ConfigFile::parse("= 3\n").is_err());
    }
}
