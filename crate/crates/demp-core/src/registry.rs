//! Registry of evaluation criteria.
//!
//! Criterion letters in move codes (`CRIT.Ca`) index into this registry:
//! `a` is the first criterion of its kind, `b` the second, and so on. The
//! default registry carries the standard form criteria (software-engineering
//! guidelines) and the content criteria of ISO 9126; it can be replaced by a
//! small config file with `letter = name, kind` lines.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{CriterionKind, CriterionRef};

const DEFAULT_FORM: &[&str] = &[
    "Nomenclature",
    "Algorithms",
    "Documentation",
    "Functions",
    "Files",
    "Data Types",
    "Editor",
    "Variable declaration",
    "Global variables",
    "Document structure",
    "Semantics",
    "Level of description",
];

const DEFAULT_CONTENT: &[&str] = &[
    "Functionality",
    "Reusability",
    "Portability",
    "Reliability",
    "Maintainability",
    "Efficiency",
    "Ease of implementation",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionRegistry {
    form: BTreeMap<char, String>,
    content: BTreeMap<char, String>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("line {line}: expected `letter = name, kind`, got {got:?}")]
    Malformed { line: usize, got: String },
    #[error("line {line}: letter must be a single lowercase ascii letter, got {got:?}")]
    BadLetter { line: usize, got: String },
    #[error("line {line}: kind must be `form` or `content`, got {got:?}")]
    BadKind { line: usize, got: String },
    #[error("line {line}: duplicate {kind} letter '{letter}'")]
    Duplicate {
        line: usize,
        kind: &'static str,
        letter: char,
    },
}

impl Default for CriterionRegistry {
    fn default() -> CriterionRegistry {
        let letters = |names: &[&str]| {
            names
                .iter()
                .enumerate()
                .map(|(i, n)| ((b'a' + i as u8) as char, n.to_string()))
                .collect()
        };
        CriterionRegistry {
            form: letters(DEFAULT_FORM),
            content: letters(DEFAULT_CONTENT),
        }
    }
}

impl CriterionRegistry {
    /// Parse a registry from config text. One criterion per line,
    /// `letter = name, kind`; blank lines and `#` comments are skipped.
    pub fn from_config(text: &str) -> Result<CriterionRegistry, RegistryError> {
        let mut form = BTreeMap::new();
        let mut content = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (letter, rest) = trimmed.split_once('=').ok_or(RegistryError::Malformed {
                line,
                got: trimmed.to_string(),
            })?;
            let letter = letter.trim();
            let mut chars = letter.chars();
            let letter = match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => c,
                _ => {
                    return Err(RegistryError::BadLetter {
                        line,
                        got: letter.to_string(),
                    })
                }
            };
            let (name, kind) = rest.rsplit_once(',').ok_or(RegistryError::Malformed {
                line,
                got: trimmed.to_string(),
            })?;
            let name = name.trim().to_string();
            let (map, kind_name) = match kind.trim() {
                "form" => (&mut form, "form"),
                "content" => (&mut content, "content"),
                other => {
                    return Err(RegistryError::BadKind {
                        line,
                        got: other.to_string(),
                    })
                }
            };
            if map.insert(letter, name).is_some() {
                return Err(RegistryError::Duplicate {
                    line,
                    kind: kind_name,
                    letter,
                });
            }
        }
        Ok(CriterionRegistry { form, content })
    }

    fn map(&self, kind: CriterionKind) -> &BTreeMap<char, String> {
        match kind {
            CriterionKind::Form => &self.form,
            CriterionKind::Content => &self.content,
        }
    }

    /// Whether a letter is registered for the given kind.
    pub fn contains(&self, kind: CriterionKind, letter: char) -> bool {
        self.map(kind).contains_key(&letter)
    }

    /// Human-readable name of a criterion reference. Kind-only references
    /// resolve to the kind name itself.
    pub fn name(&self, criterion: &CriterionRef) -> Option<String> {
        match criterion.letter {
            None => Some(criterion.kind.name().to_string()),
            Some(l) => self.map(criterion.kind).get(&l).cloned(),
        }
    }

    /// Registered (letter, name) pairs of one kind, in letter order.
    pub fn entries(&self, kind: CriterionKind) -> impl Iterator<Item = (char, &str)> {
        self.map(kind).iter().map(|(l, n)| (*l, n.as_str()))
    }

    /// Serialize back to the config format.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for (kind, label) in [(CriterionKind::Form, "form"), (CriterionKind::Content, "content")] {
            for (letter, name) in self.entries(kind) {
                out.push_str(&format!("{letter} = {name}, {label}\n"));
            }
        }
        out
    }
}

impl fmt::Display for CriterionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_has_both_kinds() {
        let r = CriterionRegistry::default();
        assert_eq!(r.entries(CriterionKind::Form).count(), 12);
        assert_eq!(r.entries(CriterionKind::Content).count(), 7);
        assert_eq!(
            r.name(&CriterionRef::new(CriterionKind::Content, Some('a'))),
            Some("Functionality".to_string())
        );
        assert_eq!(
            r.name(&CriterionRef::new(CriterionKind::Form, Some('a'))),
            Some("Nomenclature".to_string())
        );
        assert!(!r.contains(CriterionKind::Content, 'z'));
    }

    #[test]
    fn config_round_trips() {
        let r = CriterionRegistry::default();
        let parsed = CriterionRegistry::from_config(&r.to_config()).unwrap();
        assert_eq!(parsed, r);
    }

    #[test]
    fn config_rejects_bad_lines() {
        assert!(matches!(
            CriterionRegistry::from_config("a Nomenclature form"),
            Err(RegistryError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            CriterionRegistry::from_config("ab = Name, form"),
            Err(RegistryError::BadLetter { .. })
        ));
        assert!(matches!(
            CriterionRegistry::from_config("a = Name, shape"),
            Err(RegistryError::BadKind { .. })
        ));
        assert!(matches!(
            CriterionRegistry::from_config("a = X, form\na = Y, form"),
            Err(RegistryError::Duplicate { .. })
        ));
    }

    #[test]
    fn names_with_commas_survive() {
        let r = CriterionRegistry::from_config("a = Readability, overall, form").unwrap();
        assert_eq!(
            r.name(&CriterionRef::new(CriterionKind::Form, Some('a'))),
            Some("Readability, overall".to_string())
        );
    }
}
