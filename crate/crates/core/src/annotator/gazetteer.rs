use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Phrase lists backing the rule-based annotator. Phrases match
/// case-insensitively on word boundaries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Gazetteer {
    pub roles: Vec<String>,
    pub address_types: Vec<String>,
    pub orgs: Vec<String>,
    pub org_suffixes: Vec<String>,
    pub gpe: Vec<String>,
    #[serde(default)]
    pub persons: Vec<String>,
    #[serde(default)]
    pub facilities: Vec<String>,
}

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("gazetteer JSON is malformed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("gazetteer list `{list}` contains an empty phrase")]
    EmptyPhrase { list: &'static str },
}

const BUILTIN: &str = include_str!("../../data/gazetteer.json");

impl Gazetteer {
    /// The gazetteer shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN.as_bytes()).expect("bundled gazetteer is valid")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, GazetteerError> {
        let raw: Gazetteer = serde_json::from_slice(bytes)?;
        raw.validated()
    }

    /// Trims phrases, rejects empty ones and drops case-insensitive duplicates
    /// (first spelling wins).
    pub fn validated(self) -> Result<Self, GazetteerError> {
        fn clean(list: Vec<String>, name: &'static str) -> Result<Vec<String>, GazetteerError> {
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(list.len());
            for p in list {
                let p = p.split_whitespace().collect::<Vec<_>>().join(" ");
                if p.is_empty() {
                    return Err(GazetteerError::EmptyPhrase { list: name });
                }
                if seen.insert(p.to_lowercase()) {
                    out.push(p);
                }
            }
            Ok(out)
        }
        Ok(Self {
            roles: clean(self.roles, "roles")?,
            address_types: clean(self.address_types, "address_types")?,
            orgs: clean(self.orgs, "orgs")?,
            org_suffixes: clean(self.org_suffixes, "org_suffixes")?,
            gpe: clean(self.gpe, "gpe")?,
            persons: clean(self.persons, "persons")?,
            facilities: clean(self.facilities, "facilities")?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gazetteer serializes")
    }
}
