//! Fully-qualified type names and ordered sets of them.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FqnError {
    #[error("empty name")]
    Empty,
    #[error("invalid segment {0:?}")]
    InvalidSegment(String),
}

/// A dotted Java type name such as `org.joda.time.DateTime`.
///
/// Every segment must be a well-formed Java identifier; wildcards and
/// whitespace are rejected. Ordering and equality are plain lexicographic
/// comparison of the dotted text, which is what the rest of the pipeline
/// relies on for deterministic output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fqn(String);

impl Fqn {
    pub fn parse(text: &str) -> Result<Fqn, FqnError> {
        if text.is_empty() {
            return Err(FqnError::Empty);
        }
        for segment in text.split('.') {
            if !is_java_identifier(segment) {
                return Err(FqnError::InvalidSegment(segment.to_string()));
            }
        }
        Ok(Fqn(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }

    /// The last segment, e.g. `DateTime` for `org.joda.time.DateTime`.
    pub fn simple_name(&self) -> &str {
        self.0.rsplit('.').next().unwrap()
    }

    /// The package prefix, or `None` for an unqualified name.
    pub fn package(&self) -> Option<&str> {
        self.0.rfind('.').map(|idx| &self.0[..idx])
    }

    pub fn is_java_lang(&self) -> bool {
        self.package() == Some("java.lang")
    }
}

impl fmt::Display for Fqn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Fqn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Fqn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Fqn::parse(&text).map_err(D::Error::custom)
    }
}

pub fn is_java_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

/// A deduplicated, lexicographically ordered set of fully-qualified names.
///
/// This is the common currency between ground truth, model responses, and
/// inference output: scoring intersects two of these.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImportSet {
    entries: BTreeSet<Fqn>,
}

impl ImportSet {
    pub fn new() -> ImportSet {
        ImportSet::default()
    }

    pub fn insert(&mut self, fqn: Fqn) -> bool {
        self.entries.insert(fqn)
    }

    pub fn contains(&self, fqn: &Fqn) -> bool {
        self.entries.contains(fqn)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fqn> {
        self.entries.iter()
    }

    pub fn intersection(&self, other: &ImportSet) -> ImportSet {
        ImportSet {
            entries: self.entries.intersection(&other.entries).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &ImportSet) -> ImportSet {
        ImportSet {
            entries: self.entries.difference(&other.entries).cloned().collect(),
        }
    }
}

impl FromIterator<Fqn> for ImportSet {
    fn from_iter<I: IntoIterator<Item = Fqn>>(iter: I) -> ImportSet {
        ImportSet {
            entries: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a ImportSet {
    type Item = &'a Fqn;
    type IntoIter = std::collections::btree_set::Iter<'a, Fqn>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

impl Serialize for ImportSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.entries.iter())
    }
}

impl<'de> Deserialize<'de> for ImportSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<Fqn>::deserialize(deserializer)?;
        Ok(entries.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_names() {
        let fqn = Fqn::parse("org.joda.time.DateTime").unwrap();
        assert_eq!(fqn.simple_name(), "DateTime");
        assert_eq!(fqn.package(), Some("org.joda.time"));
        assert!(!fqn.is_java_lang());
    }

    #[test]
    fn rejects_wildcards_and_whitespace() {
        assert!(Fqn::parse("java.util.*").is_err());
        assert!(Fqn::parse("java .util").is_err());
        assert!(Fqn::parse("").is_err());
        assert!(Fqn::parse("a..b").is_err());
    }

    #[test]
    fn accepts_dollar_and_underscore() {
        assert!(Fqn::parse("a.B$C").is_ok());
        assert!(Fqn::parse("_x.y_z").is_ok());
    }

    #[test]
    fn java_lang_detection() {
        assert!(Fqn::parse("java.lang.String").unwrap().is_java_lang());
        assert!(!Fqn::parse("java.util.List").unwrap().is_java_lang());
        assert!(!Fqn::parse("String").unwrap().is_java_lang());
    }

    #[test]
    fn import_set_dedupes_and_orders() {
        let mut set = ImportSet::new();
        set.insert(Fqn::parse("b.Z").unwrap());
        set.insert(Fqn::parse("a.Y").unwrap());
        assert!(!set.insert(Fqn::parse("b.Z").unwrap()));
        let names: Vec<&str> = set.iter().map(Fqn::as_str).collect();
        assert_eq!(names, ["a.Y", "b.Z"]);
    }

    #[test]
    fn import_set_serializes_as_sorted_array() {
        let set: ImportSet = ["b.Z", "a.Y"]
            .iter()
            .map(|s| Fqn::parse(s).unwrap())
            .collect();
        assert_eq!(serde_json::to_string(&set).unwrap(), r#"["a.Y","b.Z"]"#);
        let back: ImportSet = serde_json::from_str(r#"["b.Z","a.Y","a.Y"]"#).unwrap();
        assert_eq!(back, set);
    }
}
