//! The library-API knowledge base: for every known type, its fully
//! qualified name, declared supertypes, and member signatures, indexed for
//! lookup by simple name (one-to-many) and by FQN (one-to-one).
//!
//! The on-disk format is JSON Lines, one entry per line:
//!
//! ```text
//! {"fqn":"java.util.logging.Logger","supertypes":["java.lang.Object"],
//!  "members":[{"kind":"static_method","name":"getLogger",
//!              "params":["java.lang.String"],"returns":"java.util.logging.Logger"}]}
//! ```
//!
//! Primitives are spelled with their Java keywords (`int`, `boolean`, ...),
//! `void` is the literal `void`, and everything else is an FQN. An optional
//! `"library"` field tags the entry's origin for per-library reporting.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write as IoWrite};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fqn::Fqn;
use crate::syntax::Primitive;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("cannot read knowledge base: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate entry for {0}")]
    DuplicateFqn(String),
    #[error("invalid entry {fqn}: {message}")]
    InvalidEntry { fqn: String, message: String },
}

/// A type name as the knowledge base spells it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum KbType {
    Primitive(Primitive),
    Void,
    Class(Fqn),
}

impl KbType {
    pub fn parse(text: &str) -> Result<KbType, String> {
        if text == "void" {
            return Ok(KbType::Void);
        }
        if let Some(prim) = Primitive::from_keyword(text) {
            return Ok(KbType::Primitive(prim));
        }
        Fqn::parse(text)
            .map(KbType::Class)
            .map_err(|e| format!("bad type name {text:?}: {e}"))
    }

    pub fn as_class(&self) -> Option<&Fqn> {
        match self {
            KbType::Class(fqn) => Some(fqn),
            _ => None,
        }
    }

    pub fn string() -> KbType {
        KbType::Class(Fqn::parse("java.lang.String").expect("valid name"))
    }
}

impl fmt::Display for KbType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KbType::Primitive(p) => f.write_str(p.keyword()),
            KbType::Void => f.write_str("void"),
            KbType::Class(fqn) => f.write_str(fqn.as_str()),
        }
    }
}

impl Serialize for KbType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KbType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<KbType, D::Error> {
        let text = String::deserialize(deserializer)?;
        KbType::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberKind {
    Method,
    StaticMethod,
    Constructor,
    Field,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberSig {
    pub kind: MemberKind,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<KbType>,
    pub returns: KbType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbEntry {
    pub fqn: Fqn,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub supertypes: Vec<Fqn>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberSig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub library: Option<String>,
}

impl KbEntry {
    pub fn simple_name(&self) -> &str {
        self.fqn.simple_name()
    }

    /// Declared constructors; an entry that declares none gets the implicit
    /// Java zero-argument constructor.
    pub fn constructors(&self) -> Vec<&[KbType]> {
        let declared: Vec<&[KbType]> = self
            .members
            .iter()
            .filter(|m| m.kind == MemberKind::Constructor)
            .map(|m| m.params.as_slice())
            .collect();
        if declared.is_empty() {
            vec![&[]]
        } else {
            declared
        }
    }

    pub fn has_declared_constructors(&self) -> bool {
        self.members
            .iter()
            .any(|m| m.kind == MemberKind::Constructor)
    }

    fn validate(&self) -> Result<(), KbError> {
        let invalid = |message: String| KbError::InvalidEntry {
            fqn: self.fqn.as_str().to_string(),
            message,
        };
        let mut seen = Vec::new();
        for member in &self.members {
            match member.kind {
                MemberKind::Constructor => {
                    if member.name != self.simple_name() {
                        return Err(invalid(format!(
                            "constructor named {:?}, expected {:?}",
                            member.name,
                            self.simple_name()
                        )));
                    }
                    if member.returns.as_class() != Some(&self.fqn) {
                        return Err(invalid(format!(
                            "constructor must return {}, found {}",
                            self.fqn.as_str(),
                            member.returns
                        )));
                    }
                }
                MemberKind::Field => {
                    if !member.params.is_empty() {
                        return Err(invalid(format!("field {:?} has parameters", member.name)));
                    }
                }
                MemberKind::Method | MemberKind::StaticMethod => {}
            }
            let sig = (member.kind, member.name.clone(), member.params.clone());
            if seen.contains(&sig) {
                return Err(invalid(format!(
                    "duplicate member {:?} with identical parameters",
                    member.name
                )));
            }
            seen.push(sig);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    entries: Vec<KbEntry>,
    by_fqn: BTreeMap<String, usize>,
    by_simple: BTreeMap<String, Vec<usize>>,
}

impl KnowledgeBase {
    pub fn new() -> KnowledgeBase {
        KnowledgeBase::default()
    }

    pub fn add(&mut self, entry: KbEntry) -> Result<(), KbError> {
        entry.validate()?;
        let key = entry.fqn.as_str().to_string();
        if self.by_fqn.contains_key(&key) {
            return Err(KbError::DuplicateFqn(key));
        }
        let idx = self.entries.len();
        self.by_fqn.insert(key, idx);
        let bucket = self
            .by_simple
            .entry(entry.simple_name().to_string())
            .or_default();
        // Buckets stay sorted by FQN so candidate order is stable.
        let pos = bucket
            .binary_search_by(|&i| self.entries[i].fqn.cmp(&entry.fqn))
            .unwrap_err();
        bucket.insert(pos, idx);
        self.entries.push(entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &KbEntry> {
        self.entries.iter()
    }

    /// All entries sharing a simple name, ordered by FQN.
    pub fn lookup_simple(&self, name: &str) -> Vec<&KbEntry> {
        self.by_simple
            .get(name)
            .map(|bucket| bucket.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn lookup_fqn(&self, fqn: &str) -> Option<&KbEntry> {
        self.by_fqn.get(fqn).map(|&i| &self.entries[i])
    }

    /// The entry plus every KB-known type reachable through `supertypes`,
    /// in breadth-first order, cycle-safe.
    pub fn chain(&self, fqn: &str) -> Vec<&KbEntry> {
        let mut out: Vec<&KbEntry> = Vec::new();
        let mut queue: Vec<&str> = vec![fqn];
        let mut seen: Vec<&str> = Vec::new();
        while let Some(cur) = queue.pop() {
            if seen.contains(&cur) {
                continue;
            }
            seen.push(cur);
            if let Some(entry) = self.lookup_fqn(cur) {
                out.push(entry);
                for sup in &entry.supertypes {
                    queue.push(sup.as_str());
                }
            }
        }
        out
    }

    /// Whether `sub` names `sup` anywhere on its declared supertype chain.
    /// Supertype names without a KB entry of their own still count.
    pub fn is_declared_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut queue: Vec<&str> = vec![sub];
        let mut seen: Vec<&str> = Vec::new();
        while let Some(cur) = queue.pop() {
            if cur == sup {
                return true;
            }
            if seen.contains(&cur) {
                continue;
            }
            seen.push(cur);
            if let Some(entry) = self.lookup_fqn(cur) {
                queue.extend(entry.supertypes.iter().map(|s| s.as_str()));
            }
        }
        false
    }
}

/// Loads a JSON-Lines knowledge base file.
pub fn load_kb(path: &Path) -> Result<KnowledgeBase, KbError> {
    read_kb(BufReader::new(File::open(path)?))
}

pub fn read_kb<R: Read>(reader: BufReader<R>) -> Result<KnowledgeBase, KbError> {
    let mut kb = KnowledgeBase::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: KbEntry = serde_json::from_str(&line).map_err(|e| KbError::Malformed {
            line: number + 1,
            message: e.to_string(),
        })?;
        kb.add(entry)?;
    }
    Ok(kb)
}

pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    read_kb(BufReader::new(text.as_bytes()))
}

/// Writes a knowledge base back out as JSON Lines, one entry per line.
pub fn save_kb(kb: &KnowledgeBase, path: &Path) -> Result<(), KbError> {
    let mut file = File::create(path)?;
    for entry in kb.iter() {
        let line = serde_json::to_string(entry).expect("entry serializes");
        writeln!(file, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
pub(crate) fn logging_fixture() -> KnowledgeBase {
    parse_kb(concat!(
        r#"{"fqn":"java.util.logging.Logger","members":[{"kind":"static_method","name":"getLogger","params":["java.lang.String"],"returns":"java.util.logging.Logger"},{"kind":"method","name":"info","params":["java.lang.String"],"returns":"void"}]}"#,
        "\n",
        r#"{"fqn":"org.slf4j.Logger","members":[{"kind":"method","name":"info","params":["java.lang.String"],"returns":"void"},{"kind":"method","name":"debug","params":["java.lang.String"],"returns":"void"}]}"#,
        "\n",
        r#"{"fqn":"java.lang.String","members":[{"kind":"method","name":"length","returns":"int"}]}"#,
        "\n",
    ))
    .expect("fixture parses")
}
