//! Document frequency of types over a source tree, and recall broken down
//! by frequency bucket: how well inference recovers rarely-seen types
//! versus ubiquitous ones.
//!
//! A file references a type when it imports the FQN directly, or when it
//! wildcard-imports the type's package and mentions the simple name. Each
//! file counts a type at most once.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::fqn::{Fqn, ImportSet};
use crate::snippet::extract_imports;

/// Bucket edges reproducing the usual powers-of-ten breakdown:
/// [0,1e2), [1e2,1e3), [1e3,1e4), [1e4,1e5), and ≥1e5.
pub const DEFAULT_EDGES: [u64; 4] = [100, 1_000, 10_000, 100_000];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocFreqTable {
    pub counts: BTreeMap<Fqn, u64>,
    pub edges: Vec<u64>,
    pub files_scanned: usize,
    pub unreadable: usize,
}

impl DocFreqTable {
    pub fn new(edges: Vec<u64>) -> DocFreqTable {
        DocFreqTable {
            counts: BTreeMap::new(),
            edges,
            files_scanned: 0,
            unreadable: 0,
        }
    }

    pub fn count(&self, fqn: &Fqn) -> Option<u64> {
        self.counts.get(fqn).copied()
    }

    /// Index of the bucket holding a given frequency.
    pub fn bucket_of(&self, count: u64) -> usize {
        self.edges.iter().filter(|&&edge| count >= edge).count()
    }

    pub fn bucket_labels(&self) -> Vec<String> {
        let fmt = |value: u64| -> String {
            let mut power = 0;
            let mut rest = value;
            while rest >= 10 && rest % 10 == 0 {
                rest /= 10;
                power += 1;
            }
            if rest == 1 && power >= 2 {
                format!("1e{power}")
            } else {
                value.to_string()
            }
        };
        let mut labels = Vec::new();
        let mut lo = "0".to_string();
        for &edge in &self.edges {
            let hi = fmt(edge);
            labels.push(format!("[{lo},{hi})"));
            lo = hi;
        }
        labels.push(format!(">={lo}"));
        labels
    }
}

/// True when `word` appears in `text` delimited by non-identifier
/// characters on both sides.
fn mentions(text: &str, word: &str) -> bool {
    let bytes = text.as_bytes();
    let is_ident = |b: u8| b.is_ascii_alphanumeric() || b == b'_' || b == b'$';
    let mut from = 0;
    while let Some(pos) = text[from..].find(word) {
        let start = from + pos;
        let end = start + word.len();
        let left_ok = start == 0 || !is_ident(bytes[start - 1]);
        let right_ok = end == bytes.len() || !is_ident(bytes[end]);
        if left_ok && right_ok {
            return true;
        }
        from = start + 1;
    }
    false
}

/// Counts, for every type in `universe`, the source files under `root`
/// that reference it. Unreadable files are skipped and tallied.
pub fn doc_freq(root: &Path, universe: &[Fqn], edges: Vec<u64>) -> DocFreqTable {
    let mut table = DocFreqTable::new(edges);
    for fqn in universe {
        table.counts.entry(fqn.clone()).or_insert(0);
    }
    for entry in WalkDir::new(root).sort_by_file_name() {
        let Ok(entry) = entry else {
            table.unreadable += 1;
            continue;
        };
        if !entry.file_type().is_file() {
            continue;
        }
        if entry.path().extension().is_none_or(|ext| ext != "java") {
            continue;
        }
        let Ok(text) = std::fs::read_to_string(entry.path()) else {
            table.unreadable += 1;
            continue;
        };
        table.files_scanned += 1;
        let scan = extract_imports(&text);
        for fqn in universe {
            let direct = scan.imports.contains(fqn);
            let via_wildcard = || {
                fqn.package().is_some_and(|pkg| {
                    scan.wildcards.iter().any(|w| w == pkg) && mentions(&text, fqn.simple_name())
                })
            };
            if direct || via_wildcard() {
                *table.counts.entry(fqn.clone()).or_insert(0) += 1;
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub label: String,
    pub total: usize,
    pub tp: usize,
    pub recall: Option<f64>,
}

/// Assigns every expected FQN occurrence to its frequency bucket and
/// reports per-bucket recall. Types missing from the table land in the
/// lowest bucket; the second return value counts them.
pub fn bucket_recall(
    pairs: &[(ImportSet, ImportSet)],
    table: &DocFreqTable,
) -> (Vec<BucketRow>, usize) {
    let labels = table.bucket_labels();
    let mut totals = vec![0usize; labels.len()];
    let mut tps = vec![0usize; labels.len()];
    let mut unlisted = 0;
    for (inferred, expected) in pairs {
        for fqn in expected.iter() {
            let bucket = match table.count(fqn) {
                Some(count) => table.bucket_of(count),
                None => {
                    unlisted += 1;
                    0
                }
            };
            totals[bucket] += 1;
            if inferred.contains(fqn) {
                tps[bucket] += 1;
            }
        }
    }
    let rows = labels
        .into_iter()
        .zip(totals.iter().zip(&tps))
        .map(|(label, (&total, &tp))| BucketRow {
            label,
            total,
            tp,
            recall: if total == 0 {
                None
            } else {
                Some(tp as f64 / total as f64)
            },
        })
        .collect();
    (rows, unlisted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn fqn(text: &str) -> Fqn {
        Fqn::parse(text).unwrap()
    }

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    #[test]
    fn counts_files_importing_a_type() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "One.java", "import a.B;\nclass One {}\n");
        write(dir.path(), "Two.java", "import a.B;\nimport c.D;\nclass Two {}\n");
        write(dir.path(), "Three.java", "class Three {}\n");
        let table = doc_freq(dir.path(), &[fqn("a.B"), fqn("c.D")], DEFAULT_EDGES.to_vec());
        assert_eq!(table.count(&fqn("a.B")), Some(2));
        assert_eq!(table.count(&fqn("c.D")), Some(1));
        assert_eq!(table.files_scanned, 3);
    }

    #[test]
    fn empty_root_counts_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let table = doc_freq(dir.path(), &[fqn("a.B")], DEFAULT_EDGES.to_vec());
        assert_eq!(table.count(&fqn("a.B")), Some(0));
        assert_eq!(table.files_scanned, 0);
    }

    #[test]
    fn wildcard_import_needs_a_simple_name_mention() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "Uses.java",
            "import a.util.*;\nclass Uses { Widget w; }\n",
        );
        write(
            dir.path(),
            "Ignores.java",
            "import a.util.*;\nclass Ignores { int x; }\n",
        );
        write(
            dir.path(),
            "Mentions.java",
            "class Mentions { String widgetless = \"Widgetry\"; }\n",
        );
        let table = doc_freq(dir.path(), &[fqn("a.util.Widget")], DEFAULT_EDGES.to_vec());
        assert_eq!(table.count(&fqn("a.util.Widget")), Some(1));
    }

    #[test]
    fn mention_matching_respects_identifier_boundaries() {
        assert!(mentions("Widget w;", "Widget"));
        assert!(mentions("new Widget()", "Widget"));
        assert!(!mentions("Widgetry w;", "Widget"));
        assert!(!mentions("MyWidget w;", "Widget"));
        assert!(mentions("(Widget) x", "Widget"));
    }

    #[test]
    fn planted_tree_matches_its_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let manifest: Vec<(Fqn, u64)> = vec![
            (fqn("p.q.Alpha"), 40),
            (fqn("p.q.Beta"), 7),
            (fqn("r.Gamma"), 0),
        ];
        let mut serial = 0;
        for (target, count) in &manifest {
            for _ in 0..*count {
                serial += 1;
                write(
                    dir.path(),
                    &format!("F{serial}.java"),
                    &format!("import {};\nclass F{serial} {{}}\n", target.as_str()),
                );
            }
        }
        // Padding files referencing nothing in the universe.
        for _ in 0..53 {
            serial += 1;
            write(
                dir.path(),
                &format!("F{serial}.java"),
                &format!("import x.Other;\nclass F{serial} {{}}\n"),
            );
        }
        let universe: Vec<Fqn> = manifest.iter().map(|(f, _)| f.clone()).collect();
        let table = doc_freq(dir.path(), &universe, DEFAULT_EDGES.to_vec());
        assert_eq!(table.files_scanned, 100);
        for (target, count) in &manifest {
            assert_eq!(table.count(target), Some(*count), "{}", target.as_str());
        }
    }

    #[test]
    fn unreadable_files_are_tallied_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "Good.java", "import a.B;\nclass Good {}\n");
        fs::write(dir.path().join("Bad.java"), [0xFFu8, 0xFE, 0x00, 0x01]).unwrap();
        let table = doc_freq(dir.path(), &[fqn("a.B")], DEFAULT_EDGES.to_vec());
        assert_eq!(table.unreadable, 1);
        assert_eq!(table.count(&fqn("a.B")), Some(1));
    }

    #[test]
    fn bucket_edges_partition_all_frequencies() {
        let table = DocFreqTable::new(DEFAULT_EDGES.to_vec());
        assert_eq!(table.bucket_of(0), 0);
        assert_eq!(table.bucket_of(99), 0);
        assert_eq!(table.bucket_of(100), 1);
        assert_eq!(table.bucket_of(999), 1);
        assert_eq!(table.bucket_of(1_000), 2);
        assert_eq!(table.bucket_of(9_999), 2);
        assert_eq!(table.bucket_of(10_000), 3);
        assert_eq!(table.bucket_of(100_000), 4);
        assert_eq!(table.bucket_of(u64::MAX), 4);
        assert_eq!(
            table.bucket_labels(),
            ["[0,1e2)", "[1e2,1e3)", "[1e3,1e4)", "[1e4,1e5)", ">=1e5"]
        );
    }

    fn import_set(fqns: &[&str]) -> ImportSet {
        let mut out = ImportSet::new();
        for f in fqns {
            out.insert(fqn(f));
        }
        out
    }

    #[test]
    fn recall_lands_in_hand_assigned_buckets() {
        let mut table = DocFreqTable::new(DEFAULT_EDGES.to_vec());
        table.counts.insert(fqn("a.Rare"), 3);
        table.counts.insert(fqn("a.Mid"), 5_000);
        table.counts.insert(fqn("a.Common"), 2_000_000);
        let pairs = vec![
            (
                import_set(&["a.Rare", "a.Common"]),
                import_set(&["a.Rare", "a.Mid", "a.Common"]),
            ),
            (import_set(&[]), import_set(&["a.Rare"])),
        ];
        let (rows, unlisted) = bucket_recall(&pairs, &table);
        assert_eq!(unlisted, 0);
        assert_eq!(rows[0].total, 2);
        assert_eq!(rows[0].tp, 1);
        assert_eq!(rows[0].recall, Some(0.5));
        assert_eq!(rows[2], BucketRow {
            label: "[1e3,1e4)".into(),
            total: 1,
            tp: 0,
            recall: Some(0.0),
        });
        assert_eq!(rows[4].total, 1);
        assert_eq!(rows[4].tp, 1);
        assert_eq!(rows[1].total, 0);
        assert_eq!(rows[1].recall, None);
        let total: usize = rows.iter().map(|r| r.total).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn types_missing_from_the_table_fall_in_the_lowest_bucket() {
        let table = DocFreqTable::new(DEFAULT_EDGES.to_vec());
        let pairs = vec![(import_set(&["a.B"]), import_set(&["a.B"]))];
        let (rows, unlisted) = bucket_recall(&pairs, &table);
        assert_eq!(unlisted, 1);
        assert_eq!(rows[0].total, 1);
        assert_eq!(rows[0].tp, 1);
    }

    #[test]
    fn expected_multiplicity_counts_per_snippet() {
        let mut table = DocFreqTable::new(DEFAULT_EDGES.to_vec());
        table.counts.insert(fqn("a.B"), 50);
        let pairs = vec![
            (import_set(&["a.B"]), import_set(&["a.B"])),
            (import_set(&["a.B"]), import_set(&["a.B"])),
            (import_set(&[]), import_set(&["a.B"])),
        ];
        let (rows, _) = bucket_recall(&pairs, &table);
        assert_eq!(rows[0].total, 3);
        assert_eq!(rows[0].tp, 2);
    }
}
