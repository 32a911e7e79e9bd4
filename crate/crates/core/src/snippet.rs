//! Snippets, corpora, and line-level import handling.
//!
//! A snippet is one Java source file whose ground-truth imports are written
//! inline. Import extraction and stripping are deliberately line-based rather
//! than parser-based so they also work on model responses, which wrap import
//! statements in prose or markdown fences.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fqn::{is_java_identifier, Fqn, ImportSet};

/// One import declaration, classified by shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImportLine {
    /// `import a.b.C;`
    Plain(Fqn),
    /// `import a.b.*;` carries the package prefix.
    Wildcard(String),
    /// `import static a.b.C.member;` (or a static wildcard), kept as raw text.
    Static(String),
}

/// Result of scanning a source text for import declarations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImportScan {
    pub imports: ImportSet,
    pub wildcards: Vec<String>,
    pub statics: Vec<String>,
}

/// Parses a single line as an import declaration, tolerating leading
/// whitespace and trailing content after the semicolon (e.g. a comment).
pub fn parse_import_line(line: &str) -> Option<ImportLine> {
    let trimmed = line.trim_start();
    let rest = trimmed.strip_prefix("import")?;
    if !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let rest = rest.trim_start();
    let (is_static, rest) = match rest.strip_prefix("static") {
        Some(after) if after.starts_with(char::is_whitespace) => (true, after.trim_start()),
        _ => (false, rest),
    };
    let semi = rest.find(';')?;
    let name = rest[..semi].trim();
    if name.is_empty() {
        return None;
    }
    if is_static {
        let target = name.strip_suffix(".*").unwrap_or(name);
        if !target.split('.').all(is_java_identifier) {
            return None;
        }
        return Some(ImportLine::Static(name.to_string()));
    }
    if let Some(prefix) = name.strip_suffix(".*") {
        if !prefix.split('.').all(is_java_identifier) {
            return None;
        }
        return Some(ImportLine::Wildcard(prefix.to_string()));
    }
    Fqn::parse(name).ok().map(ImportLine::Plain)
}

/// Scans text line by line and collects every import declaration.
///
/// Plain imports are deduplicated into an ordered set; wildcard and static
/// imports are reported separately and never contribute FQNs. Lines that are
/// not import declarations (including markdown fences around them) are
/// ignored, so this works directly on raw model responses.
pub fn extract_imports(text: &str) -> ImportScan {
    let mut scan = ImportScan::default();
    for line in text.lines() {
        match parse_import_line(line) {
            Some(ImportLine::Plain(fqn)) => {
                scan.imports.insert(fqn);
            }
            Some(ImportLine::Wildcard(prefix)) => scan.wildcards.push(prefix),
            Some(ImportLine::Static(raw)) => scan.statics.push(raw),
            None => {}
        }
    }
    scan
}

/// Removes every import declaration line from `text`.
///
/// Non-import lines are preserved byte-exactly, line terminators included.
/// Returns the stripped text together with the scan of what was removed.
pub fn strip_imports(text: &str) -> (String, ImportScan) {
    let mut kept = String::with_capacity(text.len());
    let mut scan = ImportScan::default();
    for line in text.split_inclusive('\n') {
        match parse_import_line(line) {
            Some(ImportLine::Plain(fqn)) => {
                scan.imports.insert(fqn);
            }
            Some(ImportLine::Wildcard(prefix)) => scan.wildcards.push(prefix),
            Some(ImportLine::Static(raw)) => scan.statics.push(raw),
            None => kept.push_str(line),
        }
    }
    (kept, scan)
}

/// A single benchmark entry: one Java source file plus its identity.
///
/// `ground_truth` is always derived from the source text, so the two can
/// never drift apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snippet {
    pub id: String,
    pub library: String,
    pub source: String,
    pub ground_truth: ImportSet,
}

impl Snippet {
    pub fn new(id: impl Into<String>, library: impl Into<String>, source: impl Into<String>) -> Snippet {
        let source = source.into();
        let ground_truth = extract_imports(&source).imports;
        Snippet {
            id: id.into(),
            library: library.into(),
            source,
            ground_truth,
        }
    }

    /// Source text with import lines removed, as handed to inference.
    pub fn stripped_source(&self) -> String {
        strip_imports(&self.source).0
    }
}

/// An ordered collection of snippets with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub name: String,
    snippets: Vec<Snippet>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate snippet id {0:?}")]
    DuplicateId(String),
    #[error("missing manifest {0}")]
    NoManifest(PathBuf),
    #[error("malformed manifest {path}: {source}")]
    MalformedManifest {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("missing snippet file {0}")]
    MissingSnippetFile(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: io::Error,
    },
}

impl Corpus {
    pub fn new(name: impl Into<String>) -> Corpus {
        Corpus {
            name: name.into(),
            snippets: Vec::new(),
        }
    }

    pub fn push(&mut self, snippet: Snippet) -> Result<(), CorpusError> {
        if self.snippets.iter().any(|s| s.id == snippet.id) {
            return Err(CorpusError::DuplicateId(snippet.id));
        }
        self.snippets.push(snippet);
        Ok(())
    }

    pub fn snippets(&self) -> &[Snippet] {
        &self.snippets
    }

    pub fn len(&self) -> usize {
        self.snippets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snippets.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Snippet> {
        self.snippets.iter().find(|s| s.id == id)
    }

    pub fn per_library_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for snippet in &self.snippets {
            *counts.entry(snippet.library.clone()).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    name: String,
    snippets: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    id: String,
    library: String,
    file: String,
}

/// Writes `corpus` as a directory: a `manifest.json` plus one `.java` file
/// per snippet. Overwrites files already present.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<(), CorpusError> {
    fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(corpus.len());
    for snippet in corpus.snippets() {
        let file = format!("{}.java", snippet.id);
        let path = dir.join(&file);
        fs::write(&path, &snippet.source).map_err(|source| CorpusError::Io { path, source })?;
        entries.push(ManifestEntry {
            id: snippet.id.clone(),
            library: snippet.library.clone(),
            file,
        });
    }
    let manifest = Manifest {
        name: corpus.name.clone(),
        snippets: entries,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|source| CorpusError::Io { path, source })?;
    Ok(())
}

/// Loads a corpus directory written by [`save_corpus`].
///
/// Ground truth is recomputed from each file's import lines, so editing a
/// snippet on disk keeps the corpus consistent.
pub fn load_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let manifest_path = dir.join("manifest.json");
    let text = match fs::read_to_string(&manifest_path) {
        Ok(text) => text,
        Err(err) if err.kind() == io::ErrorKind::NotFound => {
            return Err(CorpusError::NoManifest(manifest_path))
        }
        Err(source) => {
            return Err(CorpusError::Io {
                path: manifest_path,
                source,
            })
        }
    };
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|source| CorpusError::MalformedManifest {
            path: manifest_path,
            source,
        })?;
    let mut corpus = Corpus::new(manifest.name);
    let mut seen = BTreeSet::new();
    for entry in manifest.snippets {
        if !seen.insert(entry.id.clone()) {
            return Err(CorpusError::DuplicateId(entry.id));
        }
        let path = dir.join(&entry.file);
        let source = match fs::read_to_string(&path) {
            Ok(source) => source,
            Err(err) if err.kind() == io::ErrorKind::NotFound => {
                return Err(CorpusError::MissingSnippetFile(path))
            }
            Err(source) => return Err(CorpusError::Io { path, source }),
        };
        corpus.push(Snippet::new(entry.id, entry.library, source))?;
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extracts_fenced_response() {
        let scan = extract_imports("```java\nimport java.util.List;\n```");
        let names: Vec<&str> = scan.imports.iter().map(Fqn::as_str).collect();
        assert_eq!(names, ["java.util.List"]);
        assert!(scan.wildcards.is_empty());
    }

    #[test]
    fn wildcard_and_static_are_kept_apart() {
        let scan = extract_imports(
            "import java.util.*;\nimport static org.junit.Assert.assertEquals;\nimport a.B;\n",
        );
        assert_eq!(scan.imports.len(), 1);
        assert_eq!(scan.wildcards, ["java.util"]);
        assert_eq!(scan.statics, ["org.junit.Assert.assertEquals"]);
    }

    #[test]
    fn duplicates_collapse() {
        let scan = extract_imports("import a.B;\nimport a.B;\nimport a.B;");
        assert_eq!(scan.imports.len(), 1);
    }

    #[test]
    fn tolerates_trailing_comment_and_indent() {
        let scan = extract_imports("    import a.B; // while\n");
        assert_eq!(scan.imports.iter().next().unwrap().as_str(), "a.B");
    }

    #[test]
    fn ignores_malformed_import_lines() {
        let scan = extract_imports("import ;\nimport a..b.C;\nimportx a.B;\nimport\n");
        assert!(scan.imports.is_empty());
        assert!(scan.wildcards.is_empty());
    }

    #[test]
    fn strip_removes_only_import_lines() {
        let source = "package p;\nimport a.B;\nimport c.d.*;\nclass C {\n}\n";
        let (stripped, scan) = strip_imports(source);
        assert_eq!(stripped, "package p;\nclass C {\n}\n");
        assert_eq!(scan.imports.len(), 1);
        assert_eq!(scan.wildcards.len(), 1);
    }

    #[test]
    fn strip_of_import_free_text_is_identity() {
        let source = "class C {\n  int x; // not an import, just mentions import a.B;\n}\n";
        let (stripped, scan) = strip_imports(source);
        assert_eq!(stripped, source);
        assert!(scan.imports.is_empty());
    }

    #[test]
    fn snippet_derives_ground_truth() {
        let snippet = Snippet::new("s1", "lib", "import a.B;\nclass C {}\n");
        let names: Vec<&str> = snippet.ground_truth.iter().map(Fqn::as_str).collect();
        assert_eq!(names, ["a.B"]);
        assert_eq!(snippet.stripped_source(), "class C {}\n");
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let mut corpus = Corpus::new("c");
        corpus.push(Snippet::new("a1", "a", "class C {}")).unwrap();
        let err = corpus.push(Snippet::new("a1", "a", "class D {}"));
        assert!(matches!(err, Err(CorpusError::DuplicateId(_))));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut corpus = Corpus::new("demo");
        corpus
            .push(Snippet::new("lib01", "lib", "import a.B;\nclass Main {\n}\n"))
            .unwrap();
        corpus
            .push(Snippet::new("lib02", "lib", "class Main {\n}\n"))
            .unwrap();
        save_corpus(&corpus, dir.path()).unwrap();
        let loaded = load_corpus(dir.path()).unwrap();
        assert_eq!(loaded, corpus);
    }

    #[test]
    fn load_reports_missing_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_corpus(dir.path()),
            Err(CorpusError::NoManifest(_))
        ));
    }

    #[test]
    fn load_reports_missing_snippet_file() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = r#"{"name":"x","snippets":[{"id":"a1","library":"a","file":"a1.java"}]}"#;
        fs::write(dir.path().join("manifest.json"), manifest).unwrap();
        assert!(matches!(
            load_corpus(dir.path()),
            Err(CorpusError::MissingSnippetFile(_))
        ));
    }
}
