//! Semantic-preserving snippet transformations: identifier renaming, code
//! lowering, keyword comments, and their sequential composition.

pub mod comments;
pub mod lower;
pub mod rename;

pub use comments::{add_keyword_comments, strip_keyword_comments};
pub use lower::lower_code;
pub use rename::{apply_tables, rename_identifiers, RenameMap, RenameTables};

use crate::seed::derive_seed;
use crate::snippet::{strip_imports, Snippet};
use crate::syntax::{parse, render, ParseError};

/// Which transformation to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Rename,
    Lower,
    Comment,
    All,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Rename => "rename",
            TransformKind::Lower => "lower",
            TransformKind::Comment => "comment",
            TransformKind::All => "all",
        }
    }
}

/// Applies one transformation to a snippet, deriving a per-snippet seed
/// from the corpus seed and snippet id. Returns the transformed snippet
/// and, when renaming was involved, the applied renames.
pub fn apply(
    kind: TransformKind,
    snippet: &Snippet,
    corpus_seed: u64,
) -> Result<(Snippet, Option<RenameMap>), ParseError> {
    let seed = derive_seed(corpus_seed, "transform", &snippet.id);
    let (source, map) = match kind {
        TransformKind::Rename => {
            let unit = parse(&snippet.source)?;
            let (renamed, map) = rename_identifiers(&unit, seed);
            (render(&renamed), Some(map))
        }
        TransformKind::Lower => {
            let unit = parse(&snippet.source)?;
            (render(&lower_code(&unit, seed)), None)
        }
        TransformKind::Comment => (add_keyword_comments(&snippet.source, seed), None),
        TransformKind::All => {
            let (source, map) = apply_all_source(&snippet.source, seed)?;
            (source, Some(map))
        }
    };
    let out = Snippet::new(snippet.id.clone(), snippet.library.clone(), source);
    debug_assert_eq!(
        out.ground_truth, snippet.ground_truth,
        "transformations must not change the expected imports"
    );
    Ok((out, map))
}

/// Runs rename, lower, and keyword comments in order on the import-stripped
/// body, then re-attaches the import lines.
fn apply_all_source(source: &str, seed: u64) -> Result<(String, RenameMap), ParseError> {
    let (body, scan) = strip_imports(source);
    let unit = parse(&body)?;
    let (renamed, map) = rename_identifiers(&unit, seed);
    let lowered = lower_code(&renamed, seed);
    let commented = add_keyword_comments(&render(&lowered), seed);

    let mut import_lines = String::new();
    for fqn in scan.imports.iter() {
        import_lines.push_str("import ");
        import_lines.push_str(fqn.as_str());
        import_lines.push_str(";\n");
    }
    for pkg in &scan.wildcards {
        import_lines.push_str("import ");
        import_lines.push_str(pkg);
        import_lines.push_str(".*;\n");
    }
    for name in &scan.statics {
        import_lines.push_str("import static ");
        import_lines.push_str(name);
        import_lines.push_str(";\n");
    }
    if import_lines.is_empty() {
        return Ok((commented, map));
    }

    // Imports go after the package line when there is one.
    let out = match commented.split_once('\n') {
        Some((first, rest)) if first.starts_with("package ") => {
            format!("{first}\n{import_lines}{rest}")
        }
        _ => format!("{import_lines}{commented}"),
    };
    Ok((out, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqn::Fqn;

    fn snippet(source: &str) -> Snippet {
        Snippet::new("t01".to_string(), "test".to_string(), source.to_string())
    }

    const SRC: &str = "import java.util.List;\nimport java.util.ArrayList;\n\nclass Holder {\n    List items = new ArrayList();\n    int count() {\n        if (items.size() > 0) {\n            return items.size();\n        }\n        return 0;\n    }\n}\n";

    #[test]
    fn each_kind_preserves_ground_truth() {
        let original = snippet(SRC);
        for kind in [
            TransformKind::Rename,
            TransformKind::Lower,
            TransformKind::Comment,
            TransformKind::All,
        ] {
            let (out, _) = apply(kind, &original, 17).unwrap();
            assert_eq!(
                out.ground_truth, original.ground_truth,
                "{} changed the expected imports",
                kind.name()
            );
        }
    }

    #[test]
    fn combined_output_reparses_after_comment_stripping() {
        let original = snippet(SRC);
        let (out, _) = apply(TransformKind::All, &original, 17).unwrap();
        let (body, _) = strip_imports(&out.source);
        let cleaned = strip_keyword_comments(&body);
        parse(&cleaned).expect("combined output parses");
    }

    #[test]
    fn combined_removes_original_local_names() {
        let original = snippet(SRC);
        let (out, map) = apply(TransformKind::All, &original, 17).unwrap();
        let map = map.unwrap();
        assert!(map.variables.iter().any(|(from, _)| from == "items"));
        let (body, _) = strip_imports(&out.source);
        assert!(!body.contains("items"), "{body}");
        assert!(!body.contains("Holder"), "{body}");
    }

    #[test]
    fn combined_keeps_import_lines_uncommented() {
        let original = snippet(SRC);
        let (out, _) = apply(TransformKind::All, &original, 17).unwrap();
        let import_line = out
            .source
            .lines()
            .find(|l| l.starts_with("import "))
            .unwrap();
        assert_eq!(import_line, "import java.util.ArrayList;");
    }

    #[test]
    fn package_line_stays_first_when_reattaching() {
        let src = "package demo;\n\nimport java.util.List;\n\nclass A {\n    List x;\n}\n";
        let (out, _) = apply(TransformKind::All, &snippet(src), 5).unwrap();
        let first = out.source.lines().next().unwrap();
        assert!(first.starts_with("package "), "{}", out.source);
        assert!(
            out.source.lines().nth(1) == Some("import java.util.List;"),
            "{}",
            out.source
        );
        assert!(out
            .ground_truth
            .contains(&Fqn::parse("java.util.List").unwrap()));
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let original = snippet(SRC);
        let (a, _) = apply(TransformKind::All, &original, 23).unwrap();
        let (b, _) = apply(TransformKind::All, &original, 23).unwrap();
        assert_eq!(a.source, b.source);
    }
}
