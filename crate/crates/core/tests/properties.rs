//! Randomized checks of the invariants the pipeline leans on, driven by
//! proptest. Unit tests pin specific examples; these push arbitrary inputs
//! through the same guarantees.

use std::sync::OnceLock;

use proptest::collection::vec;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snipinfer_core::fqn::Fqn;
use snipinfer_core::generate::{generate_snippet, GenConfig, GeneratedSnippet};
use snipinfer_core::infer::infer_imports;
use snipinfer_core::kb::{load_kb, KnowledgeBase};
use snipinfer_core::leakage::{scan, shortlist, FileMeta};
use snipinfer_core::score::score_snippet;
use snipinfer_core::score::wilcoxon::wilcoxon_signed_rank;
use snipinfer_core::snippet::{extract_imports, strip_imports};
use snipinfer_core::syntax::{lex, parse, render};
use snipinfer_core::transform::{
    add_keyword_comments, apply, strip_keyword_comments, TransformKind,
};
use snipinfer_core::ImportSet;

const LIBRARIES: [&str; 6] = ["android", "commons", "gwt", "hibernate", "jodatime", "xstream"];

fn bench_kb() -> &'static KnowledgeBase {
    static KB: OnceLock<KnowledgeBase> = OnceLock::new();
    KB.get_or_init(|| {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures/bench_kb.jsonl");
        load_kb(&path).expect("benchmark knowledge base loads")
    })
}

fn generated(library: usize, seed: u64) -> GeneratedSnippet {
    let config = GenConfig::default();
    generate_snippet(
        bench_kb(),
        LIBRARIES[library % LIBRARIES.len()],
        "prop01",
        &config,
        ChaCha8Rng::seed_from_u64(seed),
    )
    .expect("snippet generates")
}

fn fqn_text() -> impl Strategy<Value = String> {
    (vec("[a-z][a-z0-9]{0,4}", 1..4), "[A-Z][A-Za-z0-9]{0,6}")
        .prop_map(|(packages, ty)| format!("{}.{ty}", packages.join(".")))
}

fn body_line() -> impl Strategy<Value = String> {
    "[ -~]{0,40}".prop_map(|line| {
        if line.trim_start().starts_with("import") {
            format!("x{line}")
        } else {
            line
        }
    })
}

proptest! {
    #[test]
    fn import_stripping_removes_exactly_the_import_lines(
        body in vec(body_line(), 0..12),
        fqns in vec(fqn_text(), 0..6),
        trailing_newline in any::<bool>(),
    ) {
        let mut lines: Vec<String> = body.clone();
        for (i, fqn) in fqns.iter().enumerate() {
            lines.insert(i.min(lines.len()), format!("import {fqn};"));
        }
        let mut source = lines.join("\n");
        if trailing_newline {
            source.push('\n');
        }

        let scan = extract_imports(&source);
        let mut planted = ImportSet::new();
        for fqn in &fqns {
            planted.insert(Fqn::parse(fqn).unwrap());
        }
        prop_assert_eq!(&scan.imports, &planted);

        let (stripped, _) = strip_imports(&source);
        prop_assert!(extract_imports(&stripped).imports.is_empty());
        let kept: Vec<&str> = stripped.lines().collect();
        let expected: Vec<&str> = source
            .lines()
            .filter(|line| !line.starts_with("import "))
            .collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn import_sets_ignore_order_and_duplicates(fqns in vec(fqn_text(), 0..10)) {
        let parsed: Vec<Fqn> = fqns.iter().map(|f| Fqn::parse(f).unwrap()).collect();
        let mut forward = ImportSet::new();
        for fqn in &parsed {
            forward.insert(fqn.clone());
        }
        let mut backward = ImportSet::new();
        for fqn in parsed.iter().rev() {
            backward.insert(fqn.clone());
            backward.insert(fqn.clone());
        }
        prop_assert_eq!(&forward, &backward);

        let listed: Vec<&str> = forward.iter().map(|f| f.as_str()).collect();
        let mut sorted = listed.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(listed, sorted);
    }

    #[test]
    fn lexing_is_lossless_whenever_it_succeeds(
        source in "[a-zA-Z0-9_ \\t\\n;{}()<>.,\"'=+*/-]{0,120}",
    ) {
        if let Ok(tokens) = lex(&source) {
            let joined: String = tokens.iter().map(|t| t.text.as_str()).collect();
            prop_assert_eq!(joined, source);
        }
    }

    #[test]
    fn keyword_comments_round_trip_any_text(text in any::<String>(), seed in any::<u64>()) {
        let commented = add_keyword_comments(&text, seed);
        prop_assert_eq!(strip_keyword_comments(&commented), text);
    }

    #[test]
    fn wilcoxon_is_symmetric_and_shift_invariant(
        pairs in vec((-5i8..=5, -5i8..=5), 0..12),
        shift in -3i8..=3,
    ) {
        let before: Vec<f64> = pairs.iter().map(|(b, _)| *b as f64).collect();
        let after: Vec<f64> = pairs.iter().map(|(_, a)| *a as f64).collect();

        let forward = wilcoxon_signed_rank(&before, &after);
        let swapped = wilcoxon_signed_rank(&after, &before);
        prop_assert_eq!(forward.p_value, swapped.p_value);
        prop_assert_eq!(forward.w_plus, swapped.w_minus);
        prop_assert_eq!(forward.w_minus, swapped.w_plus);

        let shifted_before: Vec<f64> = before.iter().map(|v| v + shift as f64).collect();
        let shifted_after: Vec<f64> = after.iter().map(|v| v + shift as f64).collect();
        let shifted = wilcoxon_signed_rank(&shifted_before, &shifted_after);
        prop_assert_eq!(forward, shifted);
    }

    #[test]
    fn scores_match_brute_force_on_arbitrary_sets(
        inferred_mask in vec(any::<bool>(), 12),
        expected_mask in vec(any::<bool>(), 12),
    ) {
        let pool: Vec<Fqn> = (0..12)
            .map(|i| Fqn::parse(&format!("p{}.T{i}", i % 3)).unwrap())
            .collect();
        let mut inferred = ImportSet::new();
        let mut expected = ImportSet::new();
        for (i, fqn) in pool.iter().enumerate() {
            if inferred_mask[i] {
                inferred.insert(fqn.clone());
            }
            if expected_mask[i] {
                expected.insert(fqn.clone());
            }
        }

        let score = score_snippet("s", &inferred, &expected);
        let tp = pool.iter().filter(|f| inferred.contains(f) && expected.contains(f)).count();
        let fp = pool.iter().filter(|f| inferred.contains(f) && !expected.contains(f)).count();
        let fn_ = pool.iter().filter(|f| !inferred.contains(f) && expected.contains(f)).count();
        prop_assert_eq!((score.tp, score.fp, score.fn_), (tp, fp, fn_));
        prop_assert_eq!(score.precision.is_some(), tp + fp > 0);
        prop_assert_eq!(score.recall.is_some(), tp + fn_ > 0);
        if let (Some(p), Some(r)) = (score.precision, score.recall) {
            if p + r > 0.0 {
                let f1 = score.f1.unwrap();
                prop_assert!((f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn leak_counts_are_conserved_across_the_shortlist_split(
        stream in vec((0usize..6, any::<bool>(), any::<bool>()), 0..60),
        min in 1u64..6,
    ) {
        let names: std::collections::BTreeSet<String> =
            ["A.java", "B.java"].iter().map(|s| s.to_string()).collect();
        let mut malformed_fed = 0u64;
        let records: Vec<Result<FileMeta, String>> = stream
            .iter()
            .map(|(repo, matched, broken)| {
                if *broken {
                    malformed_fed += 1;
                    return Err("bad record".to_string());
                }
                let name = if *matched { "A.java" } else { "notes.txt" };
                Ok(FileMeta {
                    path: format!("src/{name}"),
                    repo: format!("owner{repo}/repo{repo}"),
                    author: format!("owner{}", repo % 3),
                })
            })
            .collect();

        let report = scan(records, &names);
        prop_assert_eq!(report.malformed, malformed_fed);
        prop_assert_eq!(report.repo_counts.values().sum::<u64>(), report.total_matches);
        prop_assert_eq!(report.author_counts.values().sum::<u64>(), report.total_matches);

        let short = shortlist(&report, min);
        let listed: u64 = short.repos.iter().map(|(_, n)| n).sum();
        let excluded: u64 = report
            .repo_counts
            .values()
            .filter(|n| **n < min)
            .sum();
        prop_assert_eq!(listed + excluded, report.total_matches);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_snippets_render_and_reparse_to_the_same_tree(
        library in 0usize..6,
        seed in any::<u64>(),
    ) {
        let snippet = generated(library, seed).snippet;
        let first = parse(&snippet.stripped_source()).unwrap();
        let second = parse(&render(&first)).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn any_transform_of_a_generated_snippet_keeps_truth_and_inference(
        library in 0usize..6,
        seed in any::<u64>(),
        kind_index in 0usize..4,
    ) {
        let kind = [
            TransformKind::Rename,
            TransformKind::Lower,
            TransformKind::Comment,
            TransformKind::All,
        ][kind_index];
        let snippet = generated(library, seed).snippet;
        let (variant, _) = apply(kind, &snippet, seed).unwrap();

        prop_assert_eq!(&variant.ground_truth, &snippet.ground_truth);
        prop_assert!(parse(&variant.stripped_source()).is_ok());

        let base = infer_imports(&snippet, bench_kb()).unwrap();
        let transformed = infer_imports(&variant, bench_kb()).unwrap();
        prop_assert_eq!(base.imports, transformed.imports);
    }
}
