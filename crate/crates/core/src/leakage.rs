//! Training-corpus contamination audit: stream file metadata from a large
//! code dataset and tally which repositories and authors carry files whose
//! names collide with the benchmark.
//!
//! Matching is exact basename equality by default. A normalized mode
//! (case-folded, trailing digits stripped from the stem) exists for
//! exploratory sweeps but is off for reported runs. The scan is single-pass:
//! memory grows with the number of distinct repos and authors seen, never
//! with stream length.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LeakError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot tell the metadata format of {0} (expected .jsonl or .csv)")]
    UnknownFormat(PathBuf),
}

/// One record of the metadata stream: where a file lives in the dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileMeta {
    pub path: String,
    /// Repository as owner/name.
    pub repo: String,
    pub author: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Exact,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakReport {
    pub repo_counts: BTreeMap<String, u64>,
    pub author_counts: BTreeMap<String, u64>,
    /// Minimum match count a repo or author needs to make the shortlist.
    pub threshold: u64,
    pub total_matches: u64,
    pub records_scanned: u64,
    pub malformed: u64,
}

/// Shortlist entries ordered by descending count, ties broken by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortlist {
    pub min_matches: u64,
    pub repos: Vec<(String, u64)>,
    pub authors: Vec<(String, u64)>,
}

fn basename(path: &str) -> &str {
    path.rsplit(['/', '\\']).next().unwrap_or(path)
}

/// Case-fold and strip trailing digits from the stem, so Foo05.java and
/// FOO99.java collapse to the same key.
fn normalize(name: &str) -> String {
    let (stem, ext) = match name.rfind('.') {
        Some(dot) => (&name[..dot], &name[dot..]),
        None => (name, ""),
    };
    let stem = stem.trim_end_matches(|c: char| c.is_ascii_digit());
    format!("{}{}", stem.to_lowercase(), ext.to_lowercase())
}

/// Tally benchmark-name collisions over a metadata stream. `Err` items are
/// counted as malformed and skipped; the scan itself never fails.
pub fn scan_with_mode<I>(
    records: I,
    benchmark_filenames: &BTreeSet<String>,
    mode: MatchMode,
) -> LeakReport
where
    I: IntoIterator<Item = Result<FileMeta, String>>,
{
    debug_assert!(
        benchmark_filenames.iter().all(|n| basename(n) == n),
        "benchmark names must be bare basenames"
    );
    let names: BTreeSet<String> = match mode {
        MatchMode::Exact => benchmark_filenames.clone(),
        MatchMode::Normalized => benchmark_filenames.iter().map(|n| normalize(n)).collect(),
    };
    let mut report = LeakReport {
        repo_counts: BTreeMap::new(),
        author_counts: BTreeMap::new(),
        threshold: 1,
        total_matches: 0,
        records_scanned: 0,
        malformed: 0,
    };
    for record in records {
        report.records_scanned += 1;
        let meta = match record {
            Ok(meta) if !meta.path.is_empty() => meta,
            _ => {
                report.malformed += 1;
                continue;
            }
        };
        let name = match mode {
            MatchMode::Exact => basename(&meta.path).to_string(),
            MatchMode::Normalized => normalize(basename(&meta.path)),
        };
        if names.contains(&name) {
            report.total_matches += 1;
            *report.repo_counts.entry(meta.repo).or_insert(0) += 1;
            *report.author_counts.entry(meta.author).or_insert(0) += 1;
        }
    }
    report
}

pub fn scan<I>(records: I, benchmark_filenames: &BTreeSet<String>) -> LeakReport
where
    I: IntoIterator<Item = Result<FileMeta, String>>,
{
    scan_with_mode(records, benchmark_filenames, MatchMode::Exact)
}

/// Filter a report down to repos and authors with at least `min_matches`,
/// each list descending by count with lexicographic tie-break.
pub fn shortlist(report: &LeakReport, min_matches: u64) -> Shortlist {
    let pick = |counts: &BTreeMap<String, u64>| -> Vec<(String, u64)> {
        let mut rows: Vec<(String, u64)> = counts
            .iter()
            .filter(|(_, count)| **count >= min_matches)
            .map(|(name, count)| (name.clone(), *count))
            .collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        rows
    };
    Shortlist {
        min_matches,
        repos: pick(&report.repo_counts),
        authors: pick(&report.author_counts),
    }
}

/// Iterate JSON-Lines metadata. Blank lines are skipped; unparseable lines
/// surface as `Err` so the scan can count them.
pub fn read_jsonl<R: BufRead>(reader: R) -> impl Iterator<Item = Result<FileMeta, String>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(idx, line)| match line {
            Ok(text) if text.trim().is_empty() => None,
            Ok(text) => Some(
                serde_json::from_str::<FileMeta>(&text)
                    .map_err(|e| format!("line {}: {e}", idx + 1)),
            ),
            Err(e) => Some(Err(format!("line {}: {e}", idx + 1))),
        })
}

/// Iterate CSV metadata with columns path,repo,author. A leading header row
/// spelling out those column names is recognized and skipped.
pub fn read_csv<R: Read>(reader: R) -> impl Iterator<Item = Result<FileMeta, String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader)
        .into_records()
        .enumerate()
        .filter_map(|(idx, record)| match record {
            Ok(rec) if idx == 0 && rec.get(0) == Some("path") && rec.get(1) == Some("repo") => {
                None
            }
            Ok(rec) if rec.len() >= 3 => Some(Ok(FileMeta {
                path: rec[0].to_string(),
                repo: rec[1].to_string(),
                author: rec[2].to_string(),
            })),
            Ok(rec) => Some(Err(format!(
                "row {}: expected 3 fields, got {}",
                idx + 1,
                rec.len()
            ))),
            Err(e) => Some(Err(format!("row {}: {e}", idx + 1))),
        })
}

/// Scan a metadata file, picking the format from its extension.
pub fn scan_path(
    path: &Path,
    benchmark_filenames: &BTreeSet<String>,
    mode: MatchMode,
) -> Result<LeakReport, LeakError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_lowercase());
    let file = File::open(path)?;
    match ext.as_deref() {
        Some("jsonl") | Some("ndjson") => Ok(scan_with_mode(
            read_jsonl(BufReader::new(file)),
            benchmark_filenames,
            mode,
        )),
        Some("csv") => Ok(scan_with_mode(read_csv(file), benchmark_filenames, mode)),
        _ => Err(LeakError::UnknownFormat(path.to_path_buf())),
    }
}

/// Read benchmark basenames from a file, one per line, ignoring blanks.
pub fn load_names(path: &Path) -> Result<BTreeSet<String>, LeakError> {
    let file = BufReader::new(File::open(path)?);
    let mut names = BTreeSet::new();
    for line in file.lines() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            names.insert(trimmed.to_string());
        }
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn meta(path: &str, repo: &str, author: &str) -> Result<FileMeta, String> {
        Ok(FileMeta {
            path: path.to_string(),
            repo: repo.to_string(),
            author: author.to_string(),
        })
    }

    fn names(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn same_basename_across_repos_tallies_each() {
        let stream = vec![
            meta("a/src/JodaTime05.java", "alice/utils", "alice"),
            meta("b/JodaTime05.java", "bob/dump", "bob"),
            meta("b/old/JodaTime05.java", "bob/dump", "bob"),
            meta("b/Other.java", "bob/dump", "bob"),
        ];
        let report = scan(stream, &names(&["JodaTime05.java"]));
        assert_eq!(report.total_matches, 3);
        assert_eq!(report.repo_counts.len(), 2);
        assert_eq!(report.repo_counts["alice/utils"], 1);
        assert_eq!(report.repo_counts["bob/dump"], 2);
        assert_eq!(report.author_counts["bob"], 2);
        assert_eq!(report.records_scanned, 4);
    }

    #[test]
    fn empty_benchmark_set_matches_nothing() {
        let stream = vec![meta("x/Foo.java", "r/r", "r")];
        let report = scan(stream, &BTreeSet::new());
        assert_eq!(report.total_matches, 0);
        assert!(report.repo_counts.is_empty());
        assert!(report.author_counts.is_empty());
    }

    #[test]
    fn matching_is_on_the_basename_only() {
        let stream = vec![
            meta("deep/nested/dirs/Snip01.java", "r/a", "a"),
            meta("Snip01.java", "r/b", "b"),
            meta("windows\\style\\Snip01.java", "r/c", "c"),
            meta("not/Snip01.java.txt", "r/d", "d"),
            meta("prefix/XSnip01.java", "r/e", "e"),
        ];
        let report = scan(stream, &names(&["Snip01.java"]));
        assert_eq!(report.total_matches, 3);
        assert!(!report.repo_counts.contains_key("r/d"));
        assert!(!report.repo_counts.contains_key("r/e"));
    }

    #[test]
    fn a_repo_hoarding_the_whole_benchmark_tops_the_shortlist() {
        let hoard = "oracle-mirror/type-resolution";
        let mut stream = Vec::new();
        let benchmark: Vec<String> = (0..267).map(|i| format!("Snippet{i:03}.java")).collect();
        for name in &benchmark {
            stream.push(meta(&format!("data/{name}"), hoard, "mirror-owner"));
        }
        // Background noise: scattered repos that each collide on a few names.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for i in 0..40 {
            let hits = rng.gen_range(1..5);
            for h in 0..hits {
                let name = &benchmark[rng.gen_range(0..benchmark.len())];
                stream.push(meta(
                    &format!("misc{h}/{name}"),
                    &format!("noise/repo{i}"),
                    &format!("noise{i}"),
                ));
            }
        }
        let set: BTreeSet<String> = benchmark.iter().cloned().collect();
        let report = scan(stream, &set);
        assert_eq!(report.repo_counts[hoard], 267);

        let top = shortlist(&report, 5);
        assert_eq!(top.repos, vec![(hoard.to_string(), 267)]);
        assert_eq!(top.authors, vec![("mirror-owner".to_string(), 267)]);
    }

    #[test]
    fn shortlist_orders_by_count_then_name() {
        let stream = vec![
            meta("1/A.java", "r/beta", "beta"),
            meta("2/A.java", "r/beta", "beta"),
            meta("3/A.java", "r/alpha", "alpha"),
            meta("4/A.java", "r/alpha", "alpha"),
            meta("5/A.java", "r/gamma", "gamma"),
            meta("6/A.java", "r/gamma", "gamma"),
            meta("7/A.java", "r/gamma", "gamma"),
        ];
        let report = scan(stream, &names(&["A.java"]));
        let all = shortlist(&report, 1);
        assert_eq!(
            all.repos,
            vec![
                ("r/gamma".to_string(), 3),
                ("r/alpha".to_string(), 2),
                ("r/beta".to_string(), 2),
            ]
        );
        assert!(shortlist(&report, 4).repos.is_empty());
        assert_eq!(shortlist(&report, 3).repos.len(), 1);
    }

    #[test]
    fn shortlisted_and_excluded_counts_conserve_the_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = names(&["A.java", "B.java", "C.java"]);
        let stream: Vec<_> = (0..500)
            .map(|_| {
                let name = ["A.java", "B.java", "C.java", "D.java"][rng.gen_range(0..4)];
                let repo = format!("owner{}/repo", rng.gen_range(0..12));
                let author = format!("owner{}", rng.gen_range(0..12));
                meta(&format!("src/{name}"), &repo, &author)
            })
            .collect();
        let report = scan(stream, &set);
        let repo_sum: u64 = report.repo_counts.values().sum();
        let author_sum: u64 = report.author_counts.values().sum();
        assert_eq!(repo_sum, report.total_matches);
        assert_eq!(author_sum, report.total_matches);

        for min in [1, 3, 10, 100] {
            let top = shortlist(&report, min);
            let kept: u64 = top.repos.iter().map(|(_, c)| c).sum();
            let dropped: u64 = report
                .repo_counts
                .values()
                .filter(|c| **c < min)
                .sum();
            assert_eq!(kept + dropped, report.total_matches);
        }
    }

    #[test]
    fn malformed_jsonl_lines_are_counted_and_skipped() {
        let input = concat!(
            "{\"path\":\"a/Hit.java\",\"repo\":\"r/one\",\"author\":\"one\"}\n",
            "not json at all\n",
            "{\"path\":\"b/Hit.java\",\"repo\":\"r/two\"}\n",
            "{\"path\":\"\",\"repo\":\"r/three\",\"author\":\"three\"}\n",
            "\n",
            "{\"path\":\"c/Hit.java\",\"repo\":\"r/four\",\"author\":\"four\"}\n",
        );
        let report = scan(read_jsonl(input.as_bytes()), &names(&["Hit.java"]));
        assert_eq!(report.malformed, 3);
        assert_eq!(report.total_matches, 2);
        assert_eq!(report.records_scanned, 5);
    }

    #[test]
    fn csv_and_jsonl_streams_produce_the_same_report() {
        let jsonl = concat!(
            "{\"path\":\"x/Hit.java\",\"repo\":\"r/one\",\"author\":\"one\"}\n",
            "{\"path\":\"y/Miss.java\",\"repo\":\"r/one\",\"author\":\"one\"}\n",
            "{\"path\":\"z/Hit.java\",\"repo\":\"r/two\",\"author\":\"two\"}\n",
        );
        let csv = concat!(
            "path,repo,author\n",
            "x/Hit.java,r/one,one\n",
            "y/Miss.java,r/one,one\n",
            "z/Hit.java,r/two,two\n",
        );
        let set = names(&["Hit.java"]);
        let from_jsonl = scan(read_jsonl(jsonl.as_bytes()), &set);
        let from_csv = scan(read_csv(csv.as_bytes()), &set);
        assert_eq!(from_jsonl, from_csv);
        assert_eq!(from_jsonl.total_matches, 2);
    }

    #[test]
    fn csv_rows_missing_fields_are_malformed() {
        let csv = "a/Hit.java,r/one,one\nbroken-row\n";
        let report = scan(read_csv(csv.as_bytes()), &names(&["Hit.java"]));
        assert_eq!(report.malformed, 1);
        assert_eq!(report.total_matches, 1);
    }

    #[test]
    fn normalized_mode_folds_case_and_digits() {
        let stream = vec![
            meta("a/JODATIME99.JAVA", "r/shout", "shout"),
            meta("b/JodaTime05.java", "r/plain", "plain"),
            meta("c/JodaTimeX.java", "r/other", "other"),
        ];
        let set = names(&["JodaTime05.java"]);
        let exact = scan_with_mode(stream.clone(), &set, MatchMode::Exact);
        assert_eq!(exact.total_matches, 1);
        let loose = scan_with_mode(stream, &set, MatchMode::Normalized);
        assert_eq!(loose.total_matches, 2);
        assert!(!loose.repo_counts.contains_key("r/other"));
    }

    #[test]
    fn long_streams_fold_into_bounded_counters() {
        let set = names(&["Hot.java"]);
        let stream = (0..100_000u64).map(|i| {
            Ok(FileMeta {
                path: format!("f{i}/Hot.java"),
                repo: format!("owner{}/repo", i % 10),
                author: format!("owner{}", i % 10),
            })
        });
        let report = scan(stream, &set);
        assert_eq!(report.total_matches, 100_000);
        assert_eq!(report.repo_counts.len(), 10);
        assert_eq!(report.author_counts.len(), 10);
        assert!(report.repo_counts.values().all(|c| *c == 10_000));
    }

    #[test]
    fn report_round_trips_through_json() {
        let stream = vec![meta("a/Hit.java", "r/one", "one")];
        let report = scan(stream, &names(&["Hit.java"]));
        let text = serde_json::to_string(&report).unwrap();
        let back: LeakReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }
}
