//! Corpus-scale evaluation: strip each snippet's imports, prompt the model,
//! parse whatever comes back, and collect one result per snippet in id
//! order. A failing snippet records its error and never disturbs the rest.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use snipinfer_core::snippet::extract_imports;
use snipinfer_core::{Corpus, ImportSet};

use crate::client::{LlmClient, QueryError, RunConfig};
use crate::prompt::build_prompt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub id: String,
    /// Verbatim model output; absent when the query failed.
    pub raw: Option<String>,
    pub imports: ImportSet,
    pub latency_ms: u64,
    pub retries: u32,
    #[serde(skip)]
    pub cache_hit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Query the model once per snippet with bounded parallelism. Only client
/// construction can fail; per-snippet errors are recorded in their results.
pub fn run_eval(corpus: &Corpus, config: &RunConfig) -> Result<Vec<InferenceResult>, QueryError> {
    let client = LlmClient::new(config.clone())?;
    let snippets = corpus.snippets();
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<InferenceResult>>> = Mutex::new(vec![None; snippets.len()]);

    std::thread::scope(|scope| {
        for _ in 0..config.jobs.max(1) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= snippets.len() {
                    break;
                }
                let snippet = &snippets[index];
                let prompt = build_prompt(&snippet.stripped_source());
                let result = match client.query(&prompt) {
                    Ok(outcome) => InferenceResult {
                        id: snippet.id.clone(),
                        imports: extract_imports(&outcome.text).imports,
                        raw: Some(outcome.text),
                        latency_ms: outcome.latency_ms,
                        retries: outcome.retries,
                        cache_hit: outcome.cache_hit,
                        error: None,
                    },
                    Err(error) => InferenceResult {
                        id: snippet.id.clone(),
                        raw: None,
                        imports: ImportSet::new(),
                        latency_ms: 0,
                        retries: 0,
                        cache_hit: false,
                        error: Some(error.to_string()),
                    },
                };
                slots.lock().unwrap()[index] = Some(result);
            });
        }
    });

    let mut results: Vec<InferenceResult> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every index was claimed by a worker"))
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(results)
}

/// Write results as a plain JSON array.
pub fn save_results(path: &Path, results: &[InferenceResult]) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(results).expect("results serialize");
    fs::write(path, text)
}

pub fn load_results(path: &Path) -> Result<Vec<InferenceResult>, QueryError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| QueryError::BadResponse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stub::{StubReply, StubServer};
    use snipinfer_core::Snippet;
    use std::time::Duration;

    fn corpus() -> Corpus {
        let mut corpus = Corpus::new("stub-corpus");
        for (id, body) in [
            ("lib02", "class Main { List<String> xs; }"),
            ("lib01", "class Main { Logger log; }"),
            ("lib03", "class Main { int n; }"),
        ] {
            corpus
                .push(Snippet::new(id, "lib", format!("package src.a;\n{body}\n")))
                .unwrap();
        }
        corpus
    }

    fn config_for(server: &StubServer) -> RunConfig {
        RunConfig {
            endpoint: server.endpoint(),
            model: "stub-model".to_string(),
            timeout: Duration::from_secs(5),
            ..RunConfig::default()
        }
    }

    #[test]
    fn one_result_per_snippet_ordered_by_id() {
        let server = StubServer::fixed(StubReply::Content("import java.util.List;".into()));
        let results = run_eval(&corpus(), &config_for(&server)).unwrap();
        let ids: Vec<&str> = results.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["lib01", "lib02", "lib03"]);
        assert_eq!(server.calls(), 3);
    }

    #[test]
    fn fenced_reply_parses_to_an_import_set() {
        let server = StubServer::fixed(StubReply::Content(
            "```java\nimport java.util.List;\n```".into(),
        ));
        let results = run_eval(&corpus(), &config_for(&server)).unwrap();
        for result in &results {
            assert_eq!(result.imports.len(), 1);
            assert!(result
                .imports
                .iter()
                .any(|fqn| fqn.as_str() == "java.util.List"));
            assert_eq!(
                result.imports,
                extract_imports(result.raw.as_ref().unwrap()).imports
            );
        }
    }

    #[test]
    fn prompts_carry_stripped_sources() {
        let server = StubServer::fixed(StubReply::Content("ok".into()));
        let mut corpus = Corpus::new("one");
        corpus
            .push(Snippet::new(
                "a01",
                "a",
                "package src.a;\nimport old.Gone;\nclass Main { Gone g; }\n",
            ))
            .unwrap();
        run_eval(&corpus, &config_for(&server)).unwrap();
        let request = server.requests().pop().unwrap();
        assert!(request.body.contains("class Main"));
        assert!(!request.body.contains("import old.Gone"));
    }

    #[test]
    fn a_failing_snippet_never_disturbs_the_others() {
        let server = StubServer::sequence(vec![
            StubReply::Content("import a.B;".into()),
            StubReply::Status(400, "rejected".into()),
            StubReply::Content("import c.D;".into()),
        ]);
        let mut config = config_for(&server);
        config.jobs = 1;
        let results = run_eval(&corpus(), &config).unwrap();
        assert_eq!(results.len(), 3);
        let failed: Vec<&InferenceResult> =
            results.iter().filter(|r| r.error.is_some()).collect();
        assert_eq!(failed.len(), 1);
        assert!(failed[0].error.as_ref().unwrap().contains("400"));
        assert!(failed[0].imports.is_empty());
        assert!(failed[0].raw.is_none());
        for ok in results.iter().filter(|r| r.error.is_none()) {
            assert_eq!(ok.imports.len(), 1);
        }
    }

    #[test]
    fn cached_rerun_makes_no_network_calls_and_matches_byte_for_byte() {
        let dir = tempfile::tempdir().unwrap();
        let server = StubServer::fixed(StubReply::Content("import java.util.List;".into()));
        let mut config = config_for(&server);
        config.cache_dir = Some(dir.path().to_path_buf());

        let first = run_eval(&corpus(), &config).unwrap();
        let calls = server.calls();
        assert_eq!(calls, 3);

        let second = run_eval(&corpus(), &config).unwrap();
        assert_eq!(server.calls(), calls);
        assert!(second.iter().all(|r| r.cache_hit));
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
    }

    #[test]
    fn results_round_trip_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let server = StubServer::fixed(StubReply::Content("import java.util.List;".into()));
        let results = run_eval(&corpus(), &config_for(&server)).unwrap();
        let path = dir.path().join("results.json");
        save_results(&path, &results).unwrap();

        let text = fs::read_to_string(&path).unwrap();
        assert!(text.trim_start().starts_with('['));
        let back = load_results(&path).unwrap();
        assert_eq!(results, back);
    }
}
