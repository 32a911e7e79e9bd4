//! Acceptance check for the model-query protocol, matching the numbered
//! criteria checked in the core crate. Prints a `criterion 11: pass` line
//! when the runner speaks the pinned protocol against a local stub.

use std::time::{Duration, Instant};

use serde_json::Value;
use snipinfer_core::{Corpus, Snippet};
use snipinfer_llm::stub::{StubReply, StubServer};
use snipinfer_llm::{run_eval, RunConfig};

#[test]
fn criterion_11_runner_sends_the_pinned_request_and_parses_fenced_replies() {
    let started = Instant::now();
    let server = StubServer::fixed(StubReply::Content(
        "```java\nimport java.util.List;\n```".to_string(),
    ));

    let source = "class Example {\n    void run() {\n        List items = null;\n    }\n}\n";
    let mut corpus = Corpus::new("bench");
    corpus.push(Snippet::new("ex01", "jdk", source)).unwrap();

    let config = RunConfig {
        endpoint: server.endpoint(),
        model: "test-model".to_string(),
        jobs: 1,
        ..RunConfig::default()
    };
    let results = run_eval(&corpus, &config).unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].error, None);
    assert_eq!(
        results[0].raw.as_deref(),
        Some("```java\nimport java.util.List;\n```")
    );
    let imports: Vec<&str> = results[0].imports.iter().map(|f| f.as_str()).collect();
    assert_eq!(imports, ["java.util.List"]);

    let requests = server.requests();
    assert_eq!(requests.len(), 1);
    let body: Value = serde_json::from_str(&requests[0].body).unwrap();
    assert_eq!(body["temperature"].as_f64(), Some(0.0));
    assert_eq!(body["seed"].as_i64(), Some(1));
    assert_eq!(body["model"].as_str(), Some("test-model"));

    let messages = body["messages"].as_array().unwrap();
    assert_eq!(messages.len(), 2);
    assert_eq!(messages[0]["role"].as_str(), Some("system"));
    assert_eq!(
        messages[0]["content"].as_str(),
        Some("You are a helpful programming assistant.")
    );
    assert_eq!(messages[1]["role"].as_str(), Some("user"));
    let expected_user = concat!(
        "Add import statements to the following Java code. ",
        "Do not use wildcard imports. Include only the necessary import statements. ",
        "Do not import nonexistent types. Please note that you need to pay close attention ",
        "and your response should be specific and accurate. Avoid repetition. ",
        "Reply with the import statements only.\n",
        "class Example {\n    void run() {\n        List items = null;\n    }\n}\n",
    );
    assert_eq!(messages[1]["content"].as_str(), Some(expected_user));

    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "criterion 11 overran its 5s budget: took {elapsed:?}"
    );
    println!(
        "criterion 11: pass ({elapsed:.2?}) request pins temperature 0, seed 1, and the exact prompt; fenced reply parses"
    );
}
