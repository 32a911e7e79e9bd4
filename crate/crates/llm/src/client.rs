//! Blocking chat-completion client with a content-addressed disk cache.
//!
//! Every successful response is written to the cache keyed by the hash of
//! (model, seed, temperature, prompt), so reruns of an identical
//! configuration replay from disk without touching the network. Credentials
//! come from an environment variable and are only ever placed in the
//! Authorization header.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::prompt::PromptPair;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub seed: u64,
    pub max_retries: u32,
    pub timeout: Duration,
    pub jobs: usize,
    pub cache_dir: Option<PathBuf>,
    /// Name of the environment variable holding the API key. The key itself
    /// is read per request and never stored or logged.
    pub api_key_env: String,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            endpoint: "http://localhost:11434/v1".to_string(),
            model: "gpt-4o-mini".to_string(),
            temperature: 0.0,
            seed: 1,
            max_retries: 3,
            timeout: Duration::from_secs(120),
            jobs: 4,
            cache_dir: None,
            api_key_env: "OPENAI_API_KEY".to_string(),
        }
    }
}

impl RunConfig {
    /// Reference runs fix temperature 0 and seed 1; anything else is an
    /// exploratory setting worth calling out in reports.
    pub fn is_reference_setting(&self) -> bool {
        self.temperature == 0.0 && self.seed == 1
    }

    /// Full URL of the chat-completions route for this endpoint.
    pub fn completions_url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else if base.ends_with("/v1") {
            format!("{base}/chat/completions")
        } else {
            format!("{base}/v1/chat/completions")
        }
    }
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("endpoint returned {code}: {body}")]
    Status { code: u16, body: String },
    #[error("malformed completion response: {0}")]
    BadResponse(String),
    #[error("cache i/o: {0}")]
    Cache(#[from] std::io::Error),
    #[error("could not build http client: {0}")]
    Client(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryOutcome {
    pub text: String,
    pub retries: u32,
    pub latency_ms: u64,
    pub cache_hit: bool,
}

/// Identity of a request for cache addressing.
#[derive(Serialize)]
struct CacheKey<'a> {
    model: &'a str,
    seed: u64,
    temperature: f64,
    system: &'a str,
    user: &'a str,
}

/// What the cache stores: the key material again (for inspection) plus the
/// response and the cost of the original fetch.
#[derive(Serialize, Deserialize)]
struct CacheEntry {
    model: String,
    seed: u64,
    temperature: f64,
    system: String,
    user: String,
    response: String,
    latency_ms: u64,
    retries: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

const RETRY_DELAY: Duration = Duration::from_millis(50);

enum Attempt {
    Ok(String),
    Transport(String),
    ServerError { code: u16, body: String },
    TimedOut,
    Fatal(QueryError),
}

pub struct LlmClient {
    config: RunConfig,
    http: reqwest::blocking::Client,
}

impl LlmClient {
    pub fn new(config: RunConfig) -> Result<LlmClient, QueryError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| QueryError::Client(e.to_string()))?;
        Ok(LlmClient { config, http })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    fn cache_path(&self, prompt: &PromptPair) -> Option<PathBuf> {
        let dir = self.config.cache_dir.as_ref()?;
        let key = serde_json::to_vec(&CacheKey {
            model: &self.config.model,
            seed: self.config.seed,
            temperature: self.config.temperature,
            system: &prompt.system,
            user: &prompt.user,
        })
        .expect("cache key serializes");
        let digest = hex::encode(Sha256::digest(&key));
        Some(dir.join(format!("{digest}.json")))
    }

    fn send(&self, prompt: &PromptPair) -> Attempt {
        let body = serde_json::json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "seed": self.config.seed,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
        });
        let mut request = self.http.post(self.config.completions_url()).json(&body);
        if let Ok(key) = std::env::var(&self.config.api_key_env) {
            if !key.is_empty() {
                request = request.bearer_auth(key);
            }
        }
        let response = match request.send() {
            Ok(response) => response,
            Err(e) if e.is_timeout() => return Attempt::TimedOut,
            Err(e) => return Attempt::Transport(e.to_string()),
        };
        let status = response.status();
        let text = match response.text() {
            Ok(text) => text,
            Err(e) => return Attempt::Transport(e.to_string()),
        };
        if status.is_server_error() {
            return Attempt::ServerError {
                code: status.as_u16(),
                body: text,
            };
        }
        if !status.is_success() {
            return Attempt::Fatal(QueryError::Status {
                code: status.as_u16(),
                body: text,
            });
        }
        match serde_json::from_str::<ChatResponse>(&text) {
            Ok(parsed) => match parsed.choices.into_iter().next() {
                Some(choice) => Attempt::Ok(choice.message.content),
                None => Attempt::Fatal(QueryError::BadResponse("no choices".to_string())),
            },
            Err(e) => Attempt::Fatal(QueryError::BadResponse(e.to_string())),
        }
    }

    /// One cached chat-completion call: cache lookup, then the network with
    /// bounded retries on transport errors, timeouts, and 5xx responses.
    pub fn query(&self, prompt: &PromptPair) -> Result<QueryOutcome, QueryError> {
        let cache_path = self.cache_path(prompt);
        if let Some(path) = &cache_path {
            if let Some(entry) = read_cache(path) {
                return Ok(QueryOutcome {
                    text: entry.response,
                    retries: entry.retries,
                    latency_ms: entry.latency_ms,
                    cache_hit: true,
                });
            }
        }

        let started = Instant::now();
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            let failure = match self.send(prompt) {
                Attempt::Ok(text) => {
                    let outcome = QueryOutcome {
                        retries: attempts - 1,
                        latency_ms: started.elapsed().as_millis() as u64,
                        cache_hit: false,
                        text,
                    };
                    if let Some(path) = &cache_path {
                        write_cache(path, &self.config, prompt, &outcome)?;
                    }
                    return Ok(outcome);
                }
                Attempt::Fatal(error) => return Err(error),
                other => other,
            };
            if attempts > self.config.max_retries {
                return Err(match failure {
                    Attempt::TimedOut => QueryError::Timeout { attempts },
                    Attempt::Transport(message) => QueryError::Transport { attempts, message },
                    Attempt::ServerError { code, body } => QueryError::Status { code, body },
                    _ => unreachable!("ok and fatal returned above"),
                });
            }
            std::thread::sleep(RETRY_DELAY * attempts);
        }
    }
}

fn read_cache(path: &Path) -> Option<CacheEntry> {
    let text = fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn write_cache(
    path: &Path,
    config: &RunConfig,
    prompt: &PromptPair,
    outcome: &QueryOutcome,
) -> Result<(), QueryError> {
    let entry = CacheEntry {
        model: config.model.clone(),
        seed: config.seed,
        temperature: config.temperature,
        system: prompt.system.clone(),
        user: prompt.user.clone(),
        response: outcome.text.clone(),
        latency_ms: outcome.latency_ms,
        retries: outcome.retries,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let temp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&temp, serde_json::to_vec_pretty(&entry).expect("entry serializes"))?;
    fs::rename(&temp, path)?;
    Ok(())
}
