//! Evaluates chat-completion models on import-inference: builds the fixed
//! prompt around a stripped snippet, queries an OpenAI-compatible endpoint
//! with caching and retries, and parses responses back into import sets.

pub mod client;
pub mod eval;
pub mod prompt;
pub mod stub;

pub use client::{LlmClient, QueryError, QueryOutcome, RunConfig};
pub use eval::{load_results, run_eval, save_results, InferenceResult};
pub use prompt::{build_prompt, PromptPair, SYSTEM_PROMPT, USER_TEMPLATE};
