//! The one prompt every model sees. The wording is part of the experimental
//! setup, so it is pinned here as constants and must not drift.

use serde::{Deserialize, Serialize};

pub const SYSTEM_PROMPT: &str = "You are a helpful programming assistant.";

/// Instruction text placed directly above the snippet.
pub const USER_TEMPLATE: &str = "Add import statements to the following Java code. \
Do not use wildcard imports. Include only the necessary import statements. \
Do not import nonexistent types. Please note that you need to pay close attention \
and your response should be specific and accurate. Avoid repetition. \
Reply with the import statements only.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    pub system: String,
    pub user: String,
}

/// Wrap an import-stripped snippet in the fixed instruction text. The
/// snippet is substituted literally, braces and all.
pub fn build_prompt(stripped_source: &str) -> PromptPair {
    if stripped_source.trim().is_empty() {
        log::warn!("building a prompt around an empty snippet");
    }
    PromptPair {
        system: SYSTEM_PROMPT.to_string(),
        user: format!("{USER_TEMPLATE}\n{stripped_source}"),
    }
}
