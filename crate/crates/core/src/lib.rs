//! Core library for evaluating how well type-inference techniques recover
//! fully-qualified type names for Java code snippets.
//!
//! The pieces fit together as a pipeline: [`snippet`] models corpora of
//! snippets with ground-truth imports, [`syntax`] parses a simplified Java
//! grammar into an AST and prints it back, [`transform`] applies
//! semantic-preserving rewrites used to probe memorization, [`kb`] loads API
//! knowledge bases, [`infer`] runs constraint-based type inference against a
//! knowledge base, [`generate`] synthesizes leakage-free benchmark corpora,
//! [`score`] computes precision/recall/F1 and significance statistics, and
//! [`leakage`] scans training-corpus file metadata for benchmark overlap.

pub mod fqn;
pub mod generate;
pub mod infer;
pub mod kb;
pub mod leakage;
pub mod score;
pub mod seed;
pub mod snippet;
pub mod syntax;
pub mod transform;
pub mod words;

pub use fqn::{Fqn, ImportSet};
pub use snippet::{Corpus, Snippet};
