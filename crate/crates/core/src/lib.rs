//! Source-code watermarking through semantics-preserving transformations.
//!
//! Embedding rewrites a snippet with one transformation rule per watermark
//! bit; extraction retrieves the original from a candidate codebase and
//! replays the rules to see which of them the suspect code reflects.

pub mod attacks;
pub mod config;
pub mod corpus;
pub mod embedder;
pub mod error;
pub mod evaluator;
pub mod extractor;
pub mod features;
pub mod harness;
pub mod lexer;
pub mod llm;
pub mod par;
pub mod rules;

pub use corpus::{CandidateCodebase, CodeSnippet, Language, WatermarkRecord};
pub use embedder::{embed, plan, EmbeddingOutcome, EmbeddingPlan, WatermarkBits};
pub use error::{Error, Result};
pub use extractor::{extract, retrieve, DecodingPolicy, ExtractionResult, RetrievalResult};
pub use features::{Similarities, SimilarityWeights};
pub use llm::Backend;
pub use par::Exec;
pub use rules::{RuleCategory, TransformationRule};
