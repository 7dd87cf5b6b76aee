//! Training-pair augmentation for disease-name normalization.
//!
//! The pipeline loads a coded vocabulary, a region tree, axis-word lexicons
//! and seed (unnormalized, standard) pairs; tags axis words; generates new
//! pairs by axis-word replacement and multi-granularity aggregation; filters
//! them by n-gram overlap and embedding similarity; and writes the result.
//! [`eval`] measures what the generated pairs do for a retrieval normalizer.

pub mod augment;
pub mod error;
pub mod eval;
pub mod filter;
pub mod pipeline;
pub mod store;
pub mod tagger;
pub mod text;

pub use error::{Error, Result};
pub use store::{NormPair, Provenance};
pub use text::TermText;
