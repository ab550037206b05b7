//! Learning small, diverse sets of `features → labels` rules for
//! multi-label classification.
//!
//! Rules are picked greedily by their marginal gain in an objective that
//! rewards covering uncovered label occurrences accurately and penalizes
//! overlap between rules. Candidates come from two-stage samplers: a tail is
//! drawn proportionally to its uncovered area, then a head is drawn
//! proportionally to its discriminativity for that tail (exactly, through
//! coupling from the past) or built greedily.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod head_sampler;
pub mod label_space;
pub mod learner;
pub mod objective;
pub mod sets;
pub mod synth;
pub mod tail_sampler;

pub use error::{Error, Result};
