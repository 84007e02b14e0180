//! Core of an AI vulnerability database: records, severity scoring, weakness
//! and mitigation catalogs, AIBOM documents and the event-sourced registry.

pub mod aibom;
pub mod catalog;
pub mod ids;
pub mod num;
pub mod record;
pub mod reference;
pub mod registry;
pub mod seed;
pub mod severity;
#[cfg(feature = "testing")]
pub mod testing;
pub mod validation;

pub use num::ScoreFloat;

/// Scoring on `f64`, used by every stored score.
pub type StandardFormula = severity::Formula<f64>;
/// Scoring on `f32`, for callers trading precision for footprint.
pub type CompactFormula = severity::Formula<f32>;
