//! Toolkit for imbalanced regression.
//!
//! The crate is organised around the relevance function `φ: Y → [0, 1]`,
//! which marks how important each target value is:
//!
//! * [`data`] holds the tabular dataset model, CSV ingestion, nominal
//!   encoding, cross-validation splits and seeded random streams.
//! * [`relevance`] fits `φ` from boxplot (or user supplied) control points
//!   with a monotone piecewise cubic Hermite interpolant and derives the
//!   bump partition used by the utility metrics.
//! * [`resampling`] implements SmoteR, random over/under-sampling,
//!   Gaussian noise, SMOGN and WERCS.
//! * [`metrics`] provides utility-based precision/recall/F1, the SER curve
//!   and SERA, plus MSE and MAE.
//! * [`harness`] runs nested cross-validation experiments with a built-in
//!   kNN regressor and aggregates win counts and average ranks.

pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod relevance;
pub mod resampling;

pub use error::{Error, Result};
