//! Positive-unlabeled / one-class classification toolkit.
//!
//! Trains a small scoring network from positive and unlabeled data with a
//! family of risk estimators, evaluates hard decisions, and verifies the
//! absolute-value negative-risk estimator's concentration behaviour by
//! Monte Carlo.
//!
//! - [`data`]: synthetic Gaussian-mixture datasets, CSV I/O, P/U sampling
//! - [`model`]: dense scorer with exact reverse-mode gradients
//! - [`risk`]: losses, risk estimators, calibration transforms
//! - [`train`]: full-batch SGD with warm-up and risk-curve logging
//! - [`metrics`]: precision / recall / F1 / AUC
//! - [`theory`]: Monte-Carlo checks of the bias and deviation bounds
//! - [`presets`]: canned synthetic tasks

pub mod data;
pub mod error;
pub mod metrics;
pub mod model;
pub mod presets;
pub mod risk;
pub mod rng;
pub mod theory;
pub mod train;

pub use error::{Error, Result};
