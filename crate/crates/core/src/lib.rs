//! Statistical pipeline for distribution-feeder loads.
//!
//! - [`tailmodel`]: generalized Pareto load-size model, maximum-likelihood fit
//!   and empirical tail diagnostics.
//! - [`feeder`]: feeder trees and grouping of loads by protective device.
//! - [`forecaster`]: day-ahead forecaster built from a scalar ARX model of the
//!   daily total and a vector ARX model of the normalized daily shape.
//! - [`scaling`]: CV error metric, aggregation-error curves and the
//!   `sqrt(beta0 / W^p + beta1)` scaling law.
//! - [`residuals`]: autocorrelation, correlation energy and Shapiro-Wilk.
//! - [`synth`]: seeded synthetic customer populations.
//! - [`io`]: CSV and JSON file formats.

pub mod error;
pub mod feeder;
pub mod forecaster;
pub mod io;
pub mod linalg;
pub mod residuals;
pub mod rng;
pub mod scaling;
pub mod stats;
pub mod synth;
pub mod tailmodel;

pub use error::{Error, Result};
