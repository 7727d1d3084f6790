//! Changepoint detection for univariate climate-style series.
//!
//! The crate covers the full workflow: seasonal diagnostics
//! ([`series`], [`normality`]), autoregressive pre-whitening ([`ar`]),
//! at-most-one-changepoint tests with Monte Carlo null tables ([`amoc`]),
//! multiple-changepoint search by binary segmentation and penalized
//! likelihood ([`mcpt`]), and dataset ingestion/simulation ([`datasets`]).

pub mod amoc;
pub mod ar;
pub mod datasets;
pub mod error;
pub mod format;
pub mod mcpt;
pub mod normality;
pub(crate) mod optim;
pub mod series;

pub use error::{Error, Result};
