//! Multiple-changepoint search: penalized Gaussian likelihood with AIC, BIC,
//! mBIC or MDL penalties minimized by a genetic algorithm (or exhaustively on
//! small problems), binary segmentation, and a distance between
//! configurations for scoring estimates against a known truth.

pub mod binseg;
pub mod config;
pub mod exhaustive;
pub mod ga;
pub mod likelihood;
pub mod penalty;
pub mod report;
pub mod simulation;

pub use binseg::{binary_segmentation, binary_segmentation_config};
pub use config::{config_distance, ChangepointConfig, ConfigDistance, MIN_SEG};
pub use exhaustive::exhaustive_search;
pub use ga::{ga_search, ga_search_with, Evaluator, GaParams};
pub use likelihood::{gaussian_loglik, MeanShiftModel, PenalizedFit};
pub use penalty::{penalty, PenaltyKind};
pub use report::{SearchMethod, SearchResult, SearchSummary};
pub use simulation::{simulation_study, Estimate, MethodSummary, Replicate, StudyMethod, StudyOptions, StudyResult};
