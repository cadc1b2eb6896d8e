//! Home-advantage analytics for league football.
//!
//! The crate measures how much hosting is worth — as a win-rate difference
//! and as a share of points — stratifies matches by relative team quality,
//! builds travel/crowd/card covariates, and fits binary logistic regressions
//! by maximum likelihood to explain home wins. A seeded synthetic-season
//! generator with known ground truth validates the whole estimation path.
//!
//! Modules, bottom up:
//!
//! - [`domain`]: match/team/stadium vocabulary, outcomes, points, venue class
//! - [`geo`]: great-circle distances
//! - [`ingest`]: CSV loading, validation, neutral-venue exclusion
//! - [`metrics`]: the two home-advantage indices, quality, RTQ, rankings
//! - [`features`]: observations, covariates, coach encoding, design matrix
//! - [`glm`]: IRLS logistic regression, Wald inference, pseudo-R²
//! - [`pipeline`]: the four stratified fits and report rendering
//! - [`synth`]: synthetic seasons and estimator-recovery experiments

pub mod domain;
pub mod error;
pub mod features;
pub mod geo;
pub mod glm;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod synth;

pub use domain::{
    Date, Match, MatchOutcome, Side, Stadium, StadiumId, TeamId, TeamRef, VenueClass,
};
pub use error::{DataError, Error, FitError};
pub use features::{DesignMatrix, Observation};
pub use glm::{FitOptions, FitResult};
pub use ingest::{Dataset, Gazetteer, IngestReport};
pub use metrics::{HomeAwayRecord, QualityTable, Rtq, RtqBand, RtqBounds};
pub use pipeline::{AnalysisReport, OutputFormat, Stratum, StudyConfig, StudyReport};
pub use synth::{RecoverySummary, SimParams};
