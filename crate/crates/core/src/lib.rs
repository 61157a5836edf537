//! Unsupervised concept-drift detection for multi-label data streams.
//!
//! The [`ld3`] detector watches the labels a multi-label classifier predicts.
//! It ranks labels by how often they co-occur in a recent window and in the
//! window before it, and compares the two rankings. A sharp drop in their
//! similarity means the label dependencies changed, so it signals drift.
//!
//! The crate also provides what is needed to evaluate it on streams: a
//! Gaussian naive Bayes [`classifier`] chain, the supervised [`baselines`]
//! DDM and EDDM, synthetic drift [`streams`], and the prequential [`eval`]
//! harness with multi-label metrics and rank statistics.

pub mod baselines;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod eval;
pub mod labels;
pub mod ld3;
pub mod rankfusion;
pub mod streams;

pub use baselines::{exact_match, Ddm, Eddm, ErrorSignal, Phase};
pub use classifier::ClassifierChain;
pub use error::{Error, Result};
pub use eval::{prequential_run, DetectorConfig, MetricReport, RankTable};
pub use labels::LabelVector;
pub use ld3::{sigma_rule, DriftSignal, Ld3, Ld3Config};
pub use rankfusion::{
    cooccurrence, local_rankings, ws_coefficient, CooccurrenceMatrix, FusionMethod, GlobalRanking,
    LocalRankings,
};
pub use streams::{DriftKind, DriftStreamSpec, Instance};
