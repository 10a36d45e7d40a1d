//! Hit counting, the lacunary-to-multiplicative pipeline, and experiment configs.

mod config;
mod hits;
mod pipeline;

pub use config::{run, Artifact, Artifacts, Experiment, ExperimentConfig, SequenceSource, SPEC_VERSION};
pub use hits::{
    lacunary_hits, lacunary_lhs, lacunary_threshold, multiplicative_hits, multiplicative_threshold, product_lhs, threshold_interval, HitRecord, HitScan, Skip,
    TrendPoint, LACUNARY_START, MAX_SKIP_FRACTION, MULTIPLICATIVE_START,
};
pub use pipeline::{pipeline, verify_translated, BetaReport, PipelineReport, TranslatedHit};
