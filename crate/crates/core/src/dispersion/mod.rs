//! Dispersion of dilated lacunary blocks and the smoothed counting function.

mod bump;
mod counter;
mod survey;

pub use bump::{bump, Approx, Bump, XI_QUADRATURE_MAX};
pub use counter::{
    block_dispersion, block_points, shifted_offsets, smoothed_count, smoothed_from_offsets, support_witness, truncated_count, Scale, Smoothing, TruncationCheck,
};
pub use survey::{concentration_survey, moment_estimate, sample_betas, sample_bits_for, DispersionSurvey, MomentEstimate, SurveyRecord};

/// Dispersion of a point block; the same function as in [`crate::kronecker`].
pub use crate::kronecker::dispersion;
