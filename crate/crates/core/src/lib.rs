//! Certified experiments on lacunary diophantine approximation.
//!
//! The crate is organised bottom-up:
//!
//! * [`realnum`]: exactly described reals and certified interval evaluation of `‖nα − γ‖`.
//! * [`cf`]: continued fractions, continuants and the growth exponent `max log q_k / k`.
//! * [`kronecker`]: Kronecker orbits, gap statistics, and lacunary sequence sources,
//!   including the inhomogeneous sequence with `n_t‖n_tα − γ‖ ≤ 8`.
//! * [`counting`]: exhaustive counts for lacunary linear forms next to their explicit bounds.
//! * [`measures`]: Lebesgue, Cantor-type and atomic measures with Fourier coefficients.
//! * [`dispersion`]: dispersion of dilated lacunary blocks, the smoothed counter and
//!   its Fourier truncation, and Monte-Carlo surveys.
//! * [`experiments`]: hit counting, the end-to-end pipeline, configs and output files.
//!
//! Data-parallel loops go through [`exec::Execution`]; with the `parallel` feature
//! disabled every loop runs sequentially and produces identical results.

pub mod cf;
pub mod counting;
pub mod dispersion;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod kronecker;
pub mod measures;
pub mod realnum;

pub use error::{Error, Result};
pub use realnum::{CertifiedInterval, Quad, RealSpec};
