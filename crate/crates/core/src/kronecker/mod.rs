//! Kronecker orbits, gap statistics and lacunary sequence sources.

mod block;
mod inhom;
mod search;
mod sequence;

pub use block::{dispersion, gap_report, orbit_block, three_distance_check, Gap, GapReport, PointBlock, ThreeDistanceReport};
pub use inhom::{build_inhom_sequence, verify_inhom_terms, InhomSequence, TermCertificate};
pub use search::first_in_window;
pub use sequence::{geometric_sequence, validate_lacunary, LacunarySequence, Provenance};
