//! Exact diagonalization of the even-odd nearest-neighbour chain Floquet
//! operator: frozen-eigenstate census, half-chain entanglement entropy,
//! level-spacing-ratio statistics, and fragmentation reports.

mod basis;
mod floquet;
mod report;
mod spectrum;
mod stats;

pub use basis::SectorBasis;
pub use floquet::{floquet_operator, step_hamiltonian, FloquetOperator, StepParity};
pub use report::{fragmentation_report, write_eigenstate_csv, write_ratio_csv, FragmentationReport};
pub use spectrum::{frozen_census, quasispectrum, QuasiSpectrum, FROZEN_TOL};
pub use stats::{reference_r_distribution, spacing_ratios, Ensemble, RDistribution, SpacingStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EdError {
    #[error("sector dimension {dim} exceeds the guard of {max}")]
    SectorTooLarge { dim: u128, max: u128 },
    #[error("diagonalization failed for {context}: {message}")]
    DiagonalizationFailure { context: String, message: String },
    #[error("need at least {need} unmasked levels, got {got}")]
    TooFewLevels { need: usize, got: usize },
}
