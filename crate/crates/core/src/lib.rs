//! Solvable points, cellular-automaton dynamics, and fragmentation
//! diagnostics for sequentially activated Floquet lattice models.
//!
//! The crate is organized around the pipeline
//!
//! 1. [`dioph`] — exact integer solutions of the solvability conditions and
//!    the derived drive parameters `(V, tau)`;
//! 2. [`pairdyn`] — closed-form two-site unitaries at those parameters and
//!    the Frozen / Swap / Quantum classifier;
//! 3. [`lattice`] + [`ca`] — lattices, drive schedules, and deterministic
//!    evolution of Fock states with orbit / frozen / Krylov decomposition;
//! 4. [`ed`] — exact diagonalization of the even-odd chain Floquet operator
//!    with entanglement and level-statistics diagnostics.
//!
//! Units everywhere: `t_hop = 1`, `hbar = 1`.

// force the BLAS backend to link
use openblas_src as _;

pub mod ca;
pub mod dioph;
pub mod ed;
pub mod lattice;
pub mod pairdyn;
pub mod testutil;

pub use ca::{
    evolve_periods, krylov_decompose, make_rule_table, random_drive_evolve, CaError,
    EvolveOutcome, KrylovDecomposition, ModelKind, NonDeterministic, Orbit, OrbitClass, RuleTable,
};
pub use dioph::{
    dmax4_certificate, general_nn_solution, hubbard_params, hubbard_solution, nn_dmax3_solution,
    nn_params, nn_tower_extend, search_dmax4, solve_quadratic_diophantine, DiophError,
    DiophTriple, Direction, Dmax4Certificate, HubbardPoint, NNPoint, Parity, QuadForm3,
};
pub use ed::{
    floquet_operator, fragmentation_report, frozen_census, quasispectrum,
    reference_r_distribution, spacing_ratios, EdError, Ensemble, FloquetOperator,
    FragmentationReport, QuasiSpectrum, RDistribution, SectorBasis, SpacingStats, StepParity,
};
pub use lattice::{
    build_chain, build_lieb, build_square_rlbl, delta_of_pair, Boundary, DriveSchedule,
    FockState, Lattice, LatticeError, SpinfulFock,
};
pub use pairdyn::{
    classify_hubbard, classify_nn, generalized_freeze_check, hubbard_pair_unitary,
    nn_pair_unitary, ActionTag, DriveParams, EffectiveDelta, HubbardClass, Interaction,
    NeighborContext, PairAction,
};
