//! Observability analysis for finite-dimensional quantum control systems.
//!
//! A system is a set of Hamiltonians (stored as skew-Hermitian generators
//! `iH_j`) and a measured observable `S`. The crate computes the dynamical
//! Lie algebra, the observability spaces obtained with one or several
//! measurements, indistinguishability verdicts for state pairs, simulates
//! measurement experiments, and reconstructs initial states from simulated
//! outputs.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`). The aliases at the crate root fix `f64`.
//!
//! ```
//! use qobserve::{analyze, presets, Tolerance};
//!
//! let tol = Tolerance::default();
//! let sys = presets::ising_pair::<f64>(&tol).unwrap();
//! let report = analyze(&sys, 3, &tol).unwrap();
//! assert!(!report.observable_overall);
//! ```

pub mod error;
pub mod expm;
pub mod gellmann;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod measurement;
pub mod observability;
pub mod presets;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod subspace;
pub mod system;
pub mod tolerance;
pub mod tomography;

pub use error::{Error, Result};
pub use expm::expm;
pub use lie::{
    commutator_dimension, commutator_dimension_direct, dynamical_algebra, generalized_observability_space,
    observability_sequence, observability_space, stabilize, BackAction, ObservabilitySequence,
};
pub use matrix::{commutator, half_paulis, hs_inner, trace_product, traceless_shift, ComplexMatrix};
pub use measurement::{
    evolve, kraus_apply, kraus_dual, project, pullback_observable, run_experiment, Action, Convention,
    DensityState, ExperimentScript, KrausChannel, KrausOutcome, MeasurementRecord, ScriptBackAction, Segment,
};
pub use observability::{
    analyze, analyze_with, decompose_for_system, decompose_state, first_order_condition, indistinguishable,
    indistinguishable_with, orbit_sample, sample_propagators, FirstOrderCondition, ObservabilityReport,
    StateDecomposition, Verdict,
};
pub use scalar::{cplx, Real};
pub use spectral::{spectral, SpectralDecomposition};
pub use subspace::{orthonormal_extend, OperatorSubspace};
pub use system::ControlSystem;
pub use tolerance::Tolerance;
pub use tomography::{
    ancilla_tomography, design_permutation_experiment, run_permutation_tomography, verify_rank_lemma,
    AncillaReconstruction, OutputNoise, PermutationDesign, RankLemma, ReconstructionResult,
};

/// Double-precision matrix.
pub type Matrix = ComplexMatrix<f64>;
pub type Subspace = OperatorSubspace<f64>;
pub type System = ControlSystem<f64>;
pub type State = DensityState<f64>;
pub type Channel = KrausChannel<f64>;
pub type Script = ExperimentScript<f64>;
pub type Spectrum = SpectralDecomposition<f64>;
pub type Tol = Tolerance<f64>;

/// Single-precision matrix.
pub type Matrix32 = ComplexMatrix<f32>;
pub type System32 = ControlSystem<f32>;
pub type Tol32 = Tolerance<f32>;
