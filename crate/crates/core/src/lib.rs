//! Matrix product states on spin-1/2 ladders.
//!
//! A translationally invariant state on a periodic two-leg ladder is encoded
//! by four 2x2 rung matrices `A00, A01, A10, A11`. The library constructs the
//! symmetry-constrained families of such states (SO(2) rotation about z plus
//! the discrete spin-flip / leg-exchange / parity symmetries, and the fully
//! rotation-invariant one-parameter family), evaluates their correlation
//! functions and entanglement measures both in closed form and through the
//! transfer operator, builds the frustration-free parent Hamiltonian from the
//! two-rung null space, and cross-checks everything against a brute-force
//! dense-state oracle.

pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod numerics;
pub mod observables;
pub mod oracle;
pub mod transfer;

pub use error::{Error, Result};
pub use hamiltonian::{
    constraint_matrix, coupling_formulas, embed_global, local_h, multiplet_basis, pauli_expand,
    CouplingSet, Irrep, LocalHamiltonian, MultipletBasis, MultipletLabel, PauliExpansion,
    WeightSet,
};
pub use model::{Family, LadderMps, ModelSpec, Sign, SymmetryKind, SymmetryWitness};
pub use numerics::{eigen_decompose, kron, null_space, partial_trace, CMat, CVec, Spectrum};
pub use observables::{
    class_report, concurrence, concurrence_closed_form, correlation_report, distance_correlator,
    entanglement_report, entropy, format_float, intra_rung, rung_density, wootters, Axis,
    ClassPoint, ClassReport, ConcurrenceMethod, CorrelationReport, DensityMode,
    EntanglementReport, IntraRung, RungDensity,
};
pub use oracle::{
    build_state, expectation, expectation_pair, g_zero_norm_sq, g_zero_state, ghz_overlap,
    ghz_state, hamiltonian_residual, reduced, DenseState,
};
pub use transfer::{
    amplitude, correlation_length, one_point, one_point_thermo, operator_transfer, partition_norm,
    rung_operator, transfer_matrix, two_point, CorrelationLength, Mode, RungOperator,
    RungOperatorKind, TransferOperator,
};
