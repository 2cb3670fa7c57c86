//! Geometry of generalized depolarizing channels: operator bases, Choi
//! matrices, analytic and numeric complete-positivity certification, and
//! Monte Carlo exploration of the CP region.

pub mod basis;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod linalg;

pub use basis::{
    basis_from_json, basis_to_json, change_of_basis_matrix, conjugate_pair_structure,
    custom_basis, gellmann_basis, hw_basis, pauli_basis, validate_basis, BasisKind, BasisRef,
    OperatorBasis, PairStructure, ValidationReport,
};
pub use channel::{
    apply_depolarizing, apply_translation_channel, channel_from_json, channel_to_json,
    choi_from_map, choi_of_conjugation, choi_of_depolarizing, choi_of_translation_channel,
    density_from_polarization, extract_compression_vector, polarization_from_density,
    ChoiMatrix, CompressionVector, PolarizationVector, TranslationVector,
};
pub use error::{Error, Result};
pub use geometry::{
    certify_cp, certify_cp_cross_validated, certify_cp_numeric, certify_cp_translation,
    extremal_vertices, gellmann_k_block, gellmann_pm_lambdas, hw_lambdas, pauli_lambdas,
    random_compression_vector, sample_region, sample_rng, sign_criterion, simplex_condition,
    unitary_basis_lambdas, CpReport, ExtremalSet, Method, SampleOutcome, SampleSummary,
    SimplexReport, Verdict, DEFAULT_TOL, TAU_SIGN,
};
pub use linalg::{
    charpoly_coeffs, elementary_symmetric, hermitian_eigensystem, kron, permute_conjugate,
    ComplexMatrix, Spectrum, C64, TAU_EIG, TAU_EQ, TAU_JACOBI,
};
