//! Asymptotic decay exponents of approximation, Gelfand, and Kolmogorov
//! numbers for compact embeddings of polynomially weighted Besov and
//! Triebel-Lizorkin spaces, together with desk-scale numerical machinery:
//! finite-dimensional width formulas and envelopes, subspace-search oracles,
//! a weighted sequence-space block model, and log-log rate verification of
//! the predicted exponents.
//!
//! Two-sided estimates whose absolute constants are undetermined are always
//! evaluated with those constants set to `1` and flagged; consumers compare
//! rates, never absolute levels, of flagged values.

pub mod assemble;
pub mod classify;
pub mod error;
pub mod exponent;
pub mod finite;
pub mod model;
pub mod params;
pub mod rate;
pub mod subspace;

pub use assemble::{
    assemble_sweep, assemble_upper_bound, block_operators, block_table, default_rho,
    dp_optimal_assembly, ideal_norm, Assembly, BlockOperator, BlockTable, IdealNormEstimate,
};
pub use classify::{
    approximation_exponent, classify, compare_widths, gelfand_exponent, kolmogorov_exponent,
    CaseLabel, CaseTable, Classification, Clause, Equivalence, EquivalencePair, FamilyOutcome,
    NotCoveredReason, OmittedEquivalence, WidthEquivalences, WidthKind,
};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use finite::{
    approximation_envelope, diagonal_spectral_oracle, dual_transfer, exact_width_nonincreasing,
    gelfand_envelope, kolmogorov_envelope, reduce_quasi_banach, DiagonalOperator, FiniteEmbedding,
    Method, WidthResult, WidthValue, DEFAULT_LAMBDA,
};
pub use model::{
    build_blocks, split_pq, Block, WeightedSequenceModel, MAX_LEVEL,
};
pub use params::{
    check_compact, derive_quantities, DerivedQuantities, EmbeddingParams, SpaceKind, BOUNDARY_TOL,
};
pub use rate::{
    fit_loglog, geometric_grid, verify_exponent, verify_exponent_with, RateFit, RateSample,
    VerifyConfig,
};
pub use subspace::{
    oracle_sweep, subspace_search_oracle, subspace_search_oracle_with, OracleConfig,
    DEFAULT_ORACLE_BUDGET, MAX_ORACLE_DIM,
};
