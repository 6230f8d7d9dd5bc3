//! Rotational-invariance bound on local realistic models of N-party
//! spin-½ correlations.
//!
//! A correlation function of the form E(α) = T·(n_1(α_1) ⊗ … ⊗ n_N(α_N)),
//! with each n_j in its party's x–y plane, has functional inner product
//! (E_LR, E) ≤ 4^N·T_max with every local realistic model E_LR, while
//! (E, E) = π^N Σ T². Whenever (E, E) exceeds the bound, no local realistic
//! model reproduces E.
//!
//! - [`state_kit`]: GHZ states, white-noise mixing, Pauli expectations.
//! - [`correlation`]: planar correlation tensors and E(α).
//! - [`tensor_analysis`]: T_max, Σ T², closed-form (E, E′).
//! - [`functional_space`]: ±1 response functions, projections, quadrature.
//! - [`lhv`]: strategies, ensembles, the bound and its saturation.
//! - [`criterion`]: the criterion, GHZ thresholds and visibility scans.

pub mod correlation;
pub mod criterion;
pub mod error;
pub mod functional_space;
pub mod lhv;
pub mod state_kit;
pub mod tensor_analysis;

pub use correlation::{correlation_value, ghz_planar_tensor, tensor_from_state, AngleSettings, CorrelationTensor};
pub use criterion::{ghz_scan, ghz_thresholds, ri_criterion, CriterionReport, GhzThresholds, Region, ScanPoint};
pub use error::{Error, Result};
pub use functional_space::{quadrature_inner_product, saturating_response, FourierProjection, ResponseFunction};
pub use lhv::{
    ensemble_inner_product, lr_inner_product, optimal_strategy, two_setting_model_exists, verify_bound,
    BoundReport, DeterministicStrategy, LhvEnsemble,
};
pub use state_kit::{build_ghz, mix_with_white_noise, pauli_expectation, DensityMatrix, PauliAxis, StateVector};
pub use tensor_analysis::{analytic_inner_product, sum_of_squares, t_max, TMaxConfig, TMaxResult};
