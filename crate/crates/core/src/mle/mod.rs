//! Root maximum-likelihood estimation.
//!
//! [`engine`] holds the damped fixed-point loop shared by all estimators.
//! [`complementary`] builds the likelihood equation for coordinate/momentum
//! samples and for any other design of linear amplitude measurements; [`register`]
//! specializes it to a discrete register read out in two bases.

pub mod complementary;
pub mod criteria;
pub mod engine;
pub mod fisher;
pub mod gauge;
pub mod phase;
pub mod register;

pub use complementary::{build_r, loglik, solve_design, solve_mle, DesignModel, EstimateResult, RMatrix};
pub use criteria::{chisq_fidelity, chisq_fidelity_trace_form, homogeneity_test, homogeneity_trace_form};
pub use engine::{Init, SolverConfig};
pub use fisher::{covariance_matrix, fisher_and_covariance, FisherCovariance};
pub use gauge::gauge_fix;
pub use phase::{bin_on_grid, phase_retrieval, retrieve_from_samples, self_dual_grid, PhaseRetrieval};
pub use register::{dft_matrix, register_mle};
