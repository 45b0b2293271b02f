//! Finite-dimensional operator algebras, modular theory, noncommutative
//! Bayesian updating, flat-spacetime wedge geometry, and Gaussian harmonic
//! chains — a desk-scale numerical workbench for operator-algebraic
//! inference experiments.

pub mod algebra;
pub mod bayes;
pub mod cmat;
pub mod gaussian;
pub mod modular;
pub mod spacetime;

pub use algebra::{
    commutant, embed_classical, generate_algebra, tracial_state, AlgState, AlgebraBasis,
    AlgebraError, FiniteProbabilitySpace,
};
pub use bayes::{
    classical_equivalence_check, classical_posterior, gibbs_density, modified_bayes_demo,
    nc_bayes_update, nc_prior, BayesError, InferenceProblem, InferenceResult, PriorPolicy, TfdDemo,
};
pub use cmat::{CMat, RMat as CmatReal, C64};
pub use gaussian::{
    boost_comparison, entanglement_hamiltonian, gibbs_covariance, ground_state, symplectic_form,
    tfd, williamson, BoostComparison, EntanglementHamiltonian, GaussianError, GaussianState,
    HarmonicChain, Williamson,
};
pub use modular::{
    conditional_expectation, kms_residual, modular_flow, modular_hamiltonian, takesaki_check,
    CeDiagnostics, CondExpectation, ModularError, ModularFlow,
};
pub use spacetime::{
    boost_flow, ds_tangency_residual, induced_metric, isometry_algebra_dim, killing_residual,
    sample_hyperboloid, timelike_character, wedge_classify, AffineKillingField, Causality,
    DeSitterPoint, FlatSpace, SpacetimeError, WedgeLabel,
};
