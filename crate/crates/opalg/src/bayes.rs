//! Inference recipes on operator algebras: classical conditioning on finite
//! spaces, the noncommutative update `posterior(a) = omega_accessible(E(a))`
//! with a tracial or supplied prior, feasibility diagnosis through the
//! modular constraint, and a thermofield-double demonstration in which the
//! prior is the restriction of a global pure state to one tensor factor.

use thiserror::Error;

use crate::algebra::{
    embed_classical, generate_algebra, tracial_state, AlgState, AlgebraBasis, AlgebraError,
    FiniteProbabilitySpace,
};
use crate::cmat::{c, herm_func, identity, matrix_unit, orthonormalize, CMat, C64, RANK_DROP_TOL};
use crate::modular::{
    conditional_expectation, kms_residual, takesaki_check, CeDiagnostics, CondExpectation,
    ModularError,
};

#[derive(Debug, Error)]
pub enum BayesError {
    #[error("conditioning event has zero mass")]
    ZeroConditioningEvent,
    #[error("prior state is not faithful (min eigenvalue {min_eig:.3e})")]
    NonFaithfulPrior { min_eig: f64 },
    #[error("accessible algebra is not contained in the total algebra (residual {residual:.3e})")]
    AccessibleNotContained { residual: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("thermofield-double demo requires levels >= 2 and beta > 0 (got levels={levels}, beta={beta})")]
    BadDemoParameters { levels: usize, beta: f64 },
}

/// How the a-priori state is chosen before the update.
#[derive(Debug, Clone)]
pub enum PriorPolicy {
    /// The unbiased choice: `rho = I/n`.
    Tracial,
    /// A caller-supplied faithful density matrix on the total algebra.
    Supplied(CMat),
}

/// A statistician's situation: a total algebra, the accessible subalgebra,
/// and the true state seen only through its restriction.
#[derive(Debug, Clone)]
pub struct InferenceProblem {
    pub total: AlgebraBasis,
    pub accessible: AlgebraBasis,
    pub true_density: CMat,
    pub prior_policy: PriorPolicy,
}

/// Outcome of one noncommutative update. When the modular constraint fails
/// the update is reported infeasible rather than raised as an error.
#[derive(Debug, Clone)]
pub struct InferenceResult {
    pub prior: AlgState,
    /// Posterior functional evaluated on the total algebra basis; empty when
    /// infeasible.
    pub posterior_on_basis: Vec<C64>,
    pub feasible: bool,
    pub takesaki_residual: f64,
    pub ce_diagnostics: Option<CeDiagnostics>,
    pub conditioning_warning: bool,
    ce: Option<CondExpectation>,
    true_density: CMat,
}

impl InferenceResult {
    /// Posterior value on an arbitrary element of the total span;
    /// `None` while infeasible.
    pub fn posterior(&self, m: &CMat) -> Option<C64> {
        let ce = self.ce.as_ref()?;
        Some((&self.true_density * ce.apply(m)).trace())
    }

    pub fn cond_expectation(&self) -> Option<&CondExpectation> {
        self.ce.as_ref()
    }
}

/// Classical Bayes with the unbiased (uniform) prior conditioned on `B`:
/// returns `|A n B| / |B|`.
pub fn classical_posterior(
    space: &FiniteProbabilitySpace,
    event_b: &[usize],
    event_a: &[usize],
) -> Result<f64, BayesError> {
    let m = space.outcomes();
    for &i in event_a.iter().chain(event_b) {
        if i >= m {
            return Err(AlgebraError::EventOutOfRange { idx: i, outcomes: m }.into());
        }
    }
    if event_b.is_empty() {
        return Err(BayesError::ZeroConditioningEvent);
    }
    let b: std::collections::BTreeSet<usize> = event_b.iter().cloned().collect();
    let inter = event_a.iter().filter(|i| b.contains(i)).count();
    Ok(inter as f64 / b.len() as f64)
}

/// The unbiased noncommutative prior: the tracial state. (On infinite
/// algebras no tracial state exists and the recipe is undefined; everything
/// here is finite-dimensional.)
pub fn nc_prior(alg: &AlgebraBasis) -> AlgState {
    tracial_state(alg)
}

/// One noncommutative Bayes update: choose the prior, gate on the modular
/// constraint, then evaluate `omega_accessible . E` on the total basis.
pub fn nc_bayes_update(problem: &InferenceProblem, tol: f64) -> Result<InferenceResult, BayesError> {
    let containment = problem
        .accessible
        .basis()
        .iter()
        .map(|b| problem.total.span_residual(b))
        .fold(0.0, f64::max);
    if containment > tol {
        return Err(BayesError::AccessibleNotContained {
            residual: containment,
        });
    }

    let prior_density = match &problem.prior_policy {
        PriorPolicy::Tracial => {
            identity(problem.total.ambient_dim()) / c(problem.total.ambient_dim() as f64, 0.0)
        }
        PriorPolicy::Supplied(rho) => rho.clone(),
    };
    let prior = AlgState::new(problem.total.clone(), prior_density)?;
    if !prior.is_faithful() {
        return Err(BayesError::NonFaithfulPrior {
            min_eig: prior.min_eigenvalue(),
        });
    }
    let conditioning_warning = prior.conditioning_warning();

    let takesaki_residual = takesaki_check(&prior, &problem.accessible)?;
    if takesaki_residual > tol {
        return Ok(InferenceResult {
            prior,
            posterior_on_basis: Vec::new(),
            feasible: false,
            takesaki_residual,
            ce_diagnostics: None,
            conditioning_warning,
            ce: None,
            true_density: problem.true_density.clone(),
        });
    }

    let ce = conditional_expectation(&prior, &problem.accessible, tol)?;
    let diagnostics = ce.diagnostics(&prior, 100, 7);
    let posterior_on_basis = problem
        .total
        .basis()
        .iter()
        .map(|a| (&problem.true_density * ce.apply(a)).trace())
        .collect();

    Ok(InferenceResult {
        prior,
        posterior_on_basis,
        feasible: true,
        takesaki_residual,
        ce_diagnostics: Some(diagnostics),
        conditioning_warning,
        ce: Some(ce),
        true_density: problem.true_density.clone(),
    })
}

/// Runs the classical and noncommutative recipes on the same finite space and
/// returns how far apart they land.
///
/// The noncommutative side embeds the space diagonally, takes the accessible
/// algebra generated by the indicator of `B`, updates with the tracial prior,
/// and rescales `posterior(P_{A n B}) / posterior(P_B)`; that quotient equals
/// the classical `|A n B| / |B|` exactly in the diagonal case.
pub fn classical_equivalence_check(
    space: &FiniteProbabilitySpace,
    event_b: &[usize],
    event_a: &[usize],
    tol: f64,
) -> Result<f64, BayesError> {
    let classical = classical_posterior(space, event_b, event_a)?;

    let (total, true_state) = embed_classical(space);
    let p_b = space.event_projection(event_b)?;
    let accessible = generate_algebra(space.outcomes(), &[p_b.clone()])?;
    let problem = InferenceProblem {
        total,
        accessible,
        true_density: true_state.density.clone(),
        prior_policy: PriorPolicy::Tracial,
    };
    let result = nc_bayes_update(&problem, tol)?;

    let b_set: std::collections::BTreeSet<usize> = event_b.iter().cloned().collect();
    let inter: Vec<usize> = event_a
        .iter()
        .filter(|i| b_set.contains(i))
        .cloned()
        .collect();
    let p_ab = space.event_projection(&inter)?;
    let post_ab = result.posterior(&p_ab).expect("feasible by tracial prior");
    let post_b = result.posterior(&p_b).expect("feasible by tracial prior");
    if post_b.norm() <= tol {
        return Err(BayesError::ZeroConditioningEvent);
    }
    Ok(((post_ab / post_b).re - classical).abs())
}

/// Gibbs density `exp(-beta h)/Z` for a Hermitian `h`.
pub fn gibbs_density(h: &CMat, beta: f64) -> CMat {
    let e = herm_func(h, |x| c((-beta * x).exp(), 0.0));
    let z = e.trace().re;
    e / c(z, 0.0)
}

/// Everything the thermofield-double demonstration produces.
#[derive(Debug)]
pub struct TfdDemo {
    pub levels: usize,
    pub beta: f64,
    /// Equally-spaced surrogate for the wedge boost generator, `diag(0..d-1)`.
    pub boost_hamiltonian: CMat,
    /// Restriction of the global pure state to the first factor: the Gibbs
    /// state of the boost surrogate at `beta`.
    pub reduced: AlgState,
    /// KMS residual of the reduced state against the boost surrogate at
    /// `beta`; zero by construction of the purification.
    pub kms_residual: f64,
    pub result: InferenceResult,
}

/// Modified-recipe demonstration: the total algebra is `M_d (x) M_d`, the
/// true state is the purification `|Omega> = sum_i sqrt(p_i) |ii>` of
/// `Gibbs(h_boost, beta)`, the accessible algebra is the first factor, and
/// the prior is the product of the two marginals (a vacuum-restriction
/// surrogate). The marginal is KMS at `beta` for the boost surrogate, the
/// modular flow of the prior preserves the factor, and the posterior comes
/// out of the conditional expectation onto it.
pub fn modified_bayes_demo(levels: usize, beta: f64, tol: f64) -> Result<TfdDemo, BayesError> {
    if levels < 2 || beta <= 0.0 {
        return Err(BayesError::BadDemoParameters { levels, beta });
    }
    let d = levels;
    let n = d * d;

    let boost = CMat::from_fn(d, d, |i, j| {
        if i == j {
            c(i as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let rho_red = gibbs_density(&boost, beta);

    // |Omega> = sum_i sqrt(p_i) |i> (x) |i>, p_i from the Gibbs weights.
    let mut omega_vec = nalgebra::DVector::<C64>::zeros(n);
    for i in 0..d {
        let p = rho_red[(i, i)].re;
        omega_vec[i * d + i] = c(p.sqrt(), 0.0);
    }
    let true_density = CMat::from_fn(n, n, |r, s| omega_vec[r] * omega_vec[s].conj());

    let total = AlgebraBasis::full(n);
    let eye_d = identity(d);
    let factor_basis: Vec<CMat> = (0..d)
        .flat_map(|j| (0..d).map(move |k| (j, k)))
        .map(|(j, k)| matrix_unit(d, j, k).kronecker(&eye_d))
        .collect();
    let accessible =
        AlgebraBasis::from_orthonormal(n, orthonormalize(factor_basis, RANK_DROP_TOL));

    let prior_density = rho_red.kronecker(&rho_red);
    let problem = InferenceProblem {
        total,
        accessible,
        true_density,
        prior_policy: PriorPolicy::Supplied(prior_density),
    };
    let result = nc_bayes_update(&problem, tol)?;

    let reduced = AlgState::new(AlgebraBasis::full(d), rho_red)?;
    let kms = kms_residual(&reduced, &boost, beta)?;

    Ok(TfdDemo {
        levels,
        beta,
        boost_hamiltonian: boost,
        reduced,
        kms_residual: kms,
        result,
    })
}
