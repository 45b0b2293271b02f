//! Modular theory for faithful states on matrix algebras: the modular flow
//! `a -> rho^{it} a rho^{-it}`, its Hamiltonian `-log rho`, KMS residual
//! tests, the derivation form of the flow-invariance constraint on a
//! subalgebra, and state-preserving conditional expectations built as GNS
//! orthogonal projections.
//!
//! Sign conventions used throughout: `kms_residual(state, h, beta)` certifies
//! the KMS boundary condition for the flow `alpha_t(b) = e^{ith} b e^{-ith}`,
//! so Gibbs states `exp(-beta h)/Z` have residual zero. A faithful `rho` is
//! the Gibbs state of `h_mod = -log rho` at `beta = 1`, and the flow
//! generated by `h_mod` is the time-reversed modular flow.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AlgState, AlgebraBasis, DEFAULT_TOL, FAITHFULNESS_THRESHOLD};
use crate::cmat::{c, herm_eig, herm_func, herm_min_eig, hs_inner, hs_norm, random_cmat, CMat};

/// `|beta| * spectral_radius(h)` above this makes `exp(beta h)` meaningless
/// in double precision.
pub const EXP_SAFE_BOUND: f64 = 700.0;

#[derive(Debug, Error)]
pub enum ModularError {
    #[error("state is not faithful (min eigenvalue {min_eig:.3e}); modular theory undefined")]
    NonFaithfulState { min_eig: f64 },
    #[error("subalgebra basis element leaves the ambient span (residual {residual:.3e})")]
    NotASubalgebra { residual: f64 },
    #[error("modular constraint violated: flow does not preserve the subalgebra (residual {residual:.3e})")]
    ModularViolation { residual: f64 },
    #[error("conditional expectation axiom '{axiom}' failed with residual {residual:.3e}")]
    PropertyFailure { axiom: &'static str, residual: f64 },
    #[error("|beta|*||h|| = {norm:.3e} exceeds the exp-safe bound; analytic continuation ill-conditioned")]
    ExpOverflow { norm: f64 },
}

fn require_faithful(state: &AlgState) -> Result<(), ModularError> {
    let min_eig = state.min_eigenvalue();
    if min_eig <= FAITHFULNESS_THRESHOLD {
        Err(ModularError::NonFaithfulState { min_eig })
    } else {
        Ok(())
    }
}

/// `-log rho` for a faithful state. The Gibbs state of the result at
/// `beta = 1` is `rho` itself.
pub fn modular_hamiltonian(state: &AlgState) -> Result<CMat, ModularError> {
    require_faithful(state)?;
    Ok(herm_func(&state.density, |p| c(-p.ln(), 0.0)))
}

/// One-parameter modular automorphism group of a faithful state.
pub struct ModularFlow {
    state: AlgState,
    generator: CMat,
}

impl ModularFlow {
    pub fn new(state: AlgState) -> Result<Self, ModularError> {
        let generator = modular_hamiltonian(&state)?;
        Ok(Self { state, generator })
    }

    /// `h_mod = -log rho`.
    pub fn generator(&self) -> &CMat {
        &self.generator
    }

    pub fn state(&self) -> &AlgState {
        &self.state
    }

    /// `sigma_t(a) = rho^{it} a rho^{-it}`.
    pub fn apply(&self, a: &CMat, t: f64) -> CMat {
        let u = herm_func(&self.state.density, |p| {
            let phase = t * p.ln();
            c(phase.cos(), phase.sin())
        });
        &u * a * u.adjoint()
    }
}

/// `rho^{it} a rho^{-it}` computed through the eigendecomposition of `rho`.
pub fn modular_flow(state: &AlgState, a: &CMat, t: f64) -> Result<CMat, ModularError> {
    require_faithful(state)?;
    let u = herm_func(&state.density, |p| {
        let phase = t * p.ln();
        c(phase.cos(), phase.sin())
    });
    Ok(&u * a * u.adjoint())
}

/// Worst KMS boundary-condition violation over algebra basis pairs:
/// `max_{a,b} |omega(a e^{-beta h} b e^{beta h}) - omega(b a)|`.
pub fn kms_residual(state: &AlgState, h: &CMat, beta: f64) -> Result<f64, ModularError> {
    let (vals, _) = herm_eig(h);
    let radius = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if beta.abs() * radius > EXP_SAFE_BOUND {
        return Err(ModularError::ExpOverflow {
            norm: beta.abs() * radius,
        });
    }
    let exp_minus = herm_func(h, |x| c((-beta * x).exp(), 0.0));
    let exp_plus = herm_func(h, |x| c((beta * x).exp(), 0.0));
    let basis = state.algebra.basis();
    let mut worst: f64 = 0.0;
    for a in basis {
        let a_em = a * &exp_minus;
        for b in basis {
            let lhs = state.expect(&(&a_em * b * &exp_plus));
            let rhs = state.expect(&(b * a));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Derivation form of the modular constraint: the worst residual of
/// `[h_mod, a]` after projection onto the span of `sub`, maximized over the
/// sub basis. Zero iff the modular flow preserves the subalgebra.
pub fn takesaki_check(state: &AlgState, sub: &AlgebraBasis) -> Result<f64, ModularError> {
    require_faithful(state)?;
    let containment = sub
        .basis()
        .iter()
        .map(|b| state.algebra.span_residual(b))
        .fold(0.0, f64::max);
    if containment > DEFAULT_TOL {
        return Err(ModularError::NotASubalgebra {
            residual: containment,
        });
    }
    let h = modular_hamiltonian(state)?;
    let mut worst: f64 = 0.0;
    for a in sub.basis() {
        let comm = &h * a - a * &h;
        worst = worst.max(sub.span_residual(&comm));
    }
    Ok(worst)
}

/// Residuals of the five conditional-expectation axioms plus the smallest
/// eigenvalue seen in the positivity sampling.
#[derive(Debug, Clone)]
pub struct CeDiagnostics {
    pub unital: f64,
    pub idempotent: f64,
    pub module_property: f64,
    pub state_preserving: f64,
    pub positivity_min_eig: f64,
}

impl CeDiagnostics {
    pub fn worst(&self) -> f64 {
        self.unital
            .max(self.idempotent)
            .max(self.module_property)
            .max(self.state_preserving)
            .max((-self.positivity_min_eig).max(0.0))
    }
}

/// A linear map from a source algebra onto a subalgebra, stored through its
/// action on the source basis.
#[derive(Debug, Clone)]
pub struct CondExpectation {
    source: AlgebraBasis,
    target: AlgebraBasis,
    images: Vec<CMat>,
}

impl CondExpectation {
    /// Orthogonal projection of the source span onto the target span with
    /// respect to the GNS inner product `<a, b> = omega(a^dag b)`.
    ///
    /// No feasibility gate is applied here; `conditional_expectation` is the
    /// checked entry point.
    pub fn gns_unchecked(
        state: &AlgState,
        source: &AlgebraBasis,
        target: &AlgebraBasis,
    ) -> Self {
        let k = target.dim();
        let gram = CMat::from_fn(k, k, |i, j| {
            state.expect(&(target.basis()[i].adjoint() * &target.basis()[j]))
        });
        let lu = gram.lu();
        let images = source
            .basis()
            .iter()
            .map(|a| {
                let v = nalgebra::DVector::from_fn(k, |j, _| {
                    state.expect(&(target.basis()[j].adjoint() * a))
                });
                let coeffs = lu.solve(&v).expect("GNS Gram matrix singular");
                let mut img = CMat::zeros(source.ambient_dim(), source.ambient_dim());
                for (j, b) in target.basis().iter().enumerate() {
                    img += b * coeffs[j];
                }
                img
            })
            .collect();
        Self {
            source: source.clone(),
            target: target.clone(),
            images,
        }
    }

    pub fn source(&self) -> &AlgebraBasis {
        &self.source
    }

    pub fn target(&self) -> &AlgebraBasis {
        &self.target
    }

    /// Applies the map to any element of the source span (elements outside
    /// the span are implicitly projected onto it first).
    pub fn apply(&self, m: &CMat) -> CMat {
        let n = self.source.ambient_dim();
        let mut out = CMat::zeros(n, n);
        for (a, img) in self.source.basis().iter().zip(&self.images) {
            out += img * hs_inner(a, m);
        }
        out
    }

    /// Measures all five axioms: unitality, idempotence onto the target,
    /// the bimodule property over the target, preservation of `omega`, and
    /// positivity on `samples` seeded random elements `x^dag x`.
    pub fn diagnostics(&self, state: &AlgState, samples: usize, seed: u64) -> CeDiagnostics {
        let n = self.source.ambient_dim();
        let eye = crate::cmat::identity(n);

        let unital = hs_norm(&(self.apply(&eye) - &eye));

        let mut idempotent: f64 = 0.0;
        for img in &self.images {
            idempotent = idempotent.max(hs_norm(&(self.apply(img) - img)));
            idempotent = idempotent.max(self.target.span_residual(img));
        }

        let mut module_property: f64 = 0.0;
        for b in self.target.basis() {
            for a in self.source.basis() {
                for cc in self.target.basis() {
                    let lhs = self.apply(&(b * a * cc));
                    let rhs = b * self.apply(a) * cc;
                    module_property = module_property.max(hs_norm(&(lhs - rhs)));
                }
            }
        }

        let mut state_preserving: f64 = 0.0;
        for (a, img) in self.source.basis().iter().zip(&self.images) {
            state_preserving = state_preserving.max((state.expect(a) - state.expect(img)).norm());
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positivity_min_eig = f64::INFINITY;
        for _ in 0..samples {
            let x = random_cmat(&mut rng, n);
            let x = self.source.project(&x);
            let img = self.apply(&(x.adjoint() * &x));
            positivity_min_eig = positivity_min_eig.min(herm_min_eig(&img));
        }
        if !positivity_min_eig.is_finite() {
            positivity_min_eig = 0.0;
        }

        CeDiagnostics {
            unital,
            idempotent,
            module_property,
            state_preserving,
            positivity_min_eig,
        }
    }
}

/// The unique `omega`-preserving conditional expectation onto `sub`, gated by
/// the modular constraint and verified against all five axioms.
pub fn conditional_expectation(
    state: &AlgState,
    sub: &AlgebraBasis,
    tol: f64,
) -> Result<CondExpectation, ModularError> {
    let residual = takesaki_check(state, sub)?;
    if residual > tol {
        return Err(ModularError::ModularViolation { residual });
    }
    let ce = CondExpectation::gns_unchecked(state, &state.algebra, sub);
    let diag = ce.diagnostics(state, 100, 7);
    let checks: [(&'static str, f64); 5] = [
        ("unital", diag.unital),
        ("idempotent", diag.idempotent),
        ("module property", diag.module_property),
        ("state preserving", diag.state_preserving),
        ("positivity", (-diag.positivity_min_eig).max(0.0)),
    ];
    for (axiom, r) in checks {
        if r > tol {
            return Err(ModularError::PropertyFailure { axiom, residual: r });
        }
    }
    Ok(ce)
}
