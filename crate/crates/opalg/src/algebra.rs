//! Finite-dimensional unital *-algebras of complex matrices and states on
//! them: subalgebra generation, commutants, traces, density matrices, and the
//! diagonal embedding of finite classical probability spaces.

use nalgebra::DVector;
use thiserror::Error;

use crate::cmat::{
    c, from_real, herm_eig, herm_min_eig, hs_inner, hs_norm, identity, matrix_unit,
    orthonormalize, span_project, span_residual, unvec, CMat, C64, RANK_DROP_TOL,
};

/// Hard cap on the ambient matrix dimension for algebra generation.
pub const MAX_AMBIENT_DIM: usize = 64;

/// Hard cap on closure rounds; the span saturates at dimension `n^2`
/// mathematically, so hitting this indicates numerical drift.
pub const MAX_CLOSURE_ROUNDS: usize = 50;

/// Default absolute tolerance on unit-normalized data.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Smallest density-matrix eigenvalue still considered faithful.
pub const FAITHFULNESS_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("ambient dimension {0} exceeds the configured maximum {MAX_AMBIENT_DIM}")]
    AmbientDimensionOverflow(usize),
    #[error("generator has shape {got_rows}x{got_cols}, expected {dim}x{dim}")]
    GeneratorShape {
        dim: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("closure iteration did not saturate after {MAX_CLOSURE_ROUNDS} rounds")]
    ClosureDidNotConverge,
    #[error("closure produced dimension {got} above the n^2 bound {bound}")]
    ClosureDimensionOverflow { got: usize, bound: usize },
    #[error("density matrix invariant violated: {0}")]
    InvalidDensity(String),
    #[error("probabilities must be nonnegative and sum to 1 (sum = {0})")]
    InvalidProbabilities(f64),
    #[error("event index {idx} out of range for {outcomes} outcomes")]
    EventOutOfRange { idx: usize, outcomes: usize },
}

/// A unital *-closed linear span inside `M_n(C)`, stored as an orthonormal
/// basis under the normalized Hilbert-Schmidt inner product.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    ambient_dim: usize,
    basis: Vec<CMat>,
}

impl AlgebraBasis {
    /// Wraps an already HS-orthonormal, *-closed, unital family. The
    /// invariants are the caller's responsibility; `validate` checks them.
    pub fn from_orthonormal(ambient_dim: usize, basis: Vec<CMat>) -> Self {
        Self { ambient_dim, basis }
    }

    /// The full matrix algebra `M_n`, with matrix-unit basis.
    pub fn full(n: usize) -> Self {
        let scale = c((n as f64).sqrt(), 0.0);
        let basis = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|(j, k)| matrix_unit(n, j, k) * scale)
            .collect();
        Self {
            ambient_dim: n,
            basis,
        }
    }

    /// The diagonal subalgebra of `M_n`.
    pub fn diagonal(n: usize) -> Self {
        let scale = c((n as f64).sqrt(), 0.0);
        let basis = (0..n).map(|j| matrix_unit(n, j, j) * scale).collect();
        Self {
            ambient_dim: n,
            basis,
        }
    }

    /// The scalars `C I` inside `M_n`.
    pub fn scalars(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: vec![identity(n)],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the span.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Residual of `m` after projection onto the span.
    pub fn span_residual(&self, m: &CMat) -> f64 {
        span_residual(&self.basis, m)
    }

    /// Orthogonal projection of `m` onto the span (HS inner product).
    pub fn project(&self, m: &CMat) -> CMat {
        span_project(&self.basis, m).0
    }

    pub fn contains(&self, m: &CMat, tol: f64) -> bool {
        self.span_residual(m) <= tol * hs_norm(m).max(1.0)
    }

    /// True when every basis element of `other` lies in this span.
    pub fn contains_span(&self, other: &AlgebraBasis, tol: f64) -> bool {
        other.basis.iter().all(|b| self.contains(b, tol))
    }

    /// Largest cross-residual between the two spans; zero means equality.
    pub fn span_distance(&self, other: &AlgebraBasis) -> f64 {
        let a_in_b = self
            .basis
            .iter()
            .map(|m| other.span_residual(m))
            .fold(0.0, f64::max);
        let b_in_a = other
            .basis
            .iter()
            .map(|m| self.span_residual(m))
            .fold(0.0, f64::max);
        a_in_b.max(b_in_a)
    }

    /// Checks orthonormality, closure under product and adjoint, and that the
    /// identity lies in the span. Returns the worst residual found.
    pub fn validate(&self, tol: f64) -> Result<f64, AlgebraError> {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let g = hs_inner(a, b);
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - c(expect, 0.0)).norm());
                worst = worst.max(self.span_residual(&(a * b)));
            }
            worst = worst.max(self.span_residual(&a.adjoint()));
        }
        worst = worst.max(self.span_residual(&identity(self.ambient_dim)));
        if worst <= tol {
            Ok(worst)
        } else {
            Err(AlgebraError::InvalidDensity(format!(
                "algebra basis invariant residual {worst:.3e} exceeds tol {tol:.1e}"
            )))
        }
    }
}

/// Smallest unital *-closed linear span of `M_n` containing the generators,
/// found by adjoining products and adjoints until the dimension stabilizes.
pub fn generate_algebra(
    ambient_dim: usize,
    generators: &[CMat],
) -> Result<AlgebraBasis, AlgebraError> {
    if ambient_dim == 0 || ambient_dim > MAX_AMBIENT_DIM {
        return Err(AlgebraError::AmbientDimensionOverflow(ambient_dim));
    }
    for g in generators {
        if g.nrows() != ambient_dim || g.ncols() != ambient_dim {
            return Err(AlgebraError::GeneratorShape {
                dim: ambient_dim,
                got_rows: g.nrows(),
                got_cols: g.ncols(),
            });
        }
    }

    let mut seed: Vec<CMat> = vec![identity(ambient_dim)];
    for g in generators {
        seed.push(g.clone());
        seed.push(g.adjoint());
    }
    let mut basis = orthonormalize(seed, RANK_DROP_TOL);

    for _ in 0..MAX_CLOSURE_ROUNDS {
        let prev = basis.len();
        let mut candidates: Vec<CMat> = Vec::new();
        for a in &basis {
            candidates.push(a.adjoint());
            for b in &basis {
                candidates.push(a * b);
            }
        }
        for m in candidates {
            let (_, residual_norm) = span_project(&basis, &m);
            if residual_norm > RANK_DROP_TOL {
                let mut v = m;
                for _ in 0..2 {
                    for b in &basis {
                        let coeff = hs_inner(b, &v);
                        v -= b * coeff;
                    }
                }
                let norm = hs_norm(&v);
                if norm > RANK_DROP_TOL {
                    basis.push(v / c(norm, 0.0));
                }
            }
        }
        if basis.len() > ambient_dim * ambient_dim {
            return Err(AlgebraError::ClosureDimensionOverflow {
                got: basis.len(),
                bound: ambient_dim * ambient_dim,
            });
        }
        if basis.len() == prev {
            return Ok(AlgebraBasis::from_orthonormal(ambient_dim, basis));
        }
    }
    Err(AlgebraError::ClosureDidNotConverge)
}

/// Commutant `{x : xa = ax for all a in the span}`, computed as the joint
/// null space of the stacked commutator maps on vectorized matrices.
pub fn commutant(alg: &AlgebraBasis) -> AlgebraBasis {
    let n = alg.ambient_dim();
    let n2 = n * n;
    let eye = identity(n);
    // M = sum_i C_i^dag C_i with C_i = I (x) a_i - a_i^T (x) I;
    // null(M) = common null space of the C_i.
    let mut m = CMat::zeros(n2, n2);
    for a in alg.basis() {
        let ci = eye.kronecker(a) - a.transpose().kronecker(&eye);
        m += ci.adjoint() * ci;
    }
    let (vals, vecs) = herm_eig(&m);
    let scale = vals.iter().cloned().fold(0.0, f64::max).max(1.0);
    let mut null_mats: Vec<CMat> = Vec::new();
    for (idx, &lambda) in vals.iter().enumerate() {
        if lambda <= 1e-13 * scale {
            let col = DVector::from_iterator(n2, vecs.column(idx).iter().cloned());
            null_mats.push(unvec(&col, n));
        }
    }
    // Put the identity first so small commutants come out in a tame basis.
    let mut seed = vec![identity(n)];
    seed.extend(null_mats);
    AlgebraBasis::from_orthonormal(n, orthonormalize(seed, RANK_DROP_TOL))
}

/// A state on an algebra, represented by a density matrix on the ambient
/// space; `omega(a) = tr(rho a)`.
#[derive(Debug, Clone)]
pub struct AlgState {
    pub algebra: AlgebraBasis,
    pub density: CMat,
}

impl AlgState {
    pub fn new(algebra: AlgebraBasis, density: CMat) -> Result<Self, AlgebraError> {
        let state = Self { algebra, density };
        state.validate(DEFAULT_TOL)?;
        Ok(state)
    }

    pub fn validate(&self, tol: f64) -> Result<(), AlgebraError> {
        let rho = &self.density;
        let n = self.algebra.ambient_dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(AlgebraError::InvalidDensity(format!(
                "density is {}x{}, ambient is {n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let herm_res = hs_norm(&(rho - rho.adjoint()));
        if herm_res > tol {
            return Err(AlgebraError::InvalidDensity(format!(
                "Hermiticity residual {herm_res:.3e}"
            )));
        }
        let tr = rho.trace();
        if (tr - c(1.0, 0.0)).norm() > tol {
            return Err(AlgebraError::InvalidDensity(format!("trace {tr}")));
        }
        let min_eig = herm_min_eig(rho);
        if min_eig < -tol {
            return Err(AlgebraError::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    pub fn expect(&self, a: &CMat) -> C64 {
        (&self.density * a).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        herm_min_eig(&self.density)
    }

    pub fn is_faithful(&self) -> bool {
        self.min_eigenvalue() > FAITHFULNESS_THRESHOLD
    }

    /// True when the smallest eigenvalue sits in the ill-conditioned band
    /// where `log rho` amplifies error.
    pub fn conditioning_warning(&self) -> bool {
        let min = self.min_eigenvalue();
        (FAITHFULNESS_THRESHOLD..1e-8).contains(&min)
    }
}

/// `rho = I/n`; tracial on every subalgebra of `M_n`.
pub fn tracial_state(alg: &AlgebraBasis) -> AlgState {
    let n = alg.ambient_dim();
    AlgState {
        algebra: alg.clone(),
        density: identity(n) / c(n as f64, 0.0),
    }
}

/// A finite classical probability space with the full power-set sigma-algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbabilitySpace {
    probs: Vec<f64>,
}

impl FiniteProbabilitySpace {
    pub fn new(probs: Vec<f64>) -> Result<Self, AlgebraError> {
        if probs.is_empty() || probs.iter().any(|&p| p < 0.0) {
            return Err(AlgebraError::InvalidProbabilities(
                probs.iter().sum::<f64>(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DEFAULT_TOL {
            return Err(AlgebraError::InvalidProbabilities(sum));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Self {
        Self {
            probs: vec![1.0 / m as f64; m],
        }
    }

    pub fn outcomes(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn event_mass(&self, event: &[usize]) -> Result<f64, AlgebraError> {
        let mut mass = 0.0;
        for &i in event {
            if i >= self.probs.len() {
                return Err(AlgebraError::EventOutOfRange {
                    idx: i,
                    outcomes: self.probs.len(),
                });
            }
            mass += self.probs[i];
        }
        Ok(mass)
    }

    /// Indicator projection of an event inside the diagonal algebra of `M_m`.
    pub fn event_projection(&self, event: &[usize]) -> Result<CMat, AlgebraError> {
        let m = self.probs.len();
        let mut p = CMat::zeros(m, m);
        for &i in event {
            if i >= m {
                return Err(AlgebraError::EventOutOfRange {
                    idx: i,
                    outcomes: m,
                });
            }
            p[(i, i)] = c(1.0, 0.0);
        }
        Ok(p)
    }
}

/// Diagonal-algebra embedding: `(X, sigma, mu)` becomes the diagonal
/// subalgebra of `M_m` with `rho = diag(mu)`, and every event expectation is
/// reproduced exactly by its indicator projection.
pub fn embed_classical(space: &FiniteProbabilitySpace) -> (AlgebraBasis, AlgState) {
    let m = space.outcomes();
    let alg = AlgebraBasis::diagonal(m);
    let density = from_real(&nalgebra::DMatrix::from_diagonal(&DVector::from_row_slice(
        space.probs(),
    )));
    let state = AlgState {
        algebra: alg.clone(),
        density,
    };
    (alg, state)
}
