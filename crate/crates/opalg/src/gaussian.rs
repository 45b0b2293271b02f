//! Gaussian states of a harmonic chain: ground-state covariances, wedge
//! (half-chain) restriction, symplectic spectra via Williamson normal form,
//! entanglement Hamiltonians, two-copy thermal purifications, and the
//! comparison of the half-chain entanglement Hamiltonian against the
//! discretized boost weight.
//!
//! Conventions: hbar = 1, canonical ordering `(x_1..x_M, p_1..p_M)`,
//! symplectic form `Omega = [[0, I], [-I, 0]]`, vacuum symplectic eigenvalue
//! 1/2. With these, a thermal mode of frequency `w` at inverse temperature
//! `beta` has `nu = coth(beta w / 2) / 2` and the entanglement-Hamiltonian
//! mode energy is `eps = log((nu + 1/2)/(nu - 1/2))`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::cmat::{c, herm_eig, CMat};

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Symplectic eigenvalues closer to 1/2 than this count as pure directions.
pub const FAITHFUL_NU_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("chain needs at least one site (got {0})")]
    NoSites(usize),
    #[error("coupling matrix is singular to threshold (min eigenvalue {min_eig:.3e})")]
    SingularCoupling { min_eig: f64 },
    #[error("restriction region is empty")]
    EmptyRegion,
    #[error("region site {site} out of range for {modes} modes")]
    RegionOutOfRange { site: usize, modes: usize },
    #[error("covariance violates the uncertainty relation (min eigenvalue {min_eig:.3e})")]
    UncertaintyViolated { min_eig: f64 },
    #[error("reduced state is not faithful: symplectic eigenvalue {nu} within {FAITHFUL_NU_THRESHOLD:.0e} of 1/2")]
    NonFaithfulReduced { nu: f64 },
    #[error("matrix is not symmetric positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
}

/// Nearest-neighbor harmonic chain with Dirichlet walls: coupling matrix
/// `K` tridiagonal with `m^2 + 2 kappa` on the diagonal and `-kappa` off it.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicChain {
    pub sites: usize,
    pub mass: f64,
    pub coupling: f64,
}

impl HarmonicChain {
    pub fn new(sites: usize, mass: f64, coupling: f64) -> Result<Self, GaussianError> {
        if sites == 0 {
            return Err(GaussianError::NoSites(sites));
        }
        Ok(Self {
            sites,
            mass,
            coupling,
        })
    }

    pub fn coupling_matrix(&self) -> RMat {
        let n = self.sites;
        let diag = self.mass * self.mass + 2.0 * self.coupling;
        let mut k = RMat::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = diag;
            if i + 1 < n {
                k[(i, i + 1)] = -self.coupling;
                k[(i + 1, i)] = -self.coupling;
            }
        }
        k
    }
}

/// Covariance-matrix Gaussian state on `modes` bosonic modes.
#[derive(Debug, Clone)]
pub struct GaussianState {
    modes: usize,
    cov: RMat,
}

/// `Omega = [[0, I], [-I, 0]]` on `m` modes.
pub fn symplectic_form(m: usize) -> RMat {
    let mut omega = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        omega[(i, m + i)] = 1.0;
        omega[(m + i, i)] = -1.0;
    }
    omega
}

fn sym_eig(m: &RMat) -> (RVec, RMat) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    (se.eigenvalues, se.eigenvectors)
}

/// Spectral square root of a symmetric positive definite matrix.
fn sym_sqrt(m: &RMat) -> Result<RMat, GaussianError> {
    let (vals, vecs) = sym_eig(m);
    let min_eig = vals.min();
    if min_eig <= 0.0 {
        return Err(GaussianError::NotPositiveDefinite { min_eig });
    }
    let d = RMat::from_diagonal(&vals.map(f64::sqrt));
    Ok(&vecs * d * vecs.transpose())
}

impl GaussianState {
    pub fn new(modes: usize, cov: RMat) -> Result<Self, GaussianError> {
        let state = Self { modes, cov };
        state.validate(1e-10)?;
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cov(&self) -> &RMat {
        &self.cov
    }

    /// Symmetry and the uncertainty relation `gamma + (i/2) Omega >= 0`,
    /// checked through the eigenvalues of the Hermitian combination.
    pub fn validate(&self, tol: f64) -> Result<(), GaussianError> {
        let asym = (&self.cov - self.cov.transpose()).abs().max();
        if asym > tol {
            return Err(GaussianError::UncertaintyViolated { min_eig: -asym });
        }
        let min_eig = self.uncertainty_min_eig();
        if min_eig < -tol {
            return Err(GaussianError::UncertaintyViolated { min_eig });
        }
        Ok(())
    }

    /// Smallest eigenvalue of `gamma + (i/2) Omega`.
    pub fn uncertainty_min_eig(&self) -> f64 {
        let omega = symplectic_form(self.modes);
        let n = 2 * self.modes;
        let h = CMat::from_fn(n, n, |r, s| c(self.cov[(r, s)], 0.5 * omega[(r, s)]));
        let (vals, _) = herm_eig(&h);
        vals.min()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.symplectic_spectrum()
            .map(|nu| nu.iter().all(|v| (v - 0.5).abs() <= tol))
            .unwrap_or(false)
    }

    /// Symplectic eigenvalues, sorted descending: moduli of the eigenvalues
    /// of `i Omega gamma`, computed through the Hermitian matrix
    /// `i gamma^{1/2} Omega gamma^{1/2}`.
    pub fn symplectic_spectrum(&self) -> Result<Vec<f64>, GaussianError> {
        let root = sym_sqrt(&self.cov)?;
        let a = &root * symplectic_form(self.modes) * &root;
        let n = 2 * self.modes;
        let h = CMat::from_fn(n, n, |r, s| c(0.0, a[(r, s)]));
        let (vals, _) = herm_eig(&h);
        let mut nus: Vec<f64> = vals.iter().cloned().filter(|v| *v > 0.0).collect();
        nus.sort_by(|x, y| y.partial_cmp(x).unwrap());
        Ok(nus)
    }

    /// Gaussian restriction: the sub-covariance over the given sites.
    pub fn restrict(&self, region: &[usize]) -> Result<GaussianState, GaussianError> {
        if region.is_empty() {
            return Err(GaussianError::EmptyRegion);
        }
        for &s in region {
            if s >= self.modes {
                return Err(GaussianError::RegionOutOfRange {
                    site: s,
                    modes: self.modes,
                });
            }
        }
        let m = region.len();
        let idx: Vec<usize> = region
            .iter()
            .map(|&s| s)
            .chain(region.iter().map(|&s| s + self.modes))
            .collect();
        let cov = RMat::from_fn(2 * m, 2 * m, |r, s| self.cov[(idx[r], idx[s])]);
        GaussianState::new(m, cov)
    }
}

/// Ground state of the chain: `gamma_x = K^{-1/2}/2`, `gamma_p = K^{1/2}/2`.
pub fn ground_state(chain: &HarmonicChain) -> Result<GaussianState, GaussianError> {
    let k = chain.coupling_matrix();
    let (vals, vecs) = sym_eig(&k);
    let min_eig = vals.min();
    if min_eig <= 1e-12 {
        return Err(GaussianError::SingularCoupling { min_eig });
    }
    let n = chain.sites;
    let half_inv = &vecs * RMat::from_diagonal(&vals.map(|v| 0.5 / v.sqrt())) * vecs.transpose();
    let half = &vecs * RMat::from_diagonal(&vals.map(|v| 0.5 * v.sqrt())) * vecs.transpose();
    let mut cov = RMat::zeros(2 * n, 2 * n);
    cov.view_mut((0, 0), (n, n)).copy_from(&half_inv);
    cov.view_mut((n, n), (n, n)).copy_from(&half);
    GaussianState::new(n, cov)
}

/// Williamson normal form of a symmetric positive definite `2m x 2m` matrix:
/// `m = S (diag(nu) ⊕ diag(nu)) S^T` with `S^T Omega S = Omega`.
#[derive(Debug, Clone)]
pub struct Williamson {
    pub nu: Vec<f64>,
    pub s: RMat,
}

pub fn williamson(mat: &RMat) -> Result<Williamson, GaussianError> {
    let two_m = mat.nrows();
    let m = two_m / 2;
    let root = sym_sqrt(mat)?;
    let a = &root * symplectic_form(m) * &root; // antisymmetric
    let h = CMat::from_fn(two_m, two_m, |r, s| c(0.0, a[(r, s)]));
    let (vals, vecs) = herm_eig(&h);

    // Eigenpairs with positive eigenvalue; real/imaginary parts of the
    // (orthonormal) eigenvectors assemble an orthogonal matrix that brings
    // the antisymmetric a to 2x2 block form.
    let mut pos: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| (*v, i))
        .collect();
    pos.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    debug_assert_eq!(pos.len(), m);

    let sqrt2 = 2.0f64.sqrt();
    let mut ortho = RMat::zeros(two_m, two_m);
    let mut nu = Vec::with_capacity(m);
    for (k, (val, idx)) in pos.iter().enumerate() {
        nu.push(*val);
        let col = vecs.column(*idx);
        for r in 0..two_m {
            ortho[(r, k)] = sqrt2 * col[r].re;
            ortho[(r, m + k)] = -sqrt2 * col[r].im;
        }
    }

    let lam_inv_sqrt = {
        let mut d = RVec::zeros(two_m);
        for k in 0..m {
            d[k] = 1.0 / nu[k].sqrt();
            d[m + k] = 1.0 / nu[k].sqrt();
        }
        RMat::from_diagonal(&d)
    };
    let s = root * ortho * lam_inv_sqrt;
    Ok(Williamson { nu, s })
}

fn symplectic_inverse(s: &RMat) -> RMat {
    let m = s.nrows() / 2;
    let omega = symplectic_form(m);
    -(&omega) * s.transpose() * &omega
}

fn block_diag_pair(d: &[f64]) -> RMat {
    let m = d.len();
    let mut out = RVec::zeros(2 * m);
    for k in 0..m {
        out[k] = d[k];
        out[m + k] = d[k];
    }
    RMat::from_diagonal(&out)
}

/// Quadratic kernel `h_E` with `rho ∝ exp(-(1/2) R^T h_E R)`.
#[derive(Debug, Clone)]
pub struct EntanglementHamiltonian {
    pub kernel: RMat,
    /// Normal-mode energies `eps_k = log((nu_k + 1/2)/(nu_k - 1/2))`.
    pub mode_energies: Vec<f64>,
    /// `log Z = sum_k -log(2 sinh(eps_k / 2))`.
    pub log_norm: f64,
}

/// Entanglement (modular) Hamiltonian of a faithful Gaussian state, via
/// symplectic diagonalization of the covariance.
pub fn entanglement_hamiltonian(
    state: &GaussianState,
) -> Result<EntanglementHamiltonian, GaussianError> {
    let w = williamson(state.cov())?;
    if w
        .nu
        .iter()
        .all(|nu| *nu < 0.5 + FAITHFUL_NU_THRESHOLD)
    {
        // All directions pure: the state has no faithful logarithm at all.
        let nu = w.nu.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(GaussianError::NonFaithfulReduced { nu });
    }
    // Deep-bulk modes of a large reduced state sit at nu = 1/2 up to more
    // than double precision can resolve; their formally divergent energies
    // are clamped at the faithfulness threshold.
    let eps: Vec<f64> = w
        .nu
        .iter()
        .map(|nu| {
            let nu = nu.max(0.5 + FAITHFUL_NU_THRESHOLD);
            ((nu + 0.5) / (nu - 0.5)).ln()
        })
        .collect();
    let s_inv = symplectic_inverse(&w.s);
    let kernel = s_inv.transpose() * block_diag_pair(&eps) * &s_inv;
    let log_norm = eps.iter().map(|e| -(2.0 * (e / 2.0).sinh()).ln()).sum();
    Ok(EntanglementHamiltonian {
        kernel,
        mode_energies: eps,
        log_norm,
    })
}

/// Covariance of the Gibbs state of the quadratic Hamiltonian
/// `(1/2) R^T h R` at inverse temperature `beta`.
pub fn gibbs_covariance(h: &RMat, beta: f64) -> Result<RMat, GaussianError> {
    let w = williamson(h)?;
    let nus: Vec<f64> = w
        .nu
        .iter()
        .map(|eps| 0.5 / (beta * eps / 2.0).tanh())
        .collect();
    let t_inv = symplectic_inverse(&w.s);
    Ok(t_inv.transpose() * block_diag_pair(&nus) * t_inv)
}

/// Two-copy purification of the Gibbs state of the chain Hamiltonian
/// `(1/2)(p^T p + x^T K x)` at `beta`: per-normal-mode two-mode squeezing
/// with `tanh r_k = exp(-beta w_k / 2)`. The restriction to either copy is
/// the Gibbs covariance; the global state is pure.
pub fn tfd(k_matrix: &RMat, beta: f64) -> Result<GaussianState, GaussianError> {
    let n = k_matrix.nrows();
    let (vals, vecs) = sym_eig(k_matrix);
    let min_eig = vals.min();
    if min_eig <= 1e-12 {
        return Err(GaussianError::SingularCoupling { min_eig });
    }
    let omegas: Vec<f64> = vals.iter().map(|v| v.sqrt()).collect();

    // Per-mode dimensionless covariances.
    let mut diag_c = RVec::zeros(n); // cosh 2r / 2
    let mut diag_s = RVec::zeros(n); // sinh 2r / 2
    for k in 0..n {
        let th = (-beta * omegas[k] / 2.0).exp();
        let c2 = (1.0 + th * th) / (1.0 - th * th);
        let s2 = 2.0 * th / (1.0 - th * th);
        diag_c[k] = 0.5 * c2;
        diag_s[k] = 0.5 * s2;
    }

    let scale_x = RVec::from_iterator(n, omegas.iter().map(|w| 1.0 / w.sqrt()));
    let scale_p = RVec::from_iterator(n, omegas.iter().map(|w| w.sqrt()));

    let site = |d: &RVec, s: &RVec| -> RMat {
        let m = RMat::from_diagonal(&RVec::from_iterator(
            n,
            (0..n).map(|k| d[k] * s[k] * s[k]),
        ));
        &vecs * m * vecs.transpose()
    };

    let xx = site(&diag_c, &scale_x);
    let xc = site(&diag_s, &scale_x);
    let pp = site(&diag_c, &scale_p);
    let pc = site(&diag_s, &scale_p);

    let modes = 2 * n;
    let mut cov = RMat::zeros(2 * modes, 2 * modes);
    cov.view_mut((0, 0), (n, n)).copy_from(&xx);
    cov.view_mut((n, n), (n, n)).copy_from(&xx);
    cov.view_mut((0, n), (n, n)).copy_from(&xc);
    cov.view_mut((n, 0), (n, n)).copy_from(&xc);
    let p0 = modes;
    cov.view_mut((p0, p0), (n, n)).copy_from(&pp);
    cov.view_mut((p0 + n, p0 + n), (n, n)).copy_from(&pp);
    cov.view_mut((p0, p0 + n), (n, n)).copy_from(&(-&pc));
    cov.view_mut((p0 + n, p0), (n, n)).copy_from(&(-&pc));
    GaussianState::new(modes, cov)
}

/// One row of the half-chain boost comparison.
#[derive(Debug, Clone)]
pub struct BoostProfileRow {
    pub site: usize,
    /// Lattice distance from the entangling cut, in units of the spacing.
    pub distance: f64,
    /// Diagonal of the x-block of the entanglement-Hamiltonian kernel.
    pub eh_weight: f64,
    /// Discretized boost weight `2 pi * distance * K_jj`.
    pub bw_weight: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone)]
pub struct BoostComparison {
    pub sites: usize,
    pub rows: Vec<BoostProfileRow>,
    /// Mean relative deviation over a fixed-width window of sites nearest
    /// the cut.
    pub summary_deviation: f64,
}

/// Compares the half-chain entanglement Hamiltonian against the discretized
/// boost generator: the ground state of the chain is restricted to the left
/// half, and the x-block diagonal of `h_E` is matched against
/// `2 pi * (distance from the cut) * K_jj`.
pub fn boost_comparison(chain: &HarmonicChain) -> Result<BoostComparison, GaussianError> {
    let n = chain.sites;
    let half = n / 2;
    let state = ground_state(chain)?;
    let region: Vec<usize> = (0..half).collect();
    let restricted = state.restrict(&region)?;
    let eh = entanglement_hamiltonian(&restricted)?;
    let k = chain.coupling_matrix();

    let mut rows = Vec::with_capacity(half);
    for j in 0..half {
        let distance = (half - j) as f64 - 0.5;
        let eh_weight = eh.kernel[(j, j)];
        let bw_weight = 2.0 * std::f64::consts::PI * distance * k[(j, j)];
        let rel_dev = ((eh_weight - bw_weight) / bw_weight).abs();
        rows.push(BoostProfileRow {
            site: j,
            distance,
            eh_weight,
            bw_weight,
            rel_dev,
        });
    }

    // Summary window: a fixed number of sites adjacent to the cut, so that
    // chains of different length are compared over the same lattice
    // distances (the linear boost approximation only holds near the cut).
    let window = half.min(4).max(1);
    let near_cut: Vec<&BoostProfileRow> = rows.iter().rev().take(window).collect();
    let summary_deviation =
        near_cut.iter().map(|r| r.rel_dev).sum::<f64>() / near_cut.len() as f64;

    Ok(BoostComparison {
        sites: n,
        rows,
        summary_deviation,
    })
}
