//! Exact affine geometry on flat Lorentzian space: Killing-equation
//! residuals, isometry-algebra dimension, wedge classification around the
//! bifurcate horizon at `x^0 = x^1 = 0`, boost flows, and the unit
//! hyperboloid embedding with tangency tests.
//!
//! Generators are built from integer data, so products and symmetrizations
//! are exact in double precision and the Killing residuals of the standard
//! generators come out exactly zero.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

#[derive(Debug, Error)]
pub enum SpacetimeError {
    #[error("dimension {0} unsupported; need d >= 2")]
    BadDimension(usize),
    #[error("generator indices ({mu},{nu}) out of range for d={dim}")]
    BadGeneratorIndex { mu: usize, nu: usize, dim: usize },
    #[error("point is off the unit hyperboloid (|eta(x,x) - 1| = {residual:.3e})")]
    OffHyperboloid { residual: f64 },
    #[error("vector is not tangent at the given point (residual {residual:.3e})")]
    NotTangent { residual: f64 },
}

/// Flat space `R^d` with metric `diag(-1, +1, ..., +1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatSpace {
    dim: usize,
}

impl FlatSpace {
    pub fn new(dim: usize) -> Result<Self, SpacetimeError> {
        if dim < 2 {
            return Err(SpacetimeError::BadDimension(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> RMat {
        let mut eta = RMat::identity(self.dim, self.dim);
        eta[(0, 0)] = -1.0;
        eta
    }

    /// `eta(u, v) = -u^0 v^0 + sum_i u^i v^i`.
    pub fn inner(&self, u: &RVec, v: &RVec) -> f64 {
        let mut s = -u[0] * v[0];
        for i in 1..self.dim {
            s += u[i] * v[i];
        }
        s
    }
}

/// An exact affine vector field `X(x) = A x + b`.
#[derive(Debug, Clone)]
pub struct AffineKillingField {
    pub space: FlatSpace,
    pub linear: RMat,
    pub offset: RVec,
}

impl AffineKillingField {
    pub fn new(space: FlatSpace, linear: RMat, offset: RVec) -> Self {
        Self {
            space,
            linear,
            offset,
        }
    }

    /// Translation generator `T_(i)`: constant field `X = e_i`.
    pub fn translation(space: FlatSpace, i: usize) -> Result<Self, SpacetimeError> {
        let d = space.dim();
        if i >= d {
            return Err(SpacetimeError::BadGeneratorIndex { mu: i, nu: i, dim: d });
        }
        let mut b = RVec::zeros(d);
        b[i] = 1.0;
        Ok(Self::new(space, RMat::zeros(d, d), b))
    }

    /// Lorentz generator `L_{mu nu}` with components
    /// `X^rho = delta^rho_nu x_mu - delta^rho_mu x_nu` (indices lowered with
    /// the metric), i.e. a boost when one index is 0 and a rotation otherwise.
    pub fn lorentz(space: FlatSpace, mu: usize, nu: usize) -> Result<Self, SpacetimeError> {
        let d = space.dim();
        if mu >= nu || nu >= d {
            return Err(SpacetimeError::BadGeneratorIndex { mu, nu, dim: d });
        }
        let eta = space.metric();
        let mut a = RMat::zeros(d, d);
        for alpha in 0..d {
            a[(nu, alpha)] += eta[(mu, alpha)];
            a[(mu, alpha)] -= eta[(nu, alpha)];
        }
        Ok(Self::new(space, a, RVec::zeros(d)))
    }

    /// All `d(d+1)/2` standard generators: translations then `L_{mu nu}`.
    pub fn standard_generators(space: FlatSpace) -> Vec<(String, Self)> {
        let d = space.dim();
        let mut out = Vec::new();
        for i in 0..d {
            out.push((format!("T_{i}"), Self::translation(space, i).unwrap()));
        }
        for mu in 0..d {
            for nu in (mu + 1)..d {
                out.push((format!("L_{mu}{nu}"), Self::lorentz(space, mu, nu).unwrap()));
            }
        }
        out
    }

    pub fn eval(&self, x: &RVec) -> RVec {
        &self.linear * x + &self.offset
    }
}

/// Max-norm of `(eta A) + (eta A)^T`; zero exactly when the field is Killing
/// for the flat metric. No sampling involved.
pub fn killing_residual(field: &AffineKillingField) -> f64 {
    let m = field.space.metric() * &field.linear;
    let s = &m + m.transpose();
    s.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Dimension of the isometry algebra: nullity of the symmetrization map on
/// the linear parts plus the `d` free translation directions. Equals
/// `d(d+1)/2` for flat space.
pub fn isometry_algebra_dim(space: FlatSpace) -> usize {
    let d = space.dim();
    let eta = space.metric();
    // Row r = (i,j) entry of the symmetrized image of basis matrix E_kl.
    let mut map = RMat::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let mut e = RMat::zeros(d, d);
            e[(k, l)] = 1.0;
            let m = &eta * e;
            let s = &m + m.transpose();
            for i in 0..d {
                for j in 0..d {
                    map[(i * d + j, k * d + l)] = s[(i, j)];
                }
            }
        }
    }
    let rank = map.rank(1e-9);
    (d * d - rank) + d
}

/// The seven regions around the bifurcate horizon at `x^0 = x^1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WedgeLabel {
    /// Future cone `x^0 > |x^1|`.
    W1,
    /// Past cone `x^0 < -|x^1|`.
    W2,
    /// Right wedge `x^1 > |x^0|`.
    W3,
    /// Left wedge `x^1 < -|x^0|`.
    W4,
    /// Horizon sheet `x^0 = x^1` (off the bifurcation surface).
    HorizonA,
    /// Horizon sheet `x^0 = -x^1` (off the bifurcation surface).
    HorizonB,
    /// Bifurcation surface `x^0 = x^1 = 0`.
    S,
}

impl WedgeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            WedgeLabel::W1 => "W1",
            WedgeLabel::W2 => "W2",
            WedgeLabel::W3 => "W3",
            WedgeLabel::W4 => "W4",
            WedgeLabel::HorizonA => "hA",
            WedgeLabel::HorizonB => "hB",
            WedgeLabel::S => "S",
        }
    }
}

/// Classifies a point against the wedge splitting. Membership of the null
/// sheets is decided inside a configurable tolerance band, since the open
/// regions never contain a floating-point boundary point exactly.
///
/// Only `x^0` and `x^1` matter; the labels tile all of `R^d`.
pub fn wedge_classify(_space: FlatSpace, x: &RVec, tol: f64) -> WedgeLabel {
    let u = x[0] - x[1];
    let v = x[0] + x[1];
    let on_a = u.abs() <= tol;
    let on_b = v.abs() <= tol;
    match (on_a, on_b) {
        (true, true) => WedgeLabel::S,
        (true, false) => WedgeLabel::HorizonA,
        (false, true) => WedgeLabel::HorizonB,
        (false, false) => {
            if u > 0.0 && v > 0.0 {
                // x^0 > |x^1|
                WedgeLabel::W1
            } else if u < 0.0 && v < 0.0 {
                WedgeLabel::W2
            } else if v > 0.0 {
                // x^1 > |x^0|
                WedgeLabel::W3
            } else {
                WedgeLabel::W4
            }
        }
    }
}

/// Flow of the `x^1` boost through parameter `t`; preserves `eta(x,x)` and
/// fixes the bifurcation surface pointwise.
pub fn boost_flow(_space: FlatSpace, x: &RVec, t: f64) -> RVec {
    let mut y = x.clone();
    let (ch, sh) = (t.cosh(), t.sinh());
    y[0] = x[0] * ch + x[1] * sh;
    y[1] = x[0] * sh + x[1] * ch;
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Causality {
    Timelike,
    Null,
    Spacelike,
}

/// Sign of `eta(X(x), X(x))` with a tolerance band around null.
pub fn timelike_character(field: &AffineKillingField, x: &RVec, tol: f64) -> Causality {
    let v = field.eval(x);
    let q = field.space.inner(&v, &v);
    if q < -tol {
        Causality::Timelike
    } else if q > tol {
        Causality::Spacelike
    } else {
        Causality::Null
    }
}

/// A point on the unit hyperboloid `eta(x, x) = 1` in `R^5`.
#[derive(Debug, Clone)]
pub struct DeSitterPoint {
    x: RVec,
}

impl DeSitterPoint {
    pub fn new(space: FlatSpace, x: RVec, tol: f64) -> Result<Self, SpacetimeError> {
        let residual = (space.inner(&x, &x) - 1.0).abs();
        if residual > tol {
            return Err(SpacetimeError::OffHyperboloid { residual });
        }
        Ok(Self { x })
    }

    pub fn coords(&self) -> &RVec {
        &self.x
    }
}

/// `|eta(X(p), p)|`: zero exactly when the field is tangent to the
/// hyperboloid at `p`.
pub fn ds_tangency_residual(field: &AffineKillingField, p: &DeSitterPoint) -> f64 {
    let v = field.eval(p.coords());
    field.space.inner(&v, p.coords()).abs()
}

/// Pullback of the ambient metric to the hyperboloid: plain restriction of
/// `eta` to tangent vectors.
pub fn induced_metric(
    space: FlatSpace,
    p: &DeSitterPoint,
    u: &RVec,
    v: &RVec,
    tol: f64,
) -> Result<f64, SpacetimeError> {
    for w in [u, v] {
        let residual = space.inner(w, p.coords()).abs();
        if residual > tol {
            return Err(SpacetimeError::NotTangent { residual });
        }
    }
    Ok(space.inner(u, v))
}

/// Seeded sample of hyperboloid points `x = (sinh tau, cosh tau * n)` with
/// `n` uniform on the unit sphere and `tau` uniform in `[-tau_max, tau_max]`.
pub fn sample_hyperboloid<R: Rng>(
    space: FlatSpace,
    rng: &mut R,
    count: usize,
    tau_max: f64,
) -> Vec<DeSitterPoint> {
    let d = space.dim();
    (0..count)
        .map(|_| {
            let tau = rng.random_range(-tau_max..tau_max);
            let mut n = RVec::zeros(d - 1);
            loop {
                for i in 0..d - 1 {
                    n[i] = rng.sample(StandardNormal);
                }
                if n.norm() > 1e-6 {
                    break;
                }
            }
            n /= n.norm();
            let mut x = RVec::zeros(d);
            x[0] = tau.sinh();
            for i in 0..d - 1 {
                x[i + 1] = tau.cosh() * n[i];
            }
            DeSitterPoint { x }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mink4() -> FlatSpace {
        FlatSpace::new(4).unwrap()
    }

    fn v4(a: f64, b: f64, c: f64, d: f64) -> RVec {
        RVec::from_vec(vec![a, b, c, d])
    }

    #[test]
    fn translations_are_killing() {
        let s = mink4();
        for i in 0..4 {
            let t = AffineKillingField::translation(s, i).unwrap();
            assert_eq!(killing_residual(&t), 0.0);
        }
    }

    #[test]
    fn boost_is_killing_by_symmetrization_oracle() {
        let s = mink4();
        let l01 = AffineKillingField::lorentz(s, 0, 1).unwrap();
        // Oracle: the boost matrix has the off-diagonal (0,1) block filled
        // with -1; eta A is antisymmetric, so the symmetrization vanishes.
        let mut a = RMat::zeros(4, 4);
        a[(0, 1)] = -1.0;
        a[(1, 0)] = -1.0;
        assert_eq!(l01.linear, a);
        assert_eq!(killing_residual(&l01), 0.0);
    }

    #[test]
    fn dilation_is_not_killing() {
        let s = mink4();
        let dil = AffineKillingField::new(s, RMat::identity(4, 4), RVec::zeros(4));
        // (eta I) + (eta I)^T = 2 eta, max entry 2.
        assert_eq!(killing_residual(&dil), 2.0);
    }

    #[test]
    fn all_standard_generators_are_exactly_killing() {
        for d in [4usize, 5] {
            let s = FlatSpace::new(d).unwrap();
            let gens = AffineKillingField::standard_generators(s);
            assert_eq!(gens.len(), d * (d + 1) / 2);
            for (name, g) in gens {
                assert_eq!(killing_residual(&g), 0.0, "{name}");
            }
        }
    }

    #[test]
    fn isometry_dimensions() {
        assert_eq!(isometry_algebra_dim(FlatSpace::new(4).unwrap()), 10);
        assert_eq!(isometry_algebra_dim(FlatSpace::new(5).unwrap()), 15);
        // Null-space oracle in d=2: 1 boost + 2 translations.
        assert_eq!(isometry_algebra_dim(FlatSpace::new(2).unwrap()), 3);
    }

    #[test]
    fn wedge_examples() {
        let s = mink4();
        let tol = 1e-12;
        assert_eq!(wedge_classify(s, &v4(0.0, 0.0, 0.0, 0.0), tol), WedgeLabel::S);
        assert_eq!(wedge_classify(s, &v4(1.0, 0.0, 0.0, 0.0), tol), WedgeLabel::W1);
        assert_eq!(wedge_classify(s, &v4(0.0, 1.0, 0.0, 0.0), tol), WedgeLabel::W3);
        assert_eq!(wedge_classify(s, &v4(-1.0, 0.0, 0.0, 0.0), tol), WedgeLabel::W2);
        assert_eq!(wedge_classify(s, &v4(0.0, -1.0, 0.0, 0.0), tol), WedgeLabel::W4);
        assert_eq!(
            wedge_classify(s, &v4(1.0, 1.0, 0.5, 0.0), tol),
            WedgeLabel::HorizonA
        );
        assert_eq!(
            wedge_classify(s, &v4(1.0, -1.0, 0.0, 0.0), tol),
            WedgeLabel::HorizonB
        );
    }

    #[test]
    fn boost_flow_matches_matrix_exponential() {
        let s = mink4();
        let x = v4(0.0, 1.0, 0.0, 0.0);
        let t = 0.8;
        let y = boost_flow(s, &x, t);
        assert!((y[0] - t.sinh()).abs() < 1e-15);
        assert!((y[1] - t.cosh()).abs() < 1e-15);

        // Series exponential of the generator [[0,1],[1,0]] applied to x.
        let mut gen = RMat::zeros(4, 4);
        gen[(0, 1)] = 1.0;
        gen[(1, 0)] = 1.0;
        let mut u = RMat::identity(4, 4);
        let mut term = RMat::identity(4, 4);
        for k in 1..30 {
            term = &term * (&gen * t) / k as f64;
            u += &term;
        }
        let oracle = u * &x;
        assert!((&y - oracle).norm() < 1e-12);
    }

    #[test]
    fn boost_preserves_interval_and_fixes_s() {
        let s = mink4();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let x = v4(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let t = rng.random_range(-3.0..3.0);
            let y = boost_flow(s, &x, t);
            assert!((s.inner(&x, &x) - s.inner(&y, &y)).abs() < 1e-12);
        }
        let fixed = boost_flow(s, &v4(0.0, 0.0, 0.7, -0.2), 1.3);
        assert!((fixed - v4(0.0, 0.0, 0.7, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn wedge_labels_are_boost_invariant() {
        let s = mink4();
        let tol = 1e-12;
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..500 {
            let x = v4(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let t = rng.random_range(-5.0..5.0);
            let before = wedge_classify(s, &x, tol);
            // Open-region points can numerically brush the boundary after a
            // large boost; the label must still not jump between wedges.
            let after = wedge_classify(s, &boost_flow(s, &x, t), tol);
            match before {
                WedgeLabel::W1 | WedgeLabel::W2 | WedgeLabel::W3 | WedgeLabel::W4 => {
                    assert_eq!(before, after, "x={x:?} t={t}")
                }
                WedgeLabel::HorizonA => assert!(
                    matches!(after, WedgeLabel::HorizonA | WedgeLabel::S),
                    "hA moved to {after:?}"
                ),
                WedgeLabel::HorizonB => assert!(
                    matches!(after, WedgeLabel::HorizonB | WedgeLabel::S),
                    "hB moved to {after:?}"
                ),
                WedgeLabel::S => assert_eq!(after, WedgeLabel::S),
            }
        }
    }

    #[test]
    fn boost_field_characters() {
        let s = mink4();
        let l01 = AffineKillingField::lorentz(s, 0, 1).unwrap();
        let tol = 1e-12;
        assert_eq!(
            timelike_character(&l01, &v4(0.0, 1.0, 0.0, 0.0), tol),
            Causality::Timelike
        );
        assert_eq!(
            timelike_character(&l01, &v4(1.0, 0.0, 0.0, 0.0), tol),
            Causality::Spacelike
        );
        assert_eq!(
            timelike_character(&l01, &v4(1.0, 1.0, 0.0, 0.0), tol),
            Causality::Null
        );
    }

    #[test]
    fn boost_timelike_in_side_wedges_spacelike_in_cones() {
        // The printed W1/W2 labels are the future/past cones, where the boost
        // field is spacelike; it is timelike in W3/W4. This is the labeling
        // discrepancy the audit is meant to surface.
        let s = mink4();
        let l01 = AffineKillingField::lorentz(s, 0, 1).unwrap();
        let tol = 1e-12;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let x = v4(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            match wedge_classify(s, &x, tol) {
                WedgeLabel::W3 | WedgeLabel::W4 => assert_eq!(
                    timelike_character(&l01, &x, tol),
                    Causality::Timelike,
                    "x={x:?}"
                ),
                WedgeLabel::W1 | WedgeLabel::W2 => assert_eq!(
                    timelike_character(&l01, &x, tol),
                    Causality::Spacelike,
                    "x={x:?}"
                ),
                _ => {}
            }
        }
    }

    #[test]
    fn hyperboloid_tangency() {
        let s5 = FlatSpace::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let points = sample_hyperboloid(s5, &mut rng, 200, 2.0);
        for p in &points {
            assert!((s5.inner(p.coords(), p.coords()) - 1.0).abs() < 1e-10);
            for mu in 0..5 {
                for nu in (mu + 1)..5 {
                    let l = AffineKillingField::lorentz(s5, mu, nu).unwrap();
                    assert!(ds_tangency_residual(&l, p) <= 1e-12);
                }
            }
        }
        // Translations fail tangency wherever the matching coordinate form
        // is nonzero.
        let t2 = AffineKillingField::translation(s5, 2).unwrap();
        let failing = points
            .iter()
            .filter(|p| ds_tangency_residual(&t2, p) > 1e-10)
            .count();
        assert!(failing * 100 >= points.len() * 99);
    }

    #[test]
    fn translation_tangent_only_on_a_slice() {
        let s5 = FlatSpace::new(5).unwrap();
        let t2 = AffineKillingField::translation(s5, 2).unwrap();
        // p with p_2 = 0: tangent at that single point.
        let p = DeSitterPoint::new(s5, RVec::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]), 1e-12)
            .unwrap();
        assert_eq!(ds_tangency_residual(&t2, &p), 0.0);
        // p with p_2 != 0: residual is exactly |p_2|.
        let q_coords = {
            let tau: f64 = 0.3;
            RVec::from_vec(vec![tau.sinh(), 0.0, tau.cosh(), 0.0, 0.0])
        };
        let q = DeSitterPoint::new(s5, q_coords.clone(), 1e-12).unwrap();
        assert!((ds_tangency_residual(&t2, &q) - q_coords[2].abs()).abs() < 1e-14);
    }

    #[test]
    fn induced_metric_examples() {
        let s5 = FlatSpace::new(5).unwrap();
        let p = DeSitterPoint::new(s5, RVec::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]), 1e-12)
            .unwrap();
        let l01 = AffineKillingField::lorentz(s5, 0, 1).unwrap();
        let u = l01.eval(p.coords());
        assert!((u - RVec::from_vec(vec![-1.0, 0.0, 0.0, 0.0, 0.0])).norm() < 1e-15);
        let g = induced_metric(s5, &p, &l01.eval(p.coords()), &l01.eval(p.coords()), 1e-10)
            .unwrap();
        assert!((g + 1.0).abs() < 1e-14);

        // Orthogonal tangent pair.
        let e2 = RVec::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let g2 = induced_metric(s5, &p, &l01.eval(p.coords()), &e2, 1e-10).unwrap();
        assert_eq!(g2, 0.0);

        // Bilinearity on combinations.
        let a = l01.eval(p.coords());
        let combo = &a * 2.0 + &e2 * 3.0;
        let lhs = induced_metric(s5, &p, &combo, &a, 1e-10).unwrap();
        let rhs = 2.0 * induced_metric(s5, &p, &a, &a, 1e-10).unwrap()
            + 3.0 * induced_metric(s5, &p, &e2, &a, 1e-10).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn off_hyperboloid_and_non_tangent_rejected() {
        let s5 = FlatSpace::new(5).unwrap();
        assert!(matches!(
            DeSitterPoint::new(s5, RVec::zeros(5), 1e-10),
            Err(SpacetimeError::OffHyperboloid { .. })
        ));
        let p = DeSitterPoint::new(s5, RVec::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]), 1e-12)
            .unwrap();
        let not_tangent = RVec::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            induced_metric(s5, &p, &not_tangent, &not_tangent, 1e-10),
            Err(SpacetimeError::NotTangent { .. })
        ));
    }
}
