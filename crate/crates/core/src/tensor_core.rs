//! Almost contact metric structure on a single tangent space.
//!
//! Every tensor is stored as components in a fixed working frame. The frame
//! is orthonormal by default (identity Gram matrix); a general Gram matrix is
//! accepted so the identities can be stressed in skewed frames.
//!
//! Sign conventions: `xi = -JN` for the chosen unit normal `N`, and the
//! canonical structure orients `phi` on `ker(eta)` by `phi V_i = V_{n-1+i}`,
//! `phi V_{n-1+i} = -V_i` in the standard frame. Reversing the orientation of
//! `phi` flips the sign of every `phi U` coefficient in the connection tables.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_dim, GeometryError, Result};
use crate::linalg::{max_abs, max_abs_vec, random_matrix, random_orthogonal, random_vector};

/// Default tolerance for structural validation.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// A tangent space `T_pM` of odd dimension `2n - 1` with its metric `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSpace {
    metric: DMatrix<f64>,
    // Lower Cholesky factor: metric = chol * chol^T.
    chol: DMatrix<f64>,
}

impl TangentSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::with_metric(DMatrix::identity(dim, dim))
    }

    pub fn with_metric(metric: DMatrix<f64>) -> Result<Self> {
        let dim = metric.nrows();
        ensure_dim("metric columns", dim, metric.ncols())?;
        if dim < 3 || dim.is_multiple_of(2) {
            return Err(GeometryError::InvalidSpace(format!(
                "dimension must be odd and at least 3, got {dim}"
            )));
        }
        let asym = max_abs(&(&metric - metric.transpose()));
        if asym > 1e-12 * (1.0 + max_abs(&metric)) {
            return Err(GeometryError::InvalidSpace(format!(
                "metric is not symmetric (residual {asym:e})"
            )));
        }
        let chol = metric
            .clone()
            .cholesky()
            .ok_or_else(|| GeometryError::InvalidSpace("metric is not positive-definite".into()))?
            .l();
        Ok(Self { metric, chol })
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// Complex dimension `n` of the ambient space, `dim = 2n - 1`.
    pub fn complex_dim(&self) -> usize {
        self.dim().div_ceil(2)
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.metric * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// The covector `g(x, .)` as components.
    pub fn flat(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.metric * x
    }

    /// Components of `x` in a g-orthonormal frame.
    pub fn to_orthonormal(&self, x: &DVector<f64>) -> DVector<f64> {
        self.chol.transpose() * x
    }

    /// Matrix of an endomorphism in a g-orthonormal frame, so that Euclidean
    /// matrix norms become the g-operator norms.
    pub fn operator_to_orthonormal(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let lt = self.chol.transpose();
        // L^T M L^{-T}: solve X L^T = (L^T M) via (L X^T = (L^T M)^T).
        let lhs = &lt * m;
        let xt = self
            .chol
            .solve_lower_triangular(&lhs.transpose())
            .expect("cholesky factor is invertible");
        xt.transpose()
    }

    /// The operator `X -> g(v, X) u`.
    pub fn rank_one(&self, u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
        u * self.flat(v).transpose()
    }

    /// Max-abs asymmetry of `g(AX, Y) - g(X, AY)`.
    pub fn symmetry_residual(&self, a: &DMatrix<f64>) -> f64 {
        let ga = &self.metric * a;
        max_abs(&(&ga - ga.transpose()))
    }

    /// Assemble `sum_ij coeffs[i][j] * frame_i (x) g(frame_j, .)`. With a
    /// g-orthonormal frame and symmetric `coeffs` the result is g-symmetric.
    pub fn assemble(&self, frame: &[DVector<f64>], coeffs: &DMatrix<f64>) -> DMatrix<f64> {
        let dim = self.dim();
        let e = DMatrix::from_fn(dim, frame.len(), |r, c| frame[c][r]);
        &e * coeffs * e.transpose() * &self.metric
    }
}

/// The tuple `(phi, xi, eta, g)` on one tangent space.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostContactStructure {
    pub space: TangentSpace,
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    /// Components of the covector `eta`: `eta(X) = eta . X`.
    pub eta: DVector<f64>,
}

impl AlmostContactStructure {
    pub fn new(
        space: TangentSpace,
        phi: DMatrix<f64>,
        xi: DVector<f64>,
        eta: DVector<f64>,
    ) -> Result<Self> {
        let acs = Self {
            space,
            phi,
            xi,
            eta,
        };
        acs.check_dims()?;
        Ok(acs)
    }

    /// Canonical structure on `R^{2n-1}`: frame `{V_1..V_{n-1}, phiV_1.., xi}`
    /// is the standard basis.
    pub fn canonical(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::InvalidSpace(format!(
                "complex dimension must be at least 2, got {n}"
            )));
        }
        let dim = 2 * n - 1;
        let m = n - 1;
        let mut phi = DMatrix::zeros(dim, dim);
        for i in 0..m {
            phi[(m + i, i)] = 1.0;
            phi[(i, m + i)] = -1.0;
        }
        let mut xi = DVector::zeros(dim);
        xi[dim - 1] = 1.0;
        Self::new(TangentSpace::euclidean(dim)?, phi, xi.clone(), xi)
    }

    /// Canonical structure conjugated by a random rotation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let canon = Self::canonical(n)?;
        let q = random_orthogonal(canon.dim(), rng);
        Ok(canon.rotated(&q))
    }

    /// Random structure expressed in a random non-orthonormal frame.
    pub fn random_with_metric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let base = Self::random(n, rng)?;
        let dim = base.dim();
        let p = DMatrix::identity(dim, dim) + random_matrix(dim, dim, rng) * 0.25;
        base.change_frame(&p)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn complex_dim(&self) -> usize {
        self.space.complex_dim()
    }

    /// Conjugate by an orthogonal matrix `q`; only valid for the Euclidean metric.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        Self {
            space: self.space.clone(),
            phi: q * &self.phi * q.transpose(),
            xi: q * &self.xi,
            eta: q * &self.eta,
        }
    }

    /// Re-express in the frame whose vectors are the columns of `p`
    /// (given in current components).
    pub fn change_frame(&self, p: &DMatrix<f64>) -> Result<Self> {
        let dim = self.dim();
        ensure_dim("frame change rows", dim, p.nrows())?;
        ensure_dim("frame change columns", dim, p.ncols())?;
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::InvalidSpace("frame change is singular".into()))?;
        let metric = p.transpose() * self.space.metric() * p;
        // symmetrise against roundoff
        let metric = (&metric + metric.transpose()) * 0.5;
        Self::new(
            TangentSpace::with_metric(metric)?,
            &p_inv * &self.phi * p,
            &p_inv * &self.xi,
            p.transpose() * &self.eta,
        )
    }

    pub fn eta_of(&self, x: &DVector<f64>) -> f64 {
        self.eta.dot(x)
    }

    /// The operator `X -> eta(X) xi`.
    pub fn eta_xi(&self) -> DMatrix<f64> {
        &self.xi * self.eta.transpose()
    }

    /// Orthogonal projector onto `ker(eta)`.
    pub fn horizontal_projector(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim()) - self.eta_xi()
    }

    fn check_dims(&self) -> Result<()> {
        let dim = self.space.dim();
        ensure_dim("phi rows", dim, self.phi.nrows())?;
        ensure_dim("phi columns", dim, self.phi.ncols())?;
        ensure_dim("xi", dim, self.xi.len())?;
        ensure_dim("eta", dim, self.eta.len())
    }

    pub(crate) fn check_vector(&self, what: &'static str, v: &DVector<f64>) -> Result<()> {
        ensure_dim(what, self.dim(), v.len())
    }

    pub(crate) fn check_operator(&self, what: &'static str, m: &DMatrix<f64>) -> Result<()> {
        ensure_dim(what, self.dim(), m.nrows())?;
        ensure_dim(what, self.dim(), m.ncols())
    }

    /// g-orthonormal basis of `ker(eta)`, deterministic (Gram-Schmidt on the
    /// working frame).
    pub fn kernel_basis(&self) -> Vec<DVector<f64>> {
        let dim = self.dim();
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim - 1);
        let xi_unit = &self.xi / self.space.norm(&self.xi);
        for i in 0..dim {
            if basis.len() == dim - 1 {
                break;
            }
            let mut v = DVector::zeros(dim);
            v[i] = 1.0;
            let start = self.space.norm(&v);
            for _ in 0..2 {
                v -= &xi_unit * self.space.inner(&v, &xi_unit);
                for b in &basis {
                    v -= b * self.space.inner(&v, b);
                }
            }
            let len = self.space.norm(&v);
            if len > 1e-6 * start {
                basis.push(v / len);
            }
        }
        basis
    }
}

/// Per-identity max-abs residuals of the structure axioms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualMap(pub BTreeMap<&'static str, f64>);

impl ResidualMap {
    pub fn max(&self) -> f64 {
        self.0.values().fold(0.0_f64, |a, b| a.max(*b))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Residuals of `phi^2 = -I + eta (x) xi`, `eta o phi = 0`, `phi xi = 0`,
/// `eta(xi) = 1`, the metric compatibility and skewness of `phi`, and
/// `eta = g(., xi)`.
pub fn validate_acs(acs: &AlmostContactStructure) -> Result<ResidualMap> {
    acs.check_dims()?;
    let dim = acs.dim();
    let g = acs.space.metric();
    let id = DMatrix::<f64>::identity(dim, dim);
    let phi = &acs.phi;

    let mut out = BTreeMap::new();
    out.insert("phi-square", max_abs(&(phi * phi + &id - acs.eta_xi())));
    out.insert("eta-phi", max_abs_vec(&(phi.transpose() * &acs.eta)));
    out.insert("phi-xi", max_abs_vec(&(phi * &acs.xi)));
    out.insert("eta-xi", (acs.eta.dot(&acs.xi) - 1.0).abs());
    out.insert(
        "metric-compatibility",
        max_abs(&(phi.transpose() * g * phi - (g - &acs.eta * acs.eta.transpose()))),
    );
    out.insert("phi-skew", max_abs(&(g * phi + phi.transpose() * g)));
    out.insert("eta-metric", max_abs_vec(&(&acs.eta - g * &acs.xi)));
    Ok(ResidualMap(out))
}

/// An orthonormal frame `{V_1..V_{n-1}, phiV_1..phiV_{n-1}, xi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiBasis {
    vectors: Vec<DVector<f64>>,
}

impl PhiBasis {
    /// Number of `V_i`, i.e. `n - 1`.
    pub fn half(&self) -> usize {
        (self.vectors.len() - 1) / 2
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn v(&self, i: usize) -> &DVector<f64> {
        &self.vectors[i]
    }

    pub fn phi_v(&self, i: usize) -> &DVector<f64> {
        &self.vectors[self.half() + i]
    }

    pub fn xi(&self) -> &DVector<f64> {
        self.vectors.last().expect("phi-basis is never empty")
    }

    /// The horizontal part `{V_i, phiV_i}`.
    pub fn horizontal(&self) -> &[DVector<f64>] {
        &self.vectors[..self.vectors.len() - 1]
    }

    /// Gram matrix `g(e_i, e_j)`.
    pub fn gram(&self, space: &TangentSpace) -> DMatrix<f64> {
        let k = self.vectors.len();
        DMatrix::from_fn(k, k, |i, j| space.inner(&self.vectors[i], &self.vectors[j]))
    }
}

/// Relative projection size below which a seed counts as degenerate.
const SEED_TOL: f64 = 1e-9;

/// Build a phi-basis from `n - 1` seeds: each seed is projected onto the
/// g-orthogonal complement of `span{xi, V_1, phiV_1, ...}`, normalised, and
/// followed by its phi-image.
pub fn build_phi_basis(acs: &AlmostContactStructure, seeds: &[DVector<f64>]) -> Result<PhiBasis> {
    let half = acs.complex_dim() - 1;
    ensure_dim("phi-basis seeds", half, seeds.len())?;
    let space = &acs.space;
    let xi_unit = &acs.xi / space.norm(&acs.xi);
    let mut spanned: Vec<DVector<f64>> = vec![xi_unit.clone()];
    let mut vs = Vec::with_capacity(half);
    let mut phi_vs = Vec::with_capacity(half);
    for seed in seeds {
        acs.check_vector("phi-basis seed", seed)?;
        let scale = space.norm(seed);
        let mut v = seed.clone();
        for _ in 0..2 {
            for b in &spanned {
                v -= b * space.inner(&v, b);
            }
        }
        let len = space.norm(&v);
        if !(len > SEED_TOL * scale) || len == 0.0 {
            return Err(GeometryError::DegenerateSeed { norm: len });
        }
        let v = v / len;
        let pv = &acs.phi * &v;
        spanned.push(v.clone());
        spanned.push(pv.clone());
        vs.push(v);
        phi_vs.push(pv);
    }
    let mut vectors = vs;
    vectors.extend(phi_vs);
    vectors.push(xi_unit);
    Ok(PhiBasis { vectors })
}

/// Build a phi-basis from random seeds drawn from a ChaCha stream keyed by
/// `rng_seed`; degenerate draws are retried.
pub fn build_phi_basis_seeded(acs: &AlmostContactStructure, rng_seed: u64) -> Result<PhiBasis> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let half = acs.complex_dim() - 1;
    for _ in 0..64 {
        let seeds: Vec<_> = (0..half)
            .map(|_| random_vector(acs.dim(), &mut rng))
            .collect();
        match build_phi_basis(acs, &seeds) {
            Err(GeometryError::DegenerateSeed { .. }) => continue,
            other => return other,
        }
    }
    Err(GeometryError::DegenerateSeed { norm: 0.0 })
}

/// `nabla_X xi = phi A X`.
pub fn nabla_xi(
    acs: &AlmostContactStructure,
    shape: &DMatrix<f64>,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    acs.check_operator("shape operator", shape)?;
    acs.check_vector("X", x)?;
    Ok(&acs.phi * (shape * x))
}

/// `(nabla_X phi) Y = eta(Y) A X - g(A X, Y) xi`.
pub fn nabla_phi(
    acs: &AlmostContactStructure,
    shape: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    acs.check_operator("shape operator", shape)?;
    acs.check_vector("X", x)?;
    acs.check_vector("Y", y)?;
    let ax = shape * x;
    let g_ax_y = acs.space.inner(&ax, y);
    Ok(ax * acs.eta_of(y) - &acs.xi * g_ax_y)
}
