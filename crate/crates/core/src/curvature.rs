//! Gauss-equation curvature, the Jacobi structure operator `l = R(., xi)xi`,
//! the Codazzi residual, and `nabla l` from supplied `nabla A` data.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_dim, GeometryError, Result};
use crate::linalg::{max_abs, max_abs_vec, spectral_norm};
use crate::tensor_core::{AlmostContactStructure, TangentSpace};

/// Structure, shape operator and holomorphic sectional curvature `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureContext {
    acs: AlmostContactStructure,
    shape: DMatrix<f64>,
    c: f64,
}

impl CurvatureContext {
    pub fn new(acs: AlmostContactStructure, shape: DMatrix<f64>, c: f64) -> Result<Self> {
        acs.check_operator("shape operator", &shape)?;
        if c == 0.0 || !c.is_finite() {
            return Err(GeometryError::ZeroCurvature);
        }
        let residual = acs.space.symmetry_residual(&shape);
        if residual > 1e-9 * (1.0 + max_abs(&shape)) {
            return Err(GeometryError::NotSymmetric { residual });
        }
        Ok(Self { acs, shape, c })
    }

    pub fn acs(&self) -> &AlmostContactStructure {
        &self.acs
    }

    pub fn space(&self) -> &TangentSpace {
        &self.acs.space
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.acs.dim()
    }

    /// `alpha = g(A xi, xi)`.
    pub fn alpha(&self) -> f64 {
        self.space()
            .inner(&(&self.shape * &self.acs.xi), &self.acs.xi)
    }

    pub fn a_xi(&self) -> DVector<f64> {
        &self.shape * &self.acs.xi
    }

    /// A copy with a different shape operator.
    pub fn with_shape(&self, shape: DMatrix<f64>) -> Result<Self> {
        Self::new(self.acs.clone(), shape, self.c)
    }
}

/// `R(X, Y)Z` from the Gauss equation of a hypersurface in a space of
/// constant holomorphic sectional curvature `c`.
pub fn gauss_curvature(
    ctx: &CurvatureContext,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<DVector<f64>> {
    let acs = ctx.acs();
    acs.check_vector("X", x)?;
    acs.check_vector("Y", y)?;
    acs.check_vector("Z", z)?;
    Ok(gauss_unchecked(ctx, x, y, z))
}

fn gauss_unchecked(
    ctx: &CurvatureContext,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    let g = ctx.space();
    let phi = &ctx.acs().phi;
    let a = ctx.shape();
    let (phi_x, phi_y, phi_z) = (phi * x, phi * y, phi * z);
    let (ax, ay) = (a * x, a * y);
    let ambient = x * g.inner(y, z) - y * g.inner(x, z) + &phi_x * g.inner(&phi_y, z)
        - &phi_y * g.inner(&phi_x, z)
        - phi_z * (2.0 * g.inner(&phi_x, y));
    ambient * (ctx.c() / 4.0) + &ax * g.inner(&ay, z) - ay * g.inner(&ax, z)
}

/// Matrix of `X -> R(X, xi)xi`, evaluated column by column through the
/// Gauss equation.
pub fn jacobi_operator(ctx: &CurvatureContext) -> DMatrix<f64> {
    let dim = ctx.dim();
    let xi = &ctx.acs().xi;
    let mut l = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = DVector::zeros(dim);
        e[j] = 1.0;
        l.set_column(j, &gauss_unchecked(ctx, &e, xi, xi));
    }
    l
}

/// Closed form `lX = (c/4)(X - eta(X)xi) + alpha AX - g(AX, xi) A xi`.
pub fn jacobi_operator_closed_form(ctx: &CurvatureContext) -> DMatrix<f64> {
    let acs = ctx.acs();
    let a_xi = ctx.a_xi();
    acs.horizontal_projector() * (ctx.c() / 4.0) + ctx.shape() * ctx.alpha()
        - acs.space.rank_one(&a_xi, &a_xi)
}

/// Max-abs disagreement between the two routes to `l`.
pub fn jacobi_cross_check(ctx: &CurvatureContext) -> f64 {
    max_abs(&(jacobi_operator(ctx) - jacobi_operator_closed_form(ctx)))
}

/// `(X, Y) -> (nabla_X A) Y`.
pub trait NablaAProvider: Send + Sync {
    fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;
}

/// Closed form `(nabla_X A)Y = -(c/4)(eta(Y) phi X + g(phi X, Y) xi)`,
/// valid for type-A hypersurfaces.
#[derive(Debug, Clone)]
pub struct TypeANablaA {
    acs: AlmostContactStructure,
    c: f64,
    warning: Option<String>,
}

impl TypeANablaA {
    /// Set when the context it was built from is not type A; the provider is
    /// then still Codazzi-consistent but not geometric.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }
}

impl NablaAProvider for TypeANablaA {
    fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let phi_x = &self.acs.phi * x;
        let g_phix_y = self.acs.space.inner(&phi_x, y);
        (phi_x * self.acs.eta_of(y) + &self.acs.xi * g_phix_y) * (-self.c / 4.0)
    }
}

pub fn type_a_nabla_a(ctx: &CurvatureContext) -> TypeANablaA {
    let a = ctx.shape();
    let phi = &ctx.acs().phi;
    let scale = 1.0 + max_abs(a);
    let comm = max_abs(&(a * phi - phi * a));
    let a_xi = ctx.a_xi();
    let off = max_abs_vec(&(&a_xi - &ctx.acs().xi * ctx.alpha()));
    let warning = if comm > 1e-9 * scale || off > 1e-9 * scale {
        Some(format!(
            "context is not type A (|A phi - phi A| = {comm:e}, |A xi - alpha xi| = {off:e})"
        ))
    } else {
        None
    };
    TypeANablaA {
        acs: ctx.acs().clone(),
        c: ctx.c(),
        warning,
    }
}

/// Vanishing `nabla A`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroNablaA {
    pub dim: usize,
}

impl NablaAProvider for ZeroNablaA {
    fn apply(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(self.dim)
    }
}

/// Provider backed by a closure.
pub struct FnNablaA<F>(pub F);

impl<F> NablaAProvider for FnNablaA<F>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync,
{
    fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        (self.0)(x, y)
    }
}

/// Scalar function of a tangent vector.
pub type ScalarField = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// How `W(alpha)` enters `nabla_W l`.
#[derive(Clone, Default)]
pub enum AlphaDerivative {
    /// `W(alpha) = 0`, the homogeneous-model case.
    #[default]
    Zero,
    /// `W(alpha) = g((nabla_W A)xi, xi) + 2 g(A xi, phi A W)`, computed from
    /// the attached `nabla A`.
    FromConnection,
    /// Caller-supplied scalar derivative.
    Custom(ScalarField),
}

impl fmt::Debug for AlphaDerivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("Zero"),
            Self::FromConnection => f.write_str("FromConnection"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// First-order data needed to differentiate tensors along the hypersurface.
#[derive(Clone)]
pub struct Connection {
    pub nabla_a: Arc<dyn NablaAProvider>,
    pub alpha_derivative: AlphaDerivative,
}

impl Connection {
    pub fn new(nabla_a: Arc<dyn NablaAProvider>) -> Self {
        Self {
            nabla_a,
            alpha_derivative: AlphaDerivative::Zero,
        }
    }

    pub fn with_alpha_derivative(mut self, d: AlphaDerivative) -> Self {
        self.alpha_derivative = d;
        self
    }
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Connection")
            .field("alpha_derivative", &self.alpha_derivative)
            .finish_non_exhaustive()
    }
}

/// `(nabla_X A)Y - (nabla_Y A)X - (c/4)[eta(X)phiY - eta(Y)phiX - 2g(phiX, Y)xi]`.
pub fn codazzi_residual(
    ctx: &CurvatureContext,
    nabla_a: &dyn NablaAProvider,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    let acs = ctx.acs();
    acs.check_vector("X", x)?;
    acs.check_vector("Y", y)?;
    let phi_x = &acs.phi * x;
    let phi_y = &acs.phi * y;
    let rhs = (phi_y * acs.eta_of(x)
        - phi_x.clone() * acs.eta_of(y)
        - &acs.xi * (2.0 * acs.space.inner(&phi_x, y)))
        * (ctx.c() / 4.0);
    Ok(nabla_a.apply(x, y) - nabla_a.apply(y, x) - rhs)
}

/// Matrix of `X -> (nabla_W l)X`, from the product rule applied to the
/// closed form of `l`, with `nabla_W xi = phi A W` and
/// `(nabla_W eta)X = g(X, phi A W)`.
pub fn nabla_l(
    ctx: &CurvatureContext,
    connection: Option<&Connection>,
    w: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let conn = connection.ok_or_else(|| {
        GeometryError::Unsupported(
            "nabla l needs nabla A data; this instance is pointwise only".into(),
        )
    })?;
    let acs = ctx.acs();
    acs.check_vector("W", w)?;
    let dim = ctx.dim();
    let space = &acs.space;
    let a = ctx.shape();
    let xi = &acs.xi;
    let alpha = ctx.alpha();
    let a_xi = ctx.a_xi();

    let nabla_w_xi = &acs.phi * (a * w);
    let nabla_w_a = operator_of(dim, |x| conn.nabla_a.apply(w, x));
    // nabla_W (A xi)
    let nabla_w_axi = &nabla_w_a * xi + a * &nabla_w_xi;
    let w_alpha = match &conn.alpha_derivative {
        AlphaDerivative::Zero => 0.0,
        AlphaDerivative::FromConnection => {
            space.inner(&(&nabla_w_a * xi), xi) + 2.0 * space.inner(&a_xi, &nabla_w_xi)
        }
        AlphaDerivative::Custom(f) => f(w),
    };

    let projector_part =
        (space.rank_one(xi, &nabla_w_xi) + space.rank_one(&nabla_w_xi, xi)) * (-ctx.c() / 4.0);
    let alpha_part = a * w_alpha + nabla_w_a * alpha;
    let rank_one_part = space.rank_one(&a_xi, &nabla_w_axi) + space.rank_one(&nabla_w_axi, &a_xi);
    Ok(projector_part + alpha_part - rank_one_part)
}

/// `PQ - QP`.
pub fn commutator(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_dim("commutator rows", p.nrows(), q.nrows())?;
    ensure_dim("commutator columns", p.ncols(), q.ncols())?;
    ensure_dim("commutator square", p.nrows(), p.ncols())?;
    Ok(crate::linalg::commutator(p, q))
}

/// Frobenius and spectral norms of an endomorphism, measured in a
/// g-orthonormal frame. Identity checks decide pass/fail with the spectral
/// norm restricted to the tested subspace; the Frobenius norm only sets the
/// scale of relative thresholds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OperatorNorms {
    pub frobenius: f64,
    pub spectral: f64,
}

pub fn operator_norms(space: &TangentSpace, m: &DMatrix<f64>) -> OperatorNorms {
    let mo = space.operator_to_orthonormal(m);
    OperatorNorms {
        frobenius: mo.norm(),
        spectral: spectral_norm(&mo),
    }
}

fn operator_of(dim: usize, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = DVector::zeros(dim);
        e[j] = 1.0;
        m.set_column(j, &f(&e));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_symmetric, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(dim: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    fn flat_ctx(n: usize, c: f64) -> CurvatureContext {
        let acs = AlmostContactStructure::canonical(n).unwrap();
        let dim = acs.dim();
        CurvatureContext::new(acs, DMatrix::zeros(dim, dim), c).unwrap()
    }

    #[test]
    fn context_rejects_bad_input() {
        let acs = AlmostContactStructure::canonical(2).unwrap();
        assert_eq!(
            CurvatureContext::new(acs.clone(), DMatrix::zeros(3, 3), 0.0),
            Err(GeometryError::ZeroCurvature)
        );
        let mut a = DMatrix::zeros(3, 3);
        a[(0, 1)] = 1.0;
        assert!(matches!(
            CurvatureContext::new(acs.clone(), a, 4.0),
            Err(GeometryError::NotSymmetric { .. })
        ));
        assert!(CurvatureContext::new(acs, DMatrix::zeros(5, 5), 4.0).is_err());
    }

    #[test]
    fn gauss_is_zero_on_equal_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let acs = AlmostContactStructure::random(3, &mut rng).unwrap();
        let ctx = CurvatureContext::new(acs, random_symmetric(5, 1.0, &mut rng), -4.0).unwrap();
        let x = random_vector(5, &mut rng);
        let z = random_vector(5, &mut rng);
        assert!(max_abs_vec(&gauss_curvature(&ctx, &x, &x, &z).unwrap()) < 1e-15);
    }

    #[test]
    fn holomorphic_and_orthogonal_sectional_curvature() {
        let ctx = flat_ctx(3, 4.0);
        // X = V1, phiX = phiV1, Y = V2 (g(phiX, Y) = 0)
        let x = e(5, 0);
        let phi_x = e(5, 2);
        let r = gauss_curvature(&ctx, &x, &phi_x, &phi_x).unwrap();
        assert!(max_abs_vec(&(r - &x * 4.0)) < 1e-15);
        let y = e(5, 1);
        let r = gauss_curvature(&ctx, &x, &y, &y).unwrap();
        assert!(max_abs_vec(&(r - &x)) < 1e-15);
    }

    #[test]
    fn jacobi_operator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let acs = AlmostContactStructure::random(3, &mut rng).unwrap();
        let ctx = CurvatureContext::new(acs, random_symmetric(5, 2.0, &mut rng), 3.0).unwrap();
        let l = jacobi_operator(&ctx);
        assert!(max_abs_vec(&(&l * &ctx.acs().xi)) < 1e-14);
        assert!(jacobi_cross_check(&ctx) < 1e-13);

        // Hopf with alpha = 0: l = (c/4)(I - eta (x) xi)
        let ctx = CurvatureContext::new(
            AlmostContactStructure::canonical(2).unwrap(),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.7, -1.3, 0.0])),
            4.0,
        )
        .unwrap();
        let expected = ctx.acs().horizontal_projector();
        assert!(max_abs(&(jacobi_operator(&ctx) - expected)) < 1e-15);
    }

    #[test]
    fn type_a_provider_examples() {
        let ctx = flat_ctx(2, 4.0)
            .with_shape(DMatrix::identity(3, 3))
            .unwrap();
        let p = type_a_nabla_a(&ctx);
        assert!(p.warning().is_none());
        let xi = ctx.acs().xi.clone();
        for i in 0..3 {
            assert_eq!(p.apply(&xi, &e(3, i)), DVector::zeros(3));
        }
        // X = U in ker(eta), Y = xi, c = 4: -phi U
        let u = e(3, 0);
        assert_eq!(p.apply(&u, &xi), -(&ctx.acs().phi * &u));
    }

    #[test]
    fn type_a_provider_flags_non_type_a_context() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 0.5]));
        let ctx = flat_ctx(2, 4.0).with_shape(a).unwrap();
        assert!(type_a_nabla_a(&ctx).warning().is_some());
    }

    #[test]
    fn codazzi_examples() {
        let ctx = flat_ctx(3, 4.0)
            .with_shape(DMatrix::identity(5, 5))
            .unwrap();
        let provider = type_a_nabla_a(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_vector(5, &mut rng);
        let y = random_vector(5, &mut rng);
        assert!(max_abs_vec(&codazzi_residual(&ctx, &provider, &x, &x).unwrap()) < 1e-15);
        assert!(max_abs_vec(&codazzi_residual(&ctx, &provider, &x, &y).unwrap()) < 1e-12);

        // nabla A = 0, X = xi, Y unit horizontal: residual -(c/4) phi Y
        let zero = ZeroNablaA { dim: 5 };
        let yh = e(5, 1);
        let res = codazzi_residual(&ctx, &zero, &ctx.acs().xi, &yh).unwrap();
        assert!(max_abs_vec(&(res + &ctx.acs().phi * &yh)) < 1e-15);
    }

    #[test]
    fn nabla_l_examples() {
        let ctx = flat_ctx(3, 4.0);
        let zero = Connection::new(Arc::new(ZeroNablaA { dim: 5 }));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_vector(5, &mut rng);
        assert_eq!(max_abs(&nabla_l(&ctx, Some(&zero), &w).unwrap()), 0.0);

        let ctx = ctx.with_shape(DMatrix::identity(5, 5)).unwrap();
        let conn = Connection::new(Arc::new(type_a_nabla_a(&ctx)));
        let m = nabla_l(&ctx, Some(&conn), &ctx.acs().xi).unwrap();
        assert!(max_abs(&m) < 1e-15);

        assert!(matches!(
            nabla_l(&ctx, None, &w),
            Err(GeometryError::Unsupported(_))
        ));
    }

    #[test]
    fn commutator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_symmetric(5, 1.0, &mut rng);
        assert_eq!(max_abs(&commutator(&p, &p).unwrap()), 0.0);
        assert!(commutator(&p, &DMatrix::zeros(3, 3)).is_err());

        // alpha = 0, beta = 1: A = U (x) eta + xi (x) U
        let ctx = flat_ctx(2, 4.0);
        let acs = ctx.acs();
        let u = e(3, 0);
        let a = acs.space.rank_one(&u, &acs.xi) + acs.space.rank_one(&acs.xi, &u);
        let norms = operator_norms(&acs.space, &commutator(&acs.phi, &a).unwrap());
        assert!((norms.spectral - 1.0).abs() < 1e-14);
        assert!((norms.frobenius - 2f64.sqrt()).abs() < 1e-14);
    }
}
