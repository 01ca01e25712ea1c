//! Hypothesis predicates: the Hopf decomposition of `A xi`, the commutation
//! conditions `phi l = l phi`, `lA = Al`, `nabla_xi l = mu xi`, the class
//! labels A-D, and the pipeline that turns `phi l = l phi` on a Hopf context
//! into `A phi = phi A`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::{jacobi_operator, nabla_l, operator_norms, Connection, CurvatureContext};
use crate::error::{GeometryError, Result};
use crate::linalg::{max_abs, spectral_norm};
use crate::tensor_core::{build_phi_basis_seeded, AlmostContactStructure, TangentSpace};

/// Default relative tolerance for declaring a context Hopf.
pub const HOPF_TOL: f64 = 1e-9;

/// `A xi = alpha xi + beta U` with `U` a unit vector in `ker(eta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfDecomposition {
    pub alpha: f64,
    pub beta: f64,
    pub u: Option<DVector<f64>>,
    pub hopf: bool,
}

impl HopfDecomposition {
    pub fn reconstruct(&self, xi: &DVector<f64>) -> DVector<f64> {
        match &self.u {
            Some(u) => xi * self.alpha + u * self.beta,
            None => xi * self.alpha,
        }
    }

    /// `alpha = 0` together with `beta = 0`: the vanishing principal
    /// curvature edge case.
    pub fn a_xi_vanishes(&self, tol: f64) -> bool {
        self.hopf && self.alpha.abs() <= tol
    }
}

pub fn decompose_a_xi(ctx: &CurvatureContext) -> HopfDecomposition {
    decompose_a_xi_with(ctx, HOPF_TOL)
}

/// Hopf when `beta <= rel_tol * (1 + |A|)`.
pub fn decompose_a_xi_with(ctx: &CurvatureContext, rel_tol: f64) -> HopfDecomposition {
    let space = ctx.space();
    let xi = &ctx.acs().xi;
    let a_xi = ctx.a_xi();
    let alpha = space.inner(&a_xi, xi);
    let p = a_xi - xi * alpha;
    let beta = space.norm(&p);
    let threshold = rel_tol * (1.0 + operator_norms(space, ctx.shape()).frobenius);
    if beta > threshold {
        HopfDecomposition {
            alpha,
            beta,
            u: Some(p / beta),
            hopf: false,
        }
    } else {
        HopfDecomposition {
            alpha,
            beta,
            u: None,
            hopf: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Subspace {
    #[serde(rename = "ker-eta")]
    KerEta,
    #[serde(rename = "span-xi")]
    SpanXi,
    #[serde(rename = "all")]
    All,
}

impl Subspace {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::KerEta => "ker-eta",
            Self::SpanXi => "span-xi",
            Self::All => "all",
        }
    }

    /// A g-orthonormal basis of the subspace.
    pub fn basis(self, acs: &AlmostContactStructure) -> Vec<DVector<f64>> {
        let xi_unit = &acs.xi / acs.space.norm(&acs.xi);
        match self {
            Self::KerEta => acs.kernel_basis(),
            Self::SpanXi => vec![xi_unit],
            Self::All => {
                let mut b = acs.kernel_basis();
                b.push(xi_unit);
                b
            }
        }
    }
}

impl std::fmt::Display for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub subspace: Subspace,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_spread: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ConditionReport {
    fn new(name: &str, subspace: Subspace, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            subspace,
            residual,
            mu: None,
            mu_spread: None,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

/// `sup |M X|` over unit `X` in the span of a g-orthonormal `basis`.
pub fn restricted_norm(space: &TangentSpace, m: &DMatrix<f64>, basis: &[DVector<f64>]) -> f64 {
    if basis.is_empty() {
        return 0.0;
    }
    let cols: Vec<DVector<f64>> = basis
        .iter()
        .map(|b| space.to_orthonormal(&(m * b)))
        .collect();
    spectral_norm(&DMatrix::from_columns(&cols))
}

pub fn check_phi_l_commute(
    ctx: &CurvatureContext,
    subspace: Subspace,
    tol: f64,
) -> ConditionReport {
    let phi = &ctx.acs().phi;
    let l = jacobi_operator(ctx);
    let m = phi * &l - &l * phi;
    let residual = restricted_norm(ctx.space(), &m, &subspace.basis(ctx.acs()));
    ConditionReport::new("phi-l-commute", subspace, residual, tol)
}

/// `lA = Al` on the subspace; on `span{xi}` this reads `lA xi = Al xi`.
pub fn check_l_a_commute(ctx: &CurvatureContext, subspace: Subspace, tol: f64) -> ConditionReport {
    let l = jacobi_operator(ctx);
    let a = ctx.shape();
    let m = &l * a - a * &l;
    let residual = restricted_norm(ctx.space(), &m, &subspace.basis(ctx.acs()));
    ConditionReport::new("l-A-commute", subspace, residual, tol)
}

/// Strict reading on `span{xi}`: `lA xi = Al xi` and `A` preserves `span{xi}`.
pub fn check_l_a_commute_strict(ctx: &CurvatureContext, tol: f64) -> ConditionReport {
    let mut report = check_l_a_commute(ctx, Subspace::SpanXi, tol);
    let dec = decompose_a_xi(ctx);
    report.name = "l-A-commute-strict".into();
    report.residual = report.residual.max(dec.beta);
    report.pass = report.residual <= tol;
    report
}

/// `(nabla_xi l)X = mu xi` for the basis of the subspace, with `mu` fitted
/// per basis vector as `g((nabla_xi l)X, xi)`.
pub fn check_nabla_xi_l(
    ctx: &CurvatureContext,
    connection: Option<&Connection>,
    subspace: Subspace,
    tol: f64,
) -> Result<ConditionReport> {
    let acs = ctx.acs();
    let space = ctx.space();
    let m = nabla_l(ctx, connection, &acs.xi)?;
    let basis = subspace.basis(acs);
    let xi_sq = space.inner(&acs.xi, &acs.xi);
    let mus: Vec<f64> = basis
        .iter()
        .map(|x| space.inner(&(&m * x), &acs.xi) / xi_sq)
        .collect();
    let transverse = acs.horizontal_projector() * &m;
    let residual = restricted_norm(space, &transverse, &basis);
    let mean = mus.iter().sum::<f64>() / mus.len() as f64;
    let (lo, hi) = mus
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    let mut report = ConditionReport::new("nabla-xi-l", subspace, residual, tol);
    report.mu = Some(mean);
    report.mu_spread = Some(hi - lo);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClassLabel {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassStatus {
    Holds,
    Fails,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub status: BTreeMap<ClassLabel, ClassStatus>,
    pub checks: Vec<ConditionReport>,
}

impl Classification {
    /// Labels whose defining conditions all pass.
    pub fn labels(&self) -> BTreeSet<ClassLabel> {
        self.status
            .iter()
            .filter(|(_, s)| **s == ClassStatus::Holds)
            .map(|(l, _)| *l)
            .collect()
    }
}

/// Evaluate the four class definitions. Classes C and D need `nabla A`;
/// without it they are `Unknown`.
pub fn classify(
    ctx: &CurvatureContext,
    connection: Option<&Connection>,
    tol: f64,
) -> Classification {
    let phi_l = check_phi_l_commute(ctx, Subspace::KerEta, tol);
    let la_ker = check_l_a_commute(ctx, Subspace::KerEta, tol);
    let la_xi = check_l_a_commute(ctx, Subspace::SpanXi, tol);
    let holds = |a: bool, b: bool| {
        if a && b {
            ClassStatus::Holds
        } else {
            ClassStatus::Fails
        }
    };
    let mut status = BTreeMap::new();
    status.insert(ClassLabel::A, holds(phi_l.pass, la_ker.pass));
    status.insert(ClassLabel::B, holds(phi_l.pass, la_xi.pass));
    let mut checks = vec![phi_l.clone(), la_ker, la_xi];
    match connection {
        Some(conn) => {
            // nabla_l only fails without a connection, which is excluded here
            let nk = check_nabla_xi_l(ctx, Some(conn), Subspace::KerEta, tol)
                .expect("connection is present");
            let nx = check_nabla_xi_l(ctx, Some(conn), Subspace::SpanXi, tol)
                .expect("connection is present");
            status.insert(ClassLabel::C, holds(phi_l.pass, nk.pass));
            status.insert(ClassLabel::D, holds(phi_l.pass, nx.pass));
            checks.push(nk);
            checks.push(nx);
        }
        None => {
            status.insert(ClassLabel::C, ClassStatus::Unknown);
            status.insert(ClassLabel::D, ClassStatus::Unknown);
        }
    }
    Classification { status, checks }
}

/// `(phi l - l phi) - alpha (phi A - A phi)`, max-abs; vanishes on every
/// Hopf context.
pub fn hopf_identity_residual(ctx: &CurvatureContext) -> f64 {
    let phi = &ctx.acs().phi;
    let a = ctx.shape();
    let l = jacobi_operator(ctx);
    let lhs = phi * &l - &l * phi;
    let rhs = (phi * a - a * phi) * ctx.alpha();
    max_abs(&(lhs - rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `phi l = l phi` and `A phi = phi A`.
    TypeACompatible,
    /// `phi l = l phi` fails.
    HypothesisFails,
    /// `alpha = 0`: `phi l = l phi` holds automatically and says nothing
    /// about `A phi - phi A`.
    Indeterminate,
    /// `phi l = l phi` holds to tolerance but `A phi != phi A`; only possible
    /// when `alpha` is too small to transfer the tolerance.
    NotTypeA,
}

impl Verdict {
    pub fn describe(self) -> &'static str {
        match self {
            Self::TypeACompatible => "type-A-compatible",
            Self::HypothesisFails => "hypothesis phi l = l phi fails",
            Self::Indeterminate => "indeterminate: technical assumption eta(A xi) != 0 violated",
            Self::NotTypeA => "phi l = l phi within tolerance but A phi != phi A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub hopf: bool,
    pub alpha: f64,
    /// Spectral norm of `A phi - phi A`.
    pub commutator_a_phi_norm: f64,
    /// `sup |(phi l - l phi)X|` over unit horizontal `X`.
    pub phi_l_residual: f64,
    /// Max over the phi-basis of `|(phi l - l phi)X - alpha(phi A - A phi)X|`.
    pub identity_residual: f64,
    /// `|(A phi - phi A) xi|`.
    pub xi_residual: f64,
    pub verdict: Verdict,
}

/// On a Hopf context, walk a phi-basis and compare `(phi l - l phi)` with
/// `alpha (phi A - A phi)` on each `V_i`, `phi V_i`, then check `xi`.
pub fn theorem_pipeline(ctx: &CurvatureContext, tol: f64) -> Result<PipelineReport> {
    let dec = decompose_a_xi_with(ctx, tol);
    if !dec.hopf {
        return Err(GeometryError::Precondition(format!(
            "context is not Hopf (beta = {:e})",
            dec.beta
        )));
    }
    let acs = ctx.acs();
    let space = ctx.space();
    let basis = build_phi_basis_seeded(acs, 0)?;
    let phi = &acs.phi;
    let a = ctx.shape();
    let l = jacobi_operator(ctx);
    let phi_l = phi * &l - &l * phi;
    let phi_a = phi * a - a * phi;
    let alpha = dec.alpha;

    let identity_residual = basis
        .horizontal()
        .iter()
        .map(|x| space.norm(&(&phi_l * x - (&phi_a * x) * alpha)))
        .fold(0.0_f64, f64::max);
    let phi_l_residual = restricted_norm(space, &phi_l, basis.horizontal());
    let xi_residual = space.norm(&(&phi_a * basis.xi()));
    let commutator_a_phi_norm = operator_norms(space, &phi_a).spectral;
    let scale = 1.0 + operator_norms(space, a).frobenius;

    let verdict = if phi_l_residual > tol {
        Verdict::HypothesisFails
    } else if alpha.abs() <= tol * scale {
        Verdict::Indeterminate
    } else if commutator_a_phi_norm <= tol {
        Verdict::TypeACompatible
    } else {
        Verdict::NotTypeA
    };
    Ok(PipelineReport {
        hopf: true,
        alpha,
        commutator_a_phi_norm,
        phi_l_residual,
        identity_residual,
        xi_residual,
        verdict,
    })
}
