//! Scalar encodings of the auxiliary derivation for non-Hopf points
//! (`beta != 0`) of classes A-D: the `alpha = 0` pointwise law, the shape and
//! connection rows on `span{xi, U, phiU}`, the first-order jet relations, and
//! the arithmetic certificate showing no such point exists.
//!
//! A [`LocalJet`] carries the pointwise scalars (`alpha`, `beta`, `gamma`,
//! `lambda`, `kappa_i = g(W_i, phiU)`) and directional derivatives of `alpha`
//! and `beta`; [`jet_residuals`] evaluates every encoded relation as an
//! absolute residual.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::{jacobi_operator, CurvatureContext};
use crate::error::{GeometryError, Result};
use crate::hopf::restricted_norm;
use crate::tensor_core::AlmostContactStructure;

/// Default tolerance for jet residual rows.
pub const JET_TOL: f64 = 1e-12;

/// The `alpha = 0` configuration in dimension 3:
/// `A = beta (U (x) eta + xi (x) U)`, `U = e_0`.
pub fn pointwise_context(c: f64, beta: f64) -> Result<CurvatureContext> {
    let acs = AlmostContactStructure::canonical(2)?;
    let mut u = DVector::zeros(3);
    u[0] = 1.0;
    let a = (acs.space.rank_one(&u, &acs.xi) + acs.space.rank_one(&acs.xi, &u)) * beta;
    CurvatureContext::new(acs, a, c)
}

/// `sup |(phi l - l phi)X|` over unit `X` in `span{U, phiU}` of the
/// `alpha = 0` configuration, evaluated on the constructed operators.
pub fn pointwise_commutator_norm(c: f64, beta: f64) -> Result<f64> {
    let ctx = pointwise_context(c, beta)?;
    let acs = ctx.acs();
    let u = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let phi_u = &acs.phi * &u;
    let l = jacobi_operator(&ctx);
    let m = &acs.phi * &l - &l * &acs.phi;
    Ok(restricted_norm(ctx.space(), &m, &[u, phi_u]))
}

/// Components of a vector in `span{xi, U, phiU}` plus the unresolved fields
/// `W_i`, `phiW_i`, keyed by name.
pub type Combination = BTreeMap<&'static str, f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionRow {
    /// Differentiation direction: `xi`, `U` or `phiU`.
    pub direction: &'static str,
    /// Differentiated field: `xi`, `U` or `phiU`.
    pub field: &'static str,
    pub value: Combination,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeRows {
    /// `AU = au_u U + au_xi xi`.
    pub au_u: f64,
    pub au_xi: f64,
    /// `A phiU = a_phi_u phiU`.
    pub a_phi_u: f64,
    /// Nine rows `nabla_direction field`.
    pub connection: Vec<ConnectionRow>,
}

impl ShapeRows {
    pub fn row(&self, direction: &str, field: &str) -> Option<&Combination> {
        self.connection
            .iter()
            .find(|r| r.direction == direction && r.field == field)
            .map(|r| &r.value)
    }
}

fn combo(terms: &[(&'static str, f64)]) -> Combination {
    terms.iter().copied().filter(|(_, v)| *v != 0.0).collect()
}

/// Shape operator on `U`, `phiU` and the Levi-Civita rows on
/// `{xi, U, phiU}` at a point with `A xi = alpha xi + beta U`, `gamma = lambda = 0`.
pub fn shape_rows(alpha: f64, beta: f64, c: f64) -> Result<ShapeRows> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(GeometryError::Domain("alpha must be nonzero".into()));
    }
    let q = c / (4.0 * alpha);
    let au_u = beta * beta / alpha - q;
    let row = |direction, field, terms: &[(&'static str, f64)]| ConnectionRow {
        direction,
        field,
        value: combo(terms),
    };
    let connection = vec![
        row("xi", "xi", &[("phiU", beta)]),
        row("U", "xi", &[("phiU", au_u)]),
        row("phiU", "xi", &[("U", q)]),
        row("xi", "U", &[("W1", 1.0)]),
        row("U", "U", &[("W2", 1.0)]),
        row("phiU", "U", &[("W3", 1.0), ("xi", -q)]),
        row("xi", "phiU", &[("phiW1", 1.0), ("xi", -beta)]),
        row("U", "phiU", &[("phiW2", 1.0), ("xi", -au_u)]),
        row("phiU", "phiU", &[("phiW3", 1.0)]),
    ];
    Ok(ShapeRows {
        au_u,
        au_xi: beta,
        a_phi_u: -q,
        connection,
    })
}

/// `(kappa1, kappa2)` with `kappa1 = g(nabla_xi U, phiU)` and
/// `kappa2 = g(nabla_U U, phiU)`.
pub fn jet_kappas(alpha: f64, beta: f64, c: f64) -> Result<(f64, f64)> {
    if alpha == 0.0 || beta == 0.0 {
        return Err(GeometryError::Domain(
            "alpha and beta must be nonzero".into(),
        ));
    }
    let q = c / (4.0 * alpha);
    let kappa2 = -4.0 * beta + (c / (4.0 * alpha * beta)) * (q - beta * beta / alpha);
    Ok((-4.0 * alpha, kappa2))
}

/// Directional derivatives of a scalar along `xi`, `U`, `phiU`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Derivatives {
    pub xi: f64,
    pub u: f64,
    pub phi_u: f64,
}

/// Pointwise first-order data at a point where `beta != 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalJet {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub d_alpha: Derivatives,
    pub d_beta: Derivatives,
    /// `phiU(xi beta)`.
    pub phi_u_xi_beta: f64,
    /// `phiU(U alpha)`.
    pub phi_u_u_alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w1_norm_sq: Option<f64>,
    /// `(phiW2 alpha)`, `(W3 alpha)`, `(phiW1 beta)`: optional rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_w2_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w3_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_w1_beta: Option<f64>,
}

impl LocalJet {
    /// Jet satisfying every first-order relation for the given `kappa3`:
    /// derivatives along `xi` and `U` from the `kappa3` laws, `phiU`
    /// derivatives back-solved, `kappa1`, `kappa2` from [`jet_kappas`],
    /// and second derivatives from the bracket relations. Optional rows are
    /// filled too.
    pub fn consistent(alpha: f64, beta: f64, c: f64, kappa3: f64) -> Result<Self> {
        let jet = Self::unchecked(alpha, beta, c, kappa3)?;
        jet.validate()?;
        Ok(jet)
    }

    fn unchecked(alpha: f64, beta: f64, c: f64, kappa3: f64) -> Result<Self> {
        let (kappa1, kappa2) = jet_kappas(alpha, beta, c)?;
        let (a, b, k) = (alpha, beta, kappa3);
        let q = c / (4.0 * a);
        let d_alpha = Derivatives {
            xi: 4.0 * a * a * b * k / c,
            u: 4.0 * a * b * b * k / c,
            phi_u: 3.0 * b * c / (4.0 * a) + a * b + kappa1 * b,
        };
        let d_beta = Derivatives {
            xi: 4.0 * a * b * b * k / c,
            u: (b + 4.0 * b.powi(3) / c) * k,
            phi_u: q * (b * b / a - q) + b * b + kappa1 * b * b / a,
        };
        Ok(Self {
            alpha,
            beta,
            c,
            gamma: 0.0,
            lambda: 0.0,
            kappa1,
            kappa2,
            kappa3,
            d_alpha,
            d_beta,
            phi_u_xi_beta: b * k * (3.0 * q + b * b / a - 4.0 * a - 36.0 * a * b * b / c),
            phi_u_u_alpha: b * k * (7.0 * q - 8.0 * a - 36.0 * a * b * b / c - b * b / a),
            w1_norm_sq: None,
            phi_w2_alpha: Some(k * (16.0 * a * b.powi(3) / c + b * (b * b / a - q))),
            w3_alpha: Some(3.0 * b * (q - a) * k),
            phi_w1_beta: Some(4.0 * a * k * (b + 4.0 * b.powi(3) / c)),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(GeometryError::InvalidSpec(format!(
                "jet needs beta > 0, got {}",
                self.beta
            )));
        }
        if self.alpha == 0.0 || !self.alpha.is_finite() {
            return Err(GeometryError::InvalidSpec("jet needs alpha != 0".into()));
        }
        if self.c == 0.0 || !self.c.is_finite() {
            return Err(GeometryError::InvalidSpec("jet needs c != 0".into()));
        }
        if let Some(w) = self.w1_norm_sq {
            if w < 0.0 {
                return Err(GeometryError::InvalidSpec(
                    "|W1|^2 must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Parse from flat key-value pairs. `alpha`, `beta`, `c` are required;
    /// with `consistent = true` the remaining fields start from
    /// [`LocalJet::consistent`] (using `kappa3`, default 0) and explicit keys
    /// override them, otherwise they default to 0.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let num =
            |key: &str| -> Result<Option<f64>> {
                match pairs.get(key) {
                    None => Ok(None),
                    Some(v) => v.trim().parse::<f64>().map(Some).map_err(|_| {
                        GeometryError::InvalidSpec(format!("cannot parse {key} = {v:?}"))
                    }),
                }
            };
        let need = |key: &str| -> Result<f64> {
            num(key)?.ok_or_else(|| GeometryError::InvalidSpec(format!("missing {key}")))
        };
        let (alpha, beta, c) = (need("alpha")?, need("beta")?, need("c")?);
        let kappa3 = num("kappa3")?.unwrap_or(0.0);
        let base = match pairs.get("consistent").map(|s| s.trim()) {
            Some("true") => Self::unchecked(alpha, beta, c, kappa3)?,
            None | Some("false") => Self {
                alpha,
                beta,
                c,
                gamma: 0.0,
                lambda: 0.0,
                kappa1: 0.0,
                kappa2: 0.0,
                kappa3,
                d_alpha: Derivatives::default(),
                d_beta: Derivatives::default(),
                phi_u_xi_beta: 0.0,
                phi_u_u_alpha: 0.0,
                w1_norm_sq: None,
                phi_w2_alpha: None,
                w3_alpha: None,
                phi_w1_beta: None,
            },
            Some(other) => {
                return Err(GeometryError::InvalidSpec(format!(
                    "consistent must be true or false, got {other:?}"
                )))
            }
        };
        let mut jet = base;
        let set = |slot: &mut f64, key: &str| -> Result<()> {
            if let Some(v) = num(key)? {
                *slot = v;
            }
            Ok(())
        };
        set(&mut jet.gamma, "gamma")?;
        set(&mut jet.lambda, "lambda")?;
        set(&mut jet.kappa1, "kappa1")?;
        set(&mut jet.kappa2, "kappa2")?;
        set(&mut jet.d_alpha.xi, "xi_alpha")?;
        set(&mut jet.d_alpha.u, "u_alpha")?;
        set(&mut jet.d_alpha.phi_u, "phi_u_alpha")?;
        set(&mut jet.d_beta.xi, "xi_beta")?;
        set(&mut jet.d_beta.u, "u_beta")?;
        set(&mut jet.d_beta.phi_u, "phi_u_beta")?;
        set(&mut jet.phi_u_xi_beta, "phi_u_xi_beta")?;
        set(&mut jet.phi_u_u_alpha, "phi_u_u_alpha")?;
        for (slot, key) in [
            (&mut jet.w1_norm_sq, "w1_norm_sq"),
            (&mut jet.phi_w2_alpha, "phi_w2_alpha"),
            (&mut jet.w3_alpha, "w3_alpha"),
            (&mut jet.phi_w1_beta, "phi_w1_beta"),
        ] {
            if let Some(v) = num(key)? {
                *slot = Some(v);
            }
        }
        jet.validate()?;
        Ok(jet)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetResidualReport {
    /// `|sum of terms| / scale` per row.
    pub residuals: BTreeMap<&'static str, f64>,
    /// `max(1, largest |term|)` per row. Residuals are relative to the
    /// magnitudes being cancelled: terms of size ~1e3 cannot cancel below
    /// ~1e-13 in absolute terms.
    pub scales: BTreeMap<&'static str, f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl JetResidualReport {
    pub fn max(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, v| m.max(*v))
    }

    /// Unnormalised `|sum of terms|` for `row`.
    pub fn absolute(&self, row: &str) -> Option<f64> {
        Some(self.residuals.get(row)? * self.scales.get(row)?)
    }

    /// Rows above tolerance.
    pub fn failing(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .filter(|(_, v)| **v > self.tolerance)
            .map(|(k, _)| *k)
            .collect()
    }
}

pub fn jet_residuals(jet: &LocalJet) -> JetResidualReport {
    jet_residuals_with(jet, JET_TOL)
}

pub fn jet_residuals_with(jet: &LocalJet, tol: f64) -> JetResidualReport {
    let (a, b, c) = (jet.alpha, jet.beta, jet.c);
    let (k1, k2, k3) = (jet.kappa1, jet.kappa2, jet.kappa3);
    let da = jet.d_alpha;
    let db = jet.d_beta;
    let q = c / (4.0 * a);
    let (kappa1, kappa2) = jet_kappas(a, b, c).unwrap_or((f64::NAN, f64::NAN));
    let mut r: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut scales: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut row = |name: &'static str, terms: &[f64]| {
        let scale = terms.iter().fold(1.0_f64, |m, t| m.max(t.abs()));
        r.insert(name, terms.iter().sum::<f64>().abs() / scale);
        scales.insert(name, scale);
    };
    row("gamma-vanishes", &[jet.gamma]);
    row("lambda-vanishes", &[jet.lambda]);
    row("kappa1", &[k1, -kappa1]);
    row("kappa2", &[k2, -kappa2]);
    row("u-alpha-equals-xi-beta", &[da.u, -db.xi]);
    row(
        "u-beta-transport",
        &[
            db.u,
            -2.0 * b * db.xi / a,
            (b * b - c / 4.0) * da.xi / (a * a),
        ],
    );
    row(
        "phi-u-alpha",
        &[da.phi_u, -3.0 * b * c / (4.0 * a), -a * b, -k1 * b],
    );
    row(
        "phi-u-beta",
        &[db.phi_u, -q * (b * b / a - q), -b * b, -k1 * b * b / a],
    );
    row(
        "w1-commute-u",
        &[-2.0 * k1 * b * b, a * b * k2, a * db.phi_u, -a * b * b],
    );
    row(
        "w1-commute-u-eliminated",
        &[
            -2.0 * b * da.phi_u,
            3.0 * b * b * c / (2.0 * a),
            a * b * b,
            a * b * k2,
            a * db.phi_u,
        ],
    );
    // the last three terms are phiU(c/(4 alpha) - beta^2/alpha)
    row(
        "codazzi-u-phi-u",
        &[
            k2 * b * b / a,
            -3.0 * b * c / (4.0 * a),
            b.powi(3) / a,
            -c / (4.0 * a * a) * da.phi_u,
            -2.0 * b / a * db.phi_u,
            b * b / (a * a) * da.phi_u,
        ],
    );
    row(
        "codazzi-u-phi-u-expanded",
        &[
            -3.0 * b * b / (a * a) * da.phi_u,
            c / (4.0 * a * a) * da.phi_u,
            3.0 * b / a * db.phi_u,
            3.0 * b.powi(3) * c / (2.0 * a.powi(3)),
            3.0 * b * c / (4.0 * a),
        ],
    );
    row("xi-alpha", &[da.xi, -4.0 * a * a * b * k3 / c]);
    row("xi-beta", &[db.xi, -4.0 * a * b * b * k3 / c]);
    row("u-beta", &[db.u, -b * k3, -4.0 * b.powi(3) * k3 / c]);
    row(
        "phi-u-xi-beta",
        &[
            jet.phi_u_xi_beta,
            -3.0 * q * b * k3,
            -b.powi(3) * k3 / a,
            4.0 * a * b * k3,
            36.0 * a * b.powi(3) * k3 / c,
        ],
    );
    row(
        "phi-u-u-alpha",
        &[
            jet.phi_u_u_alpha,
            -7.0 * q * b * k3,
            8.0 * a * b * k3,
            36.0 * a * b.powi(3) * k3 / c,
            b.powi(3) * k3 / a,
        ],
    );
    row(
        "u-alpha-equals-xi-beta-differentiated",
        &[jet.phi_u_u_alpha, -jet.phi_u_xi_beta],
    );
    if let Some(v) = jet.phi_w2_alpha {
        row(
            "phi-w2-alpha",
            &[
                v,
                -16.0 * a * b.powi(3) * k3 / c,
                -b.powi(3) * k3 / a,
                q * b * k3,
            ],
        );
    }
    if let Some(v) = jet.w3_alpha {
        row("w3-alpha", &[v, -3.0 * b * q * k3, 3.0 * b * a * k3]);
    }
    if let Some(v) = jet.phi_w1_beta {
        row(
            "phi-w1-beta",
            &[v, -4.0 * a * b * k3, -16.0 * a * b.powi(3) * k3 / c],
        );
    }
    let pass = r.values().all(|v| *v <= tol);
    JetResidualReport {
        residuals: r,
        scales,
        tolerance: tol,
        pass,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    /// `Delta > 0`: the quadratic `f(omega)` changes sign, so positivity for
    /// every `omega` fails at this `beta`.
    Witnessed,
    /// `Delta <= 0` at this `beta`.
    NotWitnessed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// `c - 4 alpha^2 - 2 beta^2`.
    pub factor: f64,
    pub factor_vanishes: bool,
    /// `2 alpha^2 + beta^2`: the `xi`-derivative of the factor along the
    /// factor branch is `-(16 alpha beta kappa3 / c)` times this.
    pub sum_of_squares: f64,
    /// The factor branch forces `sum_of_squares = 0`; rejected whenever
    /// `(alpha, beta) != 0`.
    pub factor_branch_rejected: bool,
    /// `3600 c^2 - 3072 c beta^2`.
    pub discriminant: f64,
    /// `12(5 alpha^2 + beta^2)c + 64 alpha^4 - 16 alpha^2(|W1|^2 + 3 beta^2) - 3c^2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w1_identity_residual: Option<f64>,
    pub verdict: CertificateVerdict,
}

/// `f(omega) = 64 omega^2 + 60 c omega + 12 c beta^2`.
pub fn certificate_quadratic(c: f64, beta: f64, omega: f64) -> f64 {
    64.0 * omega * omega + 60.0 * c * omega + 12.0 * c * beta * beta
}

pub fn contradiction_certificate(
    c: f64,
    alpha: f64,
    beta: f64,
    w1_norm_sq: Option<f64>,
) -> Result<Certificate> {
    if c == 0.0 || !c.is_finite() {
        return Err(GeometryError::ZeroCurvature);
    }
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let factor = c - 4.0 * a2 - 2.0 * b2;
    let scale = c.abs() + 4.0 * a2 + 2.0 * b2;
    let sum_of_squares = 2.0 * a2 + b2;
    let discriminant = 3600.0 * c * c - 3072.0 * c * b2;
    let w1_identity_residual = w1_norm_sq.map(|w| {
        12.0 * (5.0 * a2 + b2) * c + 64.0 * a2 * a2 - 16.0 * a2 * (w + 3.0 * b2) - 3.0 * c * c
    });
    Ok(Certificate {
        factor,
        factor_vanishes: factor.abs() <= 1e-12 * scale,
        sum_of_squares,
        factor_branch_rejected: sum_of_squares > 0.0,
        discriminant,
        w1_identity_residual,
        verdict: if discriminant > 0.0 {
            CertificateVerdict::Witnessed
        } else {
            CertificateVerdict::NotWitnessed
        },
    })
}

/// Context on `span{xi, U, phiU, ...}` in dimension `2n - 1` realising the
/// shape rows with `gamma = lambda = 0`; the remaining horizontal directions
/// get `extra` on the diagonal.
pub fn shape_rows_context(
    n: usize,
    alpha: f64,
    beta: f64,
    c: f64,
    extra: f64,
) -> Result<CurvatureContext> {
    let rows = shape_rows(alpha, beta, c)?;
    let acs = AlmostContactStructure::canonical(n)?;
    let dim = acs.dim();
    let half = n - 1;
    let (u, phi_u, xi) = (0, half, dim - 1);
    let mut a = DMatrix::from_diagonal_element(dim, dim, extra);
    a[(xi, xi)] = alpha;
    a[(u, xi)] = beta;
    a[(xi, u)] = beta;
    a[(u, u)] = rows.au_u;
    a[(phi_u, phi_u)] = rows.a_phi_u;
    CurvatureContext::new(acs, a, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{nabla_phi, nabla_xi};

    #[test]
    fn pointwise_examples() {
        assert!((pointwise_commutator_norm(4.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pointwise_commutator_norm(4.0, 0.0).unwrap(), 0.0);
        assert!((pointwise_commutator_norm(-4.0, 2.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shape_row_examples() {
        let r = shape_rows(2.0, 1.0, 4.0).unwrap();
        assert_eq!((r.au_u, r.au_xi, r.a_phi_u), (0.0, 1.0, -0.5));
        let r = shape_rows(1.0, 2.0, -4.0).unwrap();
        assert_eq!((r.au_u, r.au_xi, r.a_phi_u), (5.0, 2.0, 1.0));
        let r = shape_rows(1.0, 0.5, 4.0).unwrap();
        assert_eq!(r.row("phiU", "xi").unwrap()["U"], 1.0);
        assert_eq!(r.connection.len(), 9);
        assert!(matches!(
            shape_rows(0.0, 1.0, 4.0),
            Err(GeometryError::Domain(_))
        ));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(jet_kappas(1.0, 1.0, 4.0).unwrap(), (-4.0, -4.0));
        assert_eq!(jet_kappas(-1.0, 1.0, 4.0).unwrap().0, 4.0);
        assert_eq!(
            jet_kappas(0.7, 0.2, 3.0).unwrap().0,
            jet_kappas(0.7, 5.0, -9.0).unwrap().0
        );
        assert!(jet_kappas(1.0, 0.0, 4.0).is_err());
    }

    #[test]
    fn consistent_jet_passes_every_row() {
        for (a, b, c) in [(1.0, 1.0, 4.0), (-0.3, 2.5, -4.0), (2.0, 0.1, 1.0)] {
            let rep = jet_residuals(&LocalJet::consistent(a, b, c, 0.0).unwrap());
            assert!(rep.pass, "{:?}", rep.failing());
        }
    }

    #[test]
    fn single_row_violations() {
        let mut jet = LocalJet::consistent(1.0, 1.0, 4.0, 0.0).unwrap();
        jet.d_alpha.u = 0.3;
        let rep = jet_residuals(&jet);
        assert_eq!(rep.failing(), vec!["u-alpha-equals-xi-beta"]);
        assert!((rep.residuals["u-alpha-equals-xi-beta"] - 0.3).abs() < 1e-15);

        let mut jet = LocalJet::consistent(1.0, 1.0, 4.0, 1.0).unwrap();
        let expected = jet.d_alpha.xi;
        jet.d_alpha.xi += 0.25;
        let rep = jet_residuals(&jet);
        assert!((rep.absolute("xi-alpha").unwrap() - 0.25).abs() < 1e-15);
        assert!(expected != 0.0);
    }

    #[test]
    fn kappa3_forces_factor_branch() {
        // off the factor branch, kappa3 != 0 breaks the differentiated row
        let jet = LocalJet::consistent(1.0, 1.0, 4.0, 0.5).unwrap();
        let rep = jet_residuals(&jet);
        assert_eq!(rep.failing(), vec!["u-alpha-equals-xi-beta-differentiated"]);
        let expected: f64 = 0.5 * (4.0 - 4.0 - 2.0);
        let got = rep
            .absolute("u-alpha-equals-xi-beta-differentiated")
            .unwrap();
        assert!((got - expected.abs()).abs() < 1e-12);

        // on it, every row passes
        let (a, b) = (0.6_f64, 0.9_f64);
        let c = 4.0 * a * a + 2.0 * b * b;
        let rep = jet_residuals(&LocalJet::consistent(a, b, c, 0.5).unwrap());
        assert!(rep.pass, "{:?}", rep.failing());
    }

    #[test]
    fn certificate_examples() {
        let cert = contradiction_certificate(4.0, 0.3, 1.0, None).unwrap();
        assert_eq!(cert.discriminant, 45312.0);
        assert_eq!(cert.verdict, CertificateVerdict::Witnessed);
        let cert = contradiction_certificate(4.0, 0.5_f64.sqrt(), 1.0, None).unwrap();
        assert!(cert.factor.abs() < 1e-15 && cert.factor_vanishes);
        assert!(cert.factor_branch_rejected);
        let cert = contradiction_certificate(4.0, 0.0, 0.0, Some(1.0)).unwrap();
        assert!(!cert.factor_branch_rejected);
        assert_eq!(cert.w1_identity_residual, Some(-48.0));
        assert!(contradiction_certificate(0.0, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn jet_from_pairs() {
        let pairs = |kv: &[(&str, &str)]| -> BTreeMap<String, String> {
            kv.iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        };
        let jet = LocalJet::from_pairs(&pairs(&[
            ("alpha", "1"),
            ("beta", "1"),
            ("c", "4"),
            ("consistent", "true"),
        ]))
        .unwrap();
        assert_eq!(jet, LocalJet::consistent(1.0, 1.0, 4.0, 0.0).unwrap());
        let jet = LocalJet::from_pairs(&pairs(&[
            ("alpha", "1"),
            ("beta", "1"),
            ("c", "4"),
            ("u_alpha", "0.3"),
        ]))
        .unwrap();
        assert_eq!(jet.d_alpha.u, 0.3);
        assert!(
            LocalJet::from_pairs(&pairs(&[("alpha", "1"), ("beta", "-1"), ("c", "4")])).is_err()
        );
        assert!(LocalJet::from_pairs(&pairs(&[("alpha", "1"), ("c", "4")])).is_err());
    }

    #[test]
    fn shape_rows_agree_with_operator_calculus() {
        let (alpha, beta, c) = (1.3, 0.7, -4.0);
        let rows = shape_rows(alpha, beta, c).unwrap();
        let ctx = shape_rows_context(3, alpha, beta, c, 0.4).unwrap();
        let acs = ctx.acs();
        let a = ctx.shape();
        let e = |i: usize| {
            let mut v = DVector::zeros(5);
            v[i] = 1.0;
            v
        };
        let (u, phi_u, xi) = (e(0), e(2), e(4));
        assert!((&acs.phi * &u - &phi_u).norm() < 1e-15);
        let name = |v: &str| match v {
            "xi" => xi.clone(),
            "U" => u.clone(),
            _ => phi_u.clone(),
        };
        let eval = |row: &Combination| {
            row.iter()
                .filter(|(k, _)| matches!(**k, "xi" | "U" | "phiU"))
                .fold(DVector::zeros(5), |acc, (k, v)| acc + name(k) * *v)
        };
        for dir in ["xi", "U", "phiU"] {
            // nabla_X xi has no unresolved terms
            let got = nabla_xi(acs, a, &name(dir)).unwrap();
            assert!(
                (got - eval(rows.row(dir, "xi").unwrap())).norm() < 1e-12,
                "{dir}"
            );
            // (nabla_X phi)U is the explicit part of nabla_X phiU
            let got = nabla_phi(acs, a, &name(dir), &u).unwrap();
            assert!(
                (got - eval(rows.row(dir, "phiU").unwrap())).norm() < 1e-12,
                "{dir}"
            );
        }
        // eta(nabla_phiU U) = -g(U, nabla_phiU xi)
        let eta_part = rows.row("phiU", "U").unwrap()["xi"];
        let n = nabla_xi(acs, a, &phi_u).unwrap();
        assert!((eta_part + acs.space.inner(&u, &n)).abs() < 1e-12);

        // gamma = g(lU, U) = 0 and lU = 0
        let l = jacobi_operator(&ctx);
        assert!((&l * &u).norm() < 1e-12);
    }
}
