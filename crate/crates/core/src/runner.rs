//! Command implementations shared by the CLI and the C interface. Each
//! returns a [`Report`]; nothing here touches argv, files or the clock.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{
    branch_value_with, default_catalog, instantiate, riccati_shape_evolution_with, Branch, Family,
    ModelInstance, ModelSpec, ORACLE_TOL,
};
use crate::curvature::{
    codazzi_residual, gauss_curvature, jacobi_cross_check, jacobi_operator, operator_norms,
    CurvatureContext,
};
use crate::error::{GeometryError, Result};
use crate::hopf::{
    check_l_a_commute, check_nabla_xi_l, check_phi_l_commute, classify, decompose_a_xi,
    hopf_identity_residual, theorem_pipeline, Subspace,
};
use crate::lemma::{
    contradiction_certificate, jet_kappas, jet_residuals_with, pointwise_commutator_norm,
    shape_rows, LocalJet,
};
use crate::linalg::{max_abs, random_vector};
use crate::report::{CheckRow, Report};
use crate::sampling::{
    random_context, random_curvature, random_hopf_context, random_structure,
    random_unit_horizontal, sample_rng,
};
use crate::tensor_core::{validate_acs, AlmostContactStructure};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 1000;
/// Random pairs used for the Codazzi check in `verify`.
const CODAZZI_PAIRS: usize = 16;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }

            /// `"all"` or a comma-separated list of names.
            pub fn parse_list(s: &str) -> Result<Vec<$name>> {
                if s.trim() == "all" {
                    return Ok(Self::ALL.to_vec());
                }
                let mut out: Vec<$name> = s
                    .split(',')
                    .map(|t| t.parse())
                    .collect::<Result<_>>()?;
                out.sort();
                out.dedup();
                Ok(out)
            }
        }

        impl FromStr for $name {
            type Err = GeometryError;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($text => Ok($name::$variant),)*
                    other => Err(GeometryError::InvalidSpec(format!(
                        concat!("unknown ", stringify!($name), " {:?}; expected one of: {}"),
                        other,
                        Self::ALL.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }
    };
}

named_enum!(
    /// Checks available to `verify`.
    Check {
        Structure => "structure",
        ShapeSymmetry => "shape-symmetry",
        Hopf => "hopf",
        PhiACommute => "phi-A-commute",
        PhiLCommute => "phi-l-commute",
        LACommute => "l-A-commute",
        NablaXiL => "nabla-xi-l",
        Codazzi => "codazzi",
        JacobiCrossCheck => "jacobi-cross-check",
        HopfIdentity => "hopf-identity",
        SpectralOracle => "spectral-oracle",
    }
);

named_enum!(
    /// Properties swept by `random`.
    Property {
        Structure => "structure",
        GaussSectional => "gauss-sectional",
        Jacobi => "jacobi",
        HopfCommutator => "hopf-commutator",
        HopfLACommute => "hopf-l-a-commute",
        PointwiseLaw => "pointwise-law",
        Jets => "jets",
    }
);

fn ensure_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidSpec(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub spec: ModelSpec,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub tolerance: f64,
}

impl VerifyOptions {
    pub fn new(spec: ModelSpec) -> Self {
        Self {
            spec,
            seed: 0,
            checks: Check::ALL.to_vec(),
            tolerance: DEFAULT_TOL,
        }
    }
}

/// Rows for one check on a realised model.
fn model_rows(inst: &ModelInstance, check: Check, tol: f64, seed: u64) -> Result<Vec<CheckRow>> {
    let ctx = &inst.ctx;
    let acs = ctx.acs();
    let space = ctx.space();
    // negative control: type B with alpha != 0 breaks the phi-commutations
    let broken = inst.spec.family == Family::B && !inst.spectral.alpha_vanishes;
    let expect = |row: CheckRow, fails: bool| if fails { row.expect(false) } else { row };
    Ok(match check {
        Check::Structure => vec![CheckRow::new(
            check.as_str(),
            Subspace::All,
            validate_acs(acs)?.max(),
            tol,
        )],
        Check::ShapeSymmetry => vec![CheckRow::new(
            check.as_str(),
            Subspace::All,
            space.symmetry_residual(ctx.shape()),
            tol,
        )],
        Check::Hopf => vec![CheckRow::new(
            check.as_str(),
            Subspace::SpanXi,
            decompose_a_xi(ctx).beta,
            tol,
        )],
        Check::PhiACommute => {
            let a = ctx.shape();
            let m = &acs.phi * a - a * &acs.phi;
            let norm = operator_norms(space, &m).spectral;
            vec![expect(
                CheckRow::new(check.as_str(), Subspace::All, norm, tol),
                broken,
            )]
        }
        Check::PhiLCommute => vec![expect(
            check_phi_l_commute(ctx, Subspace::KerEta, tol).into(),
            broken,
        )],
        Check::LACommute => [Subspace::KerEta, Subspace::SpanXi]
            .into_iter()
            .map(|s| check_l_a_commute(ctx, s, tol).into())
            .collect(),
        Check::NablaXiL => match &inst.connection {
            None => vec![],
            Some(conn) => {
                let mut rows = Vec::new();
                for s in [Subspace::KerEta, Subspace::SpanXi] {
                    let rep = check_nabla_xi_l(ctx, Some(conn), s, tol)?;
                    let mu = rep
                        .mu
                        .unwrap_or(0.0)
                        .abs()
                        .max(rep.mu_spread.unwrap_or(0.0));
                    rows.push(CheckRow::new("nabla-xi-l-mu", s, mu, tol));
                    rows.push(rep.into());
                }
                rows
            }
        },
        Check::Codazzi => match &inst.connection {
            None => vec![],
            Some(conn) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0C0D_A221);
                let mut worst = 0.0_f64;
                for _ in 0..CODAZZI_PAIRS {
                    let x = random_vector(ctx.dim(), &mut rng);
                    let y = random_vector(ctx.dim(), &mut rng);
                    let r = codazzi_residual(ctx, conn.nabla_a.as_ref(), &x, &y)?;
                    worst = nan_max(worst, space.norm(&r));
                }
                vec![CheckRow::new(check.as_str(), Subspace::All, worst, tol)]
            }
        },
        Check::JacobiCrossCheck => {
            vec![CheckRow::new(
                check.as_str(),
                Subspace::All,
                jacobi_cross_check(ctx),
                tol,
            )]
        }
        Check::HopfIdentity => {
            vec![CheckRow::new(
                check.as_str(),
                Subspace::All,
                hopf_identity_residual(ctx),
                tol,
            )]
        }
        Check::SpectralOracle => vec![CheckRow::new(
            check.as_str(),
            Subspace::All,
            inst.spectral.oracle_deviation,
            ORACLE_TOL,
        )],
    })
}

pub fn verify(opts: &VerifyOptions) -> Result<Report> {
    ensure_tolerance(opts.tolerance)?;
    let inst = instantiate(&opts.spec, opts.seed)?;
    let rows: Vec<CheckRow> = opts
        .checks
        .par_iter()
        .map(|c| model_rows(&inst, *c, opts.tolerance, opts.seed))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let pipeline = match theorem_pipeline(&inst.ctx, opts.tolerance) {
        Ok(p) => serde_json::to_value(p).expect("pipeline report serializes"),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let classification = classify(&inst.ctx, inst.connection.as_ref(), opts.tolerance);
    let data = json!({
        "label": opts.spec.to_string(),
        "spectral": inst.spectral,
        "pipeline": pipeline,
        "classes": classification.status,
    });
    let config = json!({
        "spec": opts.spec,
        "seed": opts.seed,
        "checks": opts.checks,
        "tolerance": opts.tolerance,
    });
    Ok(Report::new("verify", config, rows, data))
}

/// Every default catalog entry with its construction-time oracle deviation.
pub fn catalog() -> Result<Report> {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for spec in default_catalog() {
        let inst = instantiate(&spec, 0)?;
        rows.push(CheckRow::new(
            format!("spectral-oracle {spec}"),
            Subspace::All,
            inst.spectral.oracle_deviation,
            ORACLE_TOL,
        ));
        entries.push(json!({ "label": spec.to_string(), "spec": spec, "spectral": inst.spectral }));
    }
    Ok(Report::new(
        "catalog",
        Value::Null,
        rows,
        Value::Array(entries),
    ))
}

#[derive(Debug, Clone)]
pub struct RandomOptions {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub properties: Vec<Property>,
    pub tolerance: f64,
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// `(alpha, beta, c)` for a random non-Hopf jet: `|alpha|, beta` in
/// `[0.25, 3]`, `c` from [`random_curvature`].
pub fn random_jet_params<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (
        sign * rng.gen_range(0.25..3.0),
        rng.gen_range(0.25..3.0),
        random_curvature(rng),
    )
}

/// Holomorphic and totally real sectional curvatures of the ambient part
/// (`A = 0`) at one random horizontal frame: returns the larger deviation
/// from `c` and `c/4`.
pub fn sectional_deviation(
    acs: &AlmostContactStructure,
    c: f64,
    rng: &mut impl Rng,
) -> Result<f64> {
    let dim = acs.dim();
    let ctx = CurvatureContext::new(acs.clone(), nalgebra::DMatrix::zeros(dim, dim), c)?;
    let g = &acs.space;
    let x = random_unit_horizontal(acs, rng);
    let phi_x = &acs.phi * &x;
    let holo = g.inner(&gauss_curvature(&ctx, &x, &phi_x, &phi_x)?, &x);
    let mut dev = (holo - c).abs();
    if acs.complex_dim() > 2 {
        // Y orthogonal to X and phi X
        let y = loop {
            let y = random_unit_horizontal(acs, rng);
            let y = &y - &x * g.inner(&y, &x) - &phi_x * g.inner(&y, &phi_x);
            let norm = g.norm(&y);
            if norm > 1e-3 {
                break y / norm;
            }
        };
        let real = g.inner(&gauss_curvature(&ctx, &x, &y, &y)?, &x);
        dev = dev.max((real - c / 4.0).abs());
    }
    Ok(dev)
}

fn property_sample(prop: Property, n: usize, seed: u64, index: u64) -> Result<f64> {
    let mut rng = sample_rng(seed, index);
    Ok(match prop {
        Property::Structure => validate_acs(&random_structure(n, &mut rng)?)?.max(),
        Property::GaussSectional => {
            let acs = random_structure(n, &mut rng)?;
            let c = random_curvature(&mut rng);
            sectional_deviation(&acs, c, &mut rng)?
        }
        Property::Jacobi => {
            let ctx = random_context(n, &mut rng)?;
            let l = jacobi_operator(&ctx);
            let l_xi = ctx.space().norm(&(&l * &ctx.acs().xi));
            jacobi_cross_check(&ctx)
                .max(l_xi)
                .max(ctx.space().symmetry_residual(&l))
        }
        Property::HopfCommutator => hopf_identity_residual(&random_hopf_context(n, &mut rng)?),
        Property::HopfLACommute => {
            let ctx = random_hopf_context(n, &mut rng)?;
            let l = jacobi_operator(&ctx);
            let a = ctx.shape();
            max_abs(&(&l * a - a * &l))
        }
        Property::PointwiseLaw => {
            let c =
                [1.0, 4.0, 10.0][rng.gen_range(0..3)] * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let beta: f64 = rng.gen_range(0.0..3.0);
            (pointwise_commutator_norm(c, beta)? - beta * beta).abs()
        }
        Property::Jets => {
            let (a, b, c) = random_jet_params(&mut rng);
            jet_residuals_with(&LocalJet::consistent(a, b, c, 0.0)?, 0.0).max()
        }
    })
}

/// Max residual of each property over `samples` independent draws; the
/// reduction is order-free, so results do not depend on thread scheduling.
pub fn sweep(prop: Property, n: usize, samples: usize, seed: u64) -> Result<f64> {
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| property_sample(prop, n, seed, i))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, nan_max))
}

pub fn random(opts: &RandomOptions) -> Result<Report> {
    ensure_tolerance(opts.tolerance)?;
    if opts.dim < 3 || opts.dim.is_multiple_of(2) {
        return Err(GeometryError::InvalidSpec(format!(
            "dim must be odd and at least 3, got {}",
            opts.dim
        )));
    }
    if opts.samples == 0 {
        return Err(GeometryError::InvalidSpec(
            "samples must be positive".into(),
        ));
    }
    let n = opts.dim.div_ceil(2);
    let mut rows = Vec::new();
    for prop in &opts.properties {
        let worst = sweep(*prop, n, opts.samples, opts.seed)?;
        rows.push(CheckRow::new(
            prop.as_str(),
            Subspace::All,
            worst,
            opts.tolerance,
        ));
    }
    let config = json!({
        "dim": opts.dim,
        "samples": opts.samples,
        "seed": opts.seed,
        "properties": opts.properties,
        "tolerance": opts.tolerance,
    });
    Ok(Report::new("random", config, rows, Value::Null))
}

/// Start of a Riccati query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RiccatiStart {
    /// Collapsing direction, `lambda ~ 1/(r - r0)` near `r0 = 0`.
    Focal,
    /// `lambda(r0) = lambda0`.
    Value { r0: f64, lambda0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiccatiQuery {
    pub kappa: f64,
    pub r: f64,
    pub start: RiccatiStart,
    pub step: f64,
}

/// Exact solution `y'/y` of `y'' + kappa y = 0` for the query's start.
pub fn riccati_closed_form(q: &RiccatiQuery) -> f64 {
    let (r0, y0, v0) = match q.start {
        RiccatiStart::Focal => (0.0, 0.0, 1.0),
        RiccatiStart::Value { r0, lambda0 } => (r0, 1.0, lambda0),
    };
    let t = q.r - r0;
    let w = q.kappa.abs().sqrt();
    let (y, dy) = if q.kappa > 0.0 {
        let (s, c) = (w * t).sin_cos();
        (y0 * c + v0 / w * s, -y0 * w * s + v0 * c)
    } else if q.kappa < 0.0 {
        let (s, c) = ((w * t).sinh(), (w * t).cosh());
        (y0 * c + v0 / w * s, y0 * w * s + v0 * c)
    } else {
        (y0 + v0 * t, v0)
    };
    dy / y
}

pub fn riccati_oracle(q: &RiccatiQuery) -> Result<Report> {
    if !(q.step > 0.0) || !q.kappa.is_finite() || !q.r.is_finite() {
        return Err(GeometryError::InvalidSpec(
            "kappa, r must be finite and step positive".into(),
        ));
    }
    if matches!(q.start, RiccatiStart::Focal) && !(q.r > 0.0) {
        return Err(GeometryError::InvalidSpec(
            "a focal start needs r > 0".into(),
        ));
    }
    let numeric = match q.start {
        RiccatiStart::Focal => branch_value_with(q.kappa, Branch::Focal, q.r, q.step),
        RiccatiStart::Value { r0, lambda0 } => {
            riccati_shape_evolution_with(q.kappa, q.r, (r0, lambda0), q.step)
        }
    };
    let config = serde_json::to_value(q).expect("query serializes");
    let exact = riccati_closed_form(q);
    match numeric {
        Ok(value) => {
            let row = CheckRow::new(
                "riccati-closed-form",
                Subspace::All,
                (value - exact).abs(),
                ORACLE_TOL,
            );
            Ok(Report::new(
                "oracle riccati",
                config,
                vec![row],
                json!({ "value": value, "closed_form": exact }),
            ))
        }
        Err(GeometryError::FocalPoint { r, lambda }) => {
            let row = CheckRow::new(
                "riccati-integration",
                Subspace::All,
                f64::INFINITY,
                ORACLE_TOL,
            );
            Ok(Report::new(
                "oracle riccati",
                config,
                vec![row],
                json!({ "focal_point": r, "lambda": lambda }),
            ))
        }
        Err(e) => Err(e),
    }
}

pub fn lemma_pointwise(c: f64, beta: f64, tol: f64) -> Result<Report> {
    ensure_tolerance(tol)?;
    let value = pointwise_commutator_norm(c, beta)?;
    let row = CheckRow::new(
        "pointwise-law",
        Subspace::All,
        (value - beta * beta).abs(),
        tol,
    );
    Ok(Report::new(
        "lemma pointwise",
        json!({ "c": c, "beta": beta, "tolerance": tol }),
        vec![row],
        json!({ "commutator_norm": value }),
    ))
}

pub fn lemma_rows(alpha: f64, beta: f64, c: f64) -> Result<Report> {
    let rows = shape_rows(alpha, beta, c)?;
    let kappas = jet_kappas(alpha, beta, c).ok();
    Ok(Report::new(
        "lemma rows",
        json!({ "alpha": alpha, "beta": beta, "c": c }),
        vec![],
        json!({ "shape": rows, "kappas": kappas }),
    ))
}

pub fn lemma_jet(jet: &LocalJet, tol: f64) -> Result<Report> {
    ensure_tolerance(tol)?;
    jet.validate()?;
    let rep = jet_residuals_with(jet, tol);
    let rows = rep
        .residuals
        .iter()
        .map(|(name, v)| CheckRow::new(*name, Subspace::All, *v, tol))
        .collect();
    Ok(Report::new(
        "lemma jet",
        serde_json::to_value(jet).expect("jet serializes"),
        rows,
        Value::Null,
    ))
}

pub fn lemma_certificate(c: f64, alpha: f64, beta: f64, w1_norm_sq: Option<f64>) -> Result<Report> {
    let cert = contradiction_certificate(c, alpha, beta, w1_norm_sq)?;
    Ok(Report::new(
        "lemma certificate",
        json!({ "c": c, "alpha": alpha, "beta": beta, "w1_norm_sq": w1_norm_sq }),
        vec![],
        serde_json::to_value(cert).expect("certificate serializes"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Ambient, RICCATI_STEP};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn verify_sphere_passes_everything() {
        let spec = ModelSpec::new(Ambient::CP, 2, Family::A1).radius(FRAC_PI_3);
        let rep = verify(&VerifyOptions::new(spec)).unwrap();
        assert!(rep.all_pass, "{:?}", rep.failures());
        for name in ["phi-l-commute", "l-A-commute", "nabla-xi-l"] {
            assert!(
                rep.checks.iter().any(|r| r.check == name && r.pass),
                "{name}"
            );
        }
        assert_eq!(rep.data["pipeline"]["verdict"], "type-a-compatible");
    }

    #[test]
    fn verify_type_b_fails_as_expected() {
        let spec = ModelSpec::new(Ambient::CP, 3, Family::B).radius(0.3);
        let rep = verify(&VerifyOptions::new(spec)).unwrap();
        assert!(rep.all_pass, "{:?}", rep.failures());
        let row = rep
            .checks
            .iter()
            .find(|r| r.check == "phi-l-commute")
            .unwrap();
        assert!(!row.pass && row.expected == Some(false));
        assert!(rep.checks.iter().all(|r| r.check != "codazzi"));
    }

    #[test]
    fn quarter_pi_sphere_is_indeterminate() {
        let spec = ModelSpec::new(Ambient::CP, 2, Family::A1).radius(FRAC_PI_4);
        let rep = verify(&VerifyOptions::new(spec)).unwrap();
        assert_eq!(rep.data["pipeline"]["verdict"], "indeterminate");
        assert_eq!(rep.data["spectral"]["alpha_vanishes"], true);
    }

    #[test]
    fn check_lists_parse() {
        assert_eq!(Check::parse_list("all").unwrap().len(), Check::ALL.len());
        assert_eq!(
            Check::parse_list("hopf,structure,hopf").unwrap(),
            vec![Check::Structure, Check::Hopf]
        );
        assert!(Check::parse_list("hopf,bogus").is_err());
        assert_eq!(
            "hopf-commutator".parse::<Property>().unwrap(),
            Property::HopfCommutator
        );
    }

    #[test]
    fn sweeps_are_deterministic_and_small() {
        for prop in Property::ALL {
            let a = sweep(*prop, 3, 20, 42).unwrap();
            assert_eq!(a.to_bits(), sweep(*prop, 3, 20, 42).unwrap().to_bits());
            assert!(a < 1e-9, "{prop}: {a}");
        }
    }

    #[test]
    fn random_rejects_bad_dims() {
        let opts = RandomOptions {
            dim: 4,
            samples: 1,
            seed: 0,
            properties: vec![Property::Structure],
            tolerance: 1e-9,
        };
        assert!(random(&opts).is_err());
    }

    #[test]
    fn riccati_queries() {
        let q = RiccatiQuery {
            kappa: 1.0,
            r: FRAC_PI_4,
            start: RiccatiStart::Focal,
            step: RICCATI_STEP,
        };
        let rep = riccati_oracle(&q).unwrap();
        assert!(rep.all_pass);
        assert!((rep.data["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);

        let q = RiccatiQuery {
            kappa: -4.0,
            r: 2.0,
            start: RiccatiStart::Value {
                r0: 0.0,
                lambda0: 2.0,
            },
            step: RICCATI_STEP,
        };
        assert_eq!(
            riccati_oracle(&q).unwrap().data["value"].as_f64(),
            Some(2.0)
        );

        let q = RiccatiQuery {
            kappa: 1.0,
            r: 4.0,
            start: RiccatiStart::Focal,
            step: RICCATI_STEP,
        };
        let rep = riccati_oracle(&q).unwrap();
        assert!(!rep.all_pass);
        assert!(rep.data["focal_point"].as_f64().is_some());
    }

    #[test]
    fn lemma_reports() {
        assert!(lemma_pointwise(-4.0, 2.0, 1e-12).unwrap().all_pass);
        assert!(lemma_rows(0.0, 1.0, 4.0).is_err());
        let rep = lemma_jet(&LocalJet::consistent(1.0, 1.0, 4.0, 0.0).unwrap(), 1e-12).unwrap();
        assert!(rep.all_pass);
        let rep = lemma_certificate(4.0, 0.3, 1.0, None).unwrap();
        assert_eq!(rep.data["discriminant"].as_f64(), Some(45312.0));
    }
}
