//! Model hypersurfaces of type A0/A1/A2 (and type B as a negative control)
//! in `CP^n` and `CH^n`, realised on a tangent space.
//!
//! Principal curvatures are written for `c = +-4` and rescaled with
//! `s = sqrt(|c|)/2` (`r -> s r`, curvatures times `s`). Every table is checked
//! at construction against the radial Riccati equation
//! `lambda' = -(lambda^2 + kappa)`, with `kappa = c` for the `xi`-direction and
//! `kappa = c/4` on `ker(eta)`. The orientation is chosen so small geodesic
//! spheres in `CP^n` have positive `lambda = cot r`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{type_a_nabla_a, Connection, CurvatureContext};
use crate::error::{GeometryError, Result};
use crate::tensor_core::{build_phi_basis_seeded, AlmostContactStructure, PhiBasis};

/// Oracle agreement required of every catalog spectral table.
pub const ORACLE_TOL: f64 = 1e-6;
/// Default RK4 step for the Riccati oracle.
pub const RICCATI_STEP: f64 = 1e-4;
/// `|lambda|` beyond which the Riccati solution is treated as a focal blow-up.
pub const BLOWUP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Ambient {
    CP,
    CH,
}

impl FromStr for Ambient {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CP" => Ok(Self::CP),
            "CH" => Ok(Self::CH),
            other => Err(GeometryError::InvalidSpec(format!(
                "unknown ambient {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CP => "CP",
            Self::CH => "CH",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    A0,
    A1,
    A2,
    B,
}

impl Family {
    pub fn is_type_a(self) -> bool {
        !matches!(self, Self::B)
    }
}

impl FromStr for Family {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A0" => Ok(Self::A0),
            "A1" => Ok(Self::A1),
            "A2" => Ok(Self::A2),
            "B" => Ok(Self::B),
            other => Err(GeometryError::InvalidSpec(format!(
                "unknown family {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A0 => "A0",
            Self::A1 => "A1",
            Self::A2 => "A2",
            Self::B => "B",
        })
    }
}

/// Parametric description of a model hypersurface.
///
/// `k` is the complex dimension of the totally geodesic focal submanifold:
/// for A1 it is `0` (geodesic sphere, the default) or `n - 1` (tube over a
/// hyperplane); for A2 it satisfies `1 <= k <= n - 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub ambient: Ambient,
    pub n: usize,
    pub c: f64,
    pub family: Family,
    pub radius: Option<f64>,
    pub k: Option<usize>,
    pub flip_normal: bool,
}

impl ModelSpec {
    pub fn new(ambient: Ambient, n: usize, family: Family) -> Self {
        Self {
            ambient,
            n,
            c: match ambient {
                Ambient::CP => 4.0,
                Ambient::CH => -4.0,
            },
            family,
            radius: None,
            k: None,
            flip_normal: false,
        }
    }

    pub fn radius(mut self, r: f64) -> Self {
        self.radius = Some(r);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn flipped(mut self) -> Self {
        self.flip_normal = !self.flip_normal;
        self
    }

    /// `sqrt(|c|)/2`.
    pub fn scale(&self) -> f64 {
        self.c.abs().sqrt() / 2.0
    }

    pub fn dim(&self) -> usize {
        2 * self.n - 1
    }

    /// Focal submanifold dimension after defaults.
    pub fn focal_k(&self) -> usize {
        self.k.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GeometryError::InvalidSpec(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !self.c.is_finite() || self.c == 0.0 {
            return bad("c must be finite and nonzero".into());
        }
        match self.ambient {
            Ambient::CP if self.c < 0.0 => return bad("CP requires c > 0".into()),
            Ambient::CH if self.c > 0.0 => return bad("CH requires c < 0".into()),
            _ => {}
        }
        let n = self.n;
        match self.family {
            Family::A0 => {
                if self.ambient != Ambient::CH {
                    return bad("A0 (horosphere) only exists in CH".into());
                }
                if self.radius.is_some() {
                    return bad("A0 takes no radius".into());
                }
                if self.k.is_some() {
                    return bad("A0 takes no k".into());
                }
                return Ok(());
            }
            Family::A1 => {
                if let Some(k) = self.k {
                    if k != 0 && k != n - 1 {
                        return bad(format!("A1 needs k = 0 or k = n - 1 = {}, got {k}", n - 1));
                    }
                }
            }
            Family::A2 => match self.k {
                Some(k) if (1..=n.saturating_sub(2)).contains(&k) => {}
                Some(k) => {
                    return bad(format!(
                        "A2 needs 1 <= k <= n - 2 = {}, got {k}",
                        n as i64 - 2
                    ))
                }
                None => return bad("A2 needs k".into()),
            },
            Family::B => {
                if self.k.is_some() {
                    return bad("B takes no k".into());
                }
            }
        }
        let r = match self.radius {
            Some(r) if r.is_finite() && r > 0.0 => r,
            Some(r) => return bad(format!("radius must be positive, got {r}")),
            None => return bad(format!("{} needs a radius", self.family)),
        };
        if self.ambient == Ambient::CP {
            let limit = if self.family == Family::B {
                FRAC_PI_4
            } else {
                FRAC_PI_2
            };
            if self.scale() * r >= limit {
                return bad(format!(
                    "radius {r} outside (0, {}) for {} in CP with c = {}",
                    limit / self.scale(),
                    self.family,
                    self.c
                ));
            }
        }
        Ok(())
    }

    /// Build from flat key-value pairs (`ambient`, `n`, `c`, `family`,
    /// `radius`, `k`, `flip_normal`).
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| pairs.get(k).map(|s| s.trim());
        let parse_err =
            |key: &str, v: &str| GeometryError::InvalidSpec(format!("cannot parse {key} = {v:?}"));
        let ambient: Ambient = get("ambient")
            .ok_or_else(|| GeometryError::InvalidSpec("missing ambient".into()))?
            .parse()?;
        let n: usize = match get("n") {
            Some(v) => v.parse().map_err(|_| parse_err("n", v))?,
            None => return Err(GeometryError::InvalidSpec("missing n".into())),
        };
        let family: Family = get("family")
            .ok_or_else(|| GeometryError::InvalidSpec("missing family".into()))?
            .parse()?;
        let mut spec = ModelSpec::new(ambient, n, family);
        if let Some(v) = get("c") {
            spec.c = v.parse().map_err(|_| parse_err("c", v))?;
        }
        if let Some(v) = get("radius") {
            spec.radius = Some(v.parse().map_err(|_| parse_err("radius", v))?);
        }
        if let Some(v) = get("k") {
            spec.k = Some(v.parse().map_err(|_| parse_err("k", v))?);
        }
        if let Some(v) = get("flip_normal") {
            spec.flip_normal = v.parse().map_err(|_| parse_err("flip_normal", v))?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} {}", self.ambient, self.n, self.family)?;
        if let Some(k) = self.k {
            write!(f, "(k={k})")?;
        }
        if let Some(r) = self.radius {
            write!(f, " r={r}")?;
        }
        write!(f, " c={}", self.c)?;
        if self.flip_normal {
            f.write_str(" flipped")?;
        }
        Ok(())
    }
}

/// Initial data of a principal-curvature branch along the normal geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Branch {
    /// Direction collapses at `r = 0` (`lambda ~ 1/r`).
    Focal,
    /// Direction tangent to the focal set, `lambda(0) = start`.
    Regular { start: f64 },
    /// Constant solution of the Riccati equation.
    Fixed { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub phi_invariant: bool,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralTable {
    pub alpha: f64,
    pub alpha_branch: Branch,
    /// `alpha = 0`: the technical assumption `eta(A xi) != 0` fails.
    pub alpha_vanishes: bool,
    pub entries: Vec<SpectralEntry>,
    /// Max deviation from the Riccati oracle seen at construction.
    pub oracle_deviation: f64,
}

impl SpectralTable {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

fn rk4_step(f: impl Fn(f64, f64) -> f64, t: f64, y: f64, h: f64) -> f64 {
    let k1 = f(t, y);
    let k2 = f(t + h / 2.0, y + h * k1 / 2.0);
    let k3 = f(t + h / 2.0, y + h * k2 / 2.0);
    let k4 = f(t + h, y + h * k3);
    y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
}

/// Integrate `lambda' = -(lambda^2 + kappa)` from `start = (r0, lambda0)` to
/// `r` with fixed-step RK4 (step at most `RICCATI_STEP`).
pub fn riccati_shape_evolution(kappa: f64, r: f64, start: (f64, f64)) -> Result<f64> {
    riccati_shape_evolution_with(kappa, r, start, RICCATI_STEP)
}

pub fn riccati_shape_evolution_with(
    kappa: f64,
    r: f64,
    start: (f64, f64),
    step: f64,
) -> Result<f64> {
    let (r0, lambda0) = start;
    if !(step > 0.0) || !r.is_finite() || !r0.is_finite() || !lambda0.is_finite() {
        return Err(GeometryError::Domain(
            "Riccati integration needs finite inputs and a positive step".into(),
        ));
    }
    let span = r - r0;
    let steps = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let f = |_t: f64, l: f64| -(l * l + kappa);
    let mut lambda = lambda0;
    for i in 0..steps {
        let t = r0 + i as f64 * h;
        lambda = rk4_step(f, t, lambda, h);
        if !lambda.is_finite() || lambda.abs() > BLOWUP {
            return Err(GeometryError::FocalPoint {
                r: t + h,
                lambda: lambda.abs(),
            });
        }
    }
    Ok(lambda)
}

/// `y'/y` for the Jacobi field `y'' + kappa y = 0`, `y(0) = 0`, `y'(0) = 1`,
/// integrated with RK4 on the first-order system.
pub fn jacobi_field_ratio(kappa: f64, r: f64) -> f64 {
    let steps = 2000;
    let h = r / steps as f64;
    let (mut y, mut v) = (0.0_f64, 1.0_f64);
    for _ in 0..steps {
        let d = |y: f64, v: f64| (v, -kappa * y);
        let (k1y, k1v) = d(y, v);
        let (k2y, k2v) = d(y + h * k1y / 2.0, v + h * k1v / 2.0);
        let (k3y, k3v) = d(y + h * k2y / 2.0, v + h * k2v / 2.0);
        let (k4y, k4v) = d(y + h * k3y, v + h * k3v);
        y += h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0;
        v += h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0;
    }
    v / y
}

/// Riccati value of a branch at radius `r`.
pub fn branch_value(kappa: f64, branch: Branch, r: f64) -> Result<f64> {
    branch_value_with(kappa, branch, r, RICCATI_STEP)
}

/// Focal branches start from the Jacobi-field ratio at a small `r0` and use
/// a step no larger than `r0 / 100` while `lambda ~ 1/r` is steep.
pub fn branch_value_with(kappa: f64, branch: Branch, r: f64, step: f64) -> Result<f64> {
    match branch {
        Branch::Fixed { value } => riccati_shape_evolution_with(kappa, r, (0.0, value), step),
        Branch::Regular { start } => riccati_shape_evolution_with(kappa, r, (0.0, start), step),
        Branch::Focal => {
            let r0 = (r / 2.0).min(0.01);
            let lambda0 = jacobi_field_ratio(kappa, r0);
            riccati_shape_evolution_with(kappa, r, (r0, lambda0), step.min(r0 / 100.0))
        }
    }
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

fn coth(x: f64) -> f64 {
    x.cosh() / x.sinh()
}

/// Closed-form spectral table, verified against the Riccati oracle.
pub fn principal_curvatures(spec: &ModelSpec) -> Result<SpectralTable> {
    spec.validate()?;
    let s = spec.scale();
    let n = spec.n;
    let r = spec.radius.unwrap_or(1.0);
    let x = s * r;
    let entry =
        |value: f64, multiplicity: usize, phi_invariant: bool, branch: Branch| SpectralEntry {
            value,
            multiplicity,
            phi_invariant,
            branch,
        };

    let (alpha, alpha_branch, entries) = match (spec.ambient, spec.family) {
        (Ambient::CH, Family::A0) => (
            2.0 * s,
            Branch::Fixed { value: 2.0 * s },
            vec![entry(s, 2 * n - 2, true, Branch::Fixed { value: s })],
        ),
        (Ambient::CP, Family::A1 | Family::A2) => {
            let k = spec.focal_k();
            let mut e = Vec::new();
            if n - 1 - k > 0 {
                e.push(entry(s * cot(x), 2 * (n - 1 - k), true, Branch::Focal));
            }
            if k > 0 {
                e.push(entry(
                    -s * x.tan(),
                    2 * k,
                    true,
                    Branch::Regular { start: 0.0 },
                ));
            }
            (2.0 * s * cot(2.0 * x), Branch::Focal, e)
        }
        (Ambient::CH, Family::A1 | Family::A2) => {
            let k = spec.focal_k();
            let mut e = Vec::new();
            if n - 1 - k > 0 {
                e.push(entry(s * coth(x), 2 * (n - 1 - k), true, Branch::Focal));
            }
            if k > 0 {
                e.push(entry(
                    s * x.tanh(),
                    2 * k,
                    true,
                    Branch::Regular { start: 0.0 },
                ));
            }
            (2.0 * s * coth(2.0 * x), Branch::Focal, e)
        }
        // tube over the complex quadric; its focal set has principal curvatures -s, s
        (Ambient::CP, Family::B) => (
            2.0 * s * cot(2.0 * x),
            Branch::Focal,
            vec![
                entry(
                    s * cot(x - FRAC_PI_4),
                    n - 1,
                    false,
                    Branch::Regular { start: -s },
                ),
                entry(
                    s * cot(x + FRAC_PI_4),
                    n - 1,
                    false,
                    Branch::Regular { start: s },
                ),
            ],
        ),
        // tube over a totally real totally geodesic RH^n
        (Ambient::CH, Family::B) => (
            2.0 * s * (2.0 * x).tanh(),
            Branch::Regular { start: 0.0 },
            vec![
                entry(s * coth(x), n - 1, false, Branch::Focal),
                entry(s * x.tanh(), n - 1, false, Branch::Regular { start: 0.0 }),
            ],
        ),
        (Ambient::CP, Family::A0) => unreachable!("rejected by validate"),
    };

    let mut deviation = 0.0_f64;
    let oracle = branch_value(spec.c, alpha_branch, r)?;
    deviation = deviation.max((oracle - alpha).abs());
    if (oracle - alpha).abs() > ORACLE_TOL {
        return Err(GeometryError::OracleMismatch {
            entry: "alpha".into(),
            deviation: (oracle - alpha).abs(),
        });
    }
    for (i, e) in entries.iter().enumerate() {
        let oracle = branch_value(spec.c / 4.0, e.branch, r)?;
        let d = (oracle - e.value).abs();
        if d > ORACLE_TOL {
            return Err(GeometryError::OracleMismatch {
                entry: format!("lambda[{i}]"),
                deviation: d,
            });
        }
        deviation = deviation.max(d);
    }

    let mut alpha = alpha;
    let alpha_vanishes = alpha.abs() <= 1e-9 * s;
    if alpha_vanishes {
        alpha = 0.0;
    }
    let sign = if spec.flip_normal { -1.0 } else { 1.0 };
    Ok(SpectralTable {
        alpha: sign * alpha,
        alpha_branch,
        alpha_vanishes,
        entries: entries
            .into_iter()
            .map(|e| SpectralEntry {
                value: sign * e.value,
                ..e
            })
            .collect(),
        oracle_deviation: deviation,
    })
}

/// A realised model: context, spectral table, phi-basis of principal
/// directions, and (type A only) the closed-form `nabla A`.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub spec: ModelSpec,
    pub seed: u64,
    pub ctx: CurvatureContext,
    pub spectral: SpectralTable,
    pub basis: PhiBasis,
    pub connection: Option<Connection>,
}

/// Diagonal coefficients of `A` on the phi-basis `{V_i, phiV_i, xi}`.
fn basis_eigenvalues(table: &SpectralTable, family: Family, half: usize) -> Vec<f64> {
    let mut on_v = Vec::with_capacity(half);
    let mut on_phi_v = Vec::with_capacity(half);
    if family == Family::B {
        on_v.extend(std::iter::repeat_n(
            table.entries[0].value,
            table.entries[0].multiplicity,
        ));
        on_phi_v.extend(std::iter::repeat_n(
            table.entries[1].value,
            table.entries[1].multiplicity,
        ));
    } else {
        for e in &table.entries {
            on_v.extend(std::iter::repeat_n(e.value, e.multiplicity / 2));
        }
        on_phi_v = on_v.clone();
    }
    let mut all = on_v;
    all.extend(on_phi_v);
    all.push(table.alpha);
    all
}

/// Realise `spec` in a random orthonormal frame drawn from `seed`.
pub fn instantiate(spec: &ModelSpec, seed: u64) -> Result<ModelInstance> {
    let spectral = principal_curvatures(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acs = AlmostContactStructure::random(spec.n, &mut rng)?;
    if spec.flip_normal {
        acs.xi = -acs.xi;
        acs.eta = -acs.eta;
    }
    let basis = build_phi_basis_seeded(&acs, rng.gen())?;
    let diag = basis_eigenvalues(&spectral, spec.family, spec.n - 1);
    let coeffs = DMatrix::from_diagonal(&DVector::from_vec(diag));
    let shape = acs.space.assemble(basis.vectors(), &coeffs);
    let shape = (&shape + shape.transpose()) * 0.5;
    let ctx = CurvatureContext::new(acs, shape, spec.c)?;
    let connection = spec
        .family
        .is_type_a()
        .then(|| Connection::new(Arc::new(type_a_nabla_a(&ctx))));
    Ok(ModelInstance {
        spec: spec.clone(),
        seed,
        ctx,
        spectral,
        basis,
        connection,
    })
}

/// A representative spread of valid specs covering every family and both
/// ambients, plus rescaled curvatures and a flipped normal.
pub fn default_catalog() -> Vec<ModelSpec> {
    use Ambient::*;
    use Family::*;
    vec![
        ModelSpec::new(CP, 2, A1).radius(FRAC_PI_3),
        ModelSpec::new(CP, 3, A1).radius(0.4),
        ModelSpec::new(CP, 3, A1).radius(0.6).k(2),
        ModelSpec::new(CP, 3, A2).radius(0.7).k(1),
        ModelSpec::new(CP, 4, A2).radius(1.1).k(2),
        ModelSpec::new(CP, 4, A2).radius(0.5).k(1).c(1.0),
        ModelSpec::new(CP, 3, A1).radius(0.9).flipped(),
        ModelSpec::new(CH, 2, A0),
        ModelSpec::new(CH, 4, A0).c(-1.0),
        ModelSpec::new(CH, 2, A1).radius(0.8),
        ModelSpec::new(CH, 3, A1).radius(0.5).k(2),
        ModelSpec::new(CH, 4, A2).radius(1.2).k(1),
        ModelSpec::new(CH, 4, A2).radius(0.3).k(2).c(-9.0),
        ModelSpec::new(CP, 2, B).radius(0.5),
        ModelSpec::new(CP, 3, B).radius(0.3),
        ModelSpec::new(CH, 3, B).radius(0.7),
    ]
}
