//! Random pointwise structures for property sweeps. Every generator is a pure
//! function of its RNG, and [`sample_rng`] derives an independent stream per
//! sample index so parallel sweeps reproduce sequential ones exactly.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::CurvatureContext;
use crate::error::Result;
use crate::linalg::{random_symmetric, random_vector};
use crate::tensor_core::{build_phi_basis_seeded, AlmostContactStructure};

/// RNG for sample `index` of a sweep seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `c` drawn from `{+-1, +-4, +-10}` or uniformly from `[0.25, 10]` with a
/// random sign.
pub fn random_curvature<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let magnitude = if rng.gen_bool(0.5) {
        [1.0, 4.0, 10.0][rng.gen_range(0..3)]
    } else {
        rng.gen_range(0.25..10.0)
    };
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Random almost contact structure: orthonormal frame with probability 1/2,
/// otherwise a random non-Euclidean metric.
pub fn random_structure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<AlmostContactStructure> {
    if rng.gen_bool(0.5) {
        AlmostContactStructure::random(n, rng)
    } else {
        AlmostContactStructure::random_with_metric(n, rng)
    }
}

/// Self-adjoint shape operator with the given coefficients on a phi-basis.
fn shape_on_basis<R: Rng + ?Sized>(
    acs: &AlmostContactStructure,
    coeffs: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let basis = build_phi_basis_seeded(acs, rng.gen())?;
    let a = acs.space.assemble(basis.vectors(), coeffs);
    Ok(a)
}

/// Context with an arbitrary self-adjoint shape operator.
pub fn random_context<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CurvatureContext> {
    let acs = random_structure(n, rng)?;
    let dim = acs.dim();
    let coeffs = random_symmetric(dim, 2.0, rng);
    let a = shape_on_basis(&acs, &coeffs, rng)?;
    CurvatureContext::new(acs, a, random_curvature(rng))
}

/// Hopf context: `A xi = alpha xi` with `alpha` uniform in `[-3, 3]` and a
/// random self-adjoint block on `ker(eta)`.
pub fn random_hopf_context<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CurvatureContext> {
    let acs = random_structure(n, rng)?;
    let dim = acs.dim();
    let mut coeffs = random_symmetric(dim, 2.0, rng);
    for i in 0..dim {
        coeffs[(i, dim - 1)] = 0.0;
        coeffs[(dim - 1, i)] = 0.0;
    }
    coeffs[(dim - 1, dim - 1)] = rng.gen_range(-3.0..3.0);
    let a = shape_on_basis(&acs, &coeffs, rng)?;
    CurvatureContext::new(acs, a, random_curvature(rng))
}

/// g-unit vector in `ker(eta)`.
pub fn random_unit_horizontal<R: Rng + ?Sized>(
    acs: &AlmostContactStructure,
    rng: &mut R,
) -> DVector<f64> {
    loop {
        let v = random_vector(acs.dim(), rng);
        let h = acs.horizontal_projector() * v;
        let norm = acs.space.norm(&h);
        if norm > 1e-3 {
            return h / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::decompose_a_xi;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = sample_rng(42, 3).gen();
        let b: f64 = sample_rng(42, 3).gen();
        let c: f64 = sample_rng(42, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn hopf_contexts_are_hopf() {
        let mut rng = sample_rng(1, 0);
        for n in [2, 3, 4] {
            let ctx = random_hopf_context(n, &mut rng).unwrap();
            let dec = decompose_a_xi(&ctx);
            assert!(dec.hopf, "beta = {}", dec.beta);
        }
    }

    #[test]
    fn unit_horizontal_vectors() {
        let mut rng = sample_rng(5, 0);
        let acs = AlmostContactStructure::random_with_metric(3, &mut rng).unwrap();
        let x = random_unit_horizontal(&acs, &mut rng);
        assert!((acs.space.norm(&x) - 1.0).abs() < 1e-12);
        assert!(acs.eta_of(&x).abs() < 1e-12);
    }
}
