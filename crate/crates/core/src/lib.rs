//! Tensor calculus for real hypersurfaces in the complex space forms `CP^n`
//! and `CH^n`: almost contact structures, shape operators, Gauss-equation
//! curvature and the Jacobi structure operator `l = R(., xi)xi`, with
//! executable checks for the commutation conditions `phi l = l phi`,
//! `lA = Al`, `nabla_xi l = mu xi` against a catalog of model hypersurfaces.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod config;
pub mod curvature;
pub mod error;
pub mod hopf;
pub mod lemma;
pub mod linalg;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod tensor_core;

pub use catalog::{
    instantiate, principal_curvatures, Ambient, Family, ModelInstance, ModelSpec, SpectralTable,
};
pub use curvature::{jacobi_operator, Connection, CurvatureContext};
pub use error::{GeometryError, Result};
pub use hopf::{classify, theorem_pipeline, Subspace, Verdict};
pub use tensor_core::{AlmostContactStructure, PhiBasis, TangentSpace};
