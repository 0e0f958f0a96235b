//! Hybridizable discontinuous Galerkin solver for Poisson problems whose
//! diffusion coefficient changes sign across an interface, together with a
//! continuous Lagrange baseline, superconvergent post-processing and error
//! measurement for convergence studies.

// `!(x > tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cg;
pub mod hdg;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod polybasis;
pub mod postprocess;
pub mod problems;
