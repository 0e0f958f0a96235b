//! Experiment driver: refinement studies and field output for the
//! sign-changing HDG solver and its CG baseline, written as CSV.

pub mod config;
pub mod fields;
pub mod study;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use signhdg::cg::solve_cg;
use signhdg::hdg::{make_tau, solve_hdg_with, DiscreteSolution, Discretization, HdgError, ProblemData};
use signhdg::mesh::{
    build_mapped_mesh, build_structured_mesh, classify_facets, DiagonalPattern, DomainSpec, FacetClassification, Mesh,
    MeshError,
};
use signhdg::metrics::MetricsError;
use signhdg::problems::{
    cavity_domain, cavity_problem, linear_transmission_manufactured, metamaterial_problem, ProblemError,
};

pub use config::{Axis, Experiment, MeshPattern, Method, RunConfig, Slice};
pub use fields::{run_field_output, FieldReport, SliceData};
pub use study::{run_convergence_study, LevelDiagnostics, LevelFailure, MethodStudy, StudyReport};

/// Error tagged with the module it came from. Displays as
/// `<module>: <message>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub module: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(module: &'static str, message: impl Into<String>) -> Self {
        Self { module, message: message.into() }
    }

    fn at_level(self, n: usize) -> Self {
        Self { module: self.module, message: format!("level n={n}: {}", self.message) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.module, self.message)
    }
}

impl std::error::Error for CliError {}

macro_rules! tag_error {
    ($ty:ty, $module:literal) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($module, e.to_string())
            }
        }
    };
}

tag_error!(MeshError, "mesh");
tag_error!(HdgError, "hdg");
tag_error!(MetricsError, "metrics");
tag_error!(ProblemError, "problems");

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("cli", e.to_string())
    }
}

pub(crate) struct Setup {
    pub problem: ProblemData,
    pub domain: DomainSpec,
}

pub(crate) fn setup(config: &RunConfig) -> Result<Setup, CliError> {
    let (problem, domain) = match config.experiment {
        Experiment::Cavity => (cavity_problem(config.sigma_plus, config.kappa)?, cavity_domain()),
        Experiment::Metamaterial => {
            let (data, domain) = metamaterial_problem(config.kappa)?;
            (ProblemData::new(config.sigma_plus, config.kappa)?.with_source(data.source), domain)
        }
        Experiment::Manufactured => {
            let m = linear_transmission_manufactured(config.sigma_plus, config.kappa * config.sigma_plus)?;
            (m.problem(), cavity_domain())
        }
    };
    Ok(Setup { problem, domain })
}

/// Mesh of `domain` at level `n` in the given family.
pub fn build_mesh(domain: &DomainSpec, n: usize, pattern: MeshPattern) -> Result<Mesh, MeshError> {
    match pattern {
        MeshPattern::Mirrored => build_structured_mesh(domain, n, DiagonalPattern::MirroredDiagonals),
        MeshPattern::Uniform => build_structured_mesh(domain, n, DiagonalPattern::UniformDiagonals),
        MeshPattern::Mapped => build_mapped_mesh(domain, n),
    }
}

pub(crate) fn discretize<'m>(
    config: &RunConfig,
    mesh: &'m Mesh,
    classes: &'m FacetClassification,
) -> Result<Discretization<'m>, HdgError> {
    match config.quadrature {
        Some(q) => Discretization::with_quadrature(mesh, classes, config.k, q),
        None => Discretization::new(mesh, classes, config.k),
    }
}

pub(crate) fn solve(
    config: &RunConfig,
    method: Method,
    disc: &Discretization,
    problem: &ProblemData,
) -> Result<DiscreteSolution, CliError> {
    match method {
        Method::Hdg => {
            let tau = make_tau(disc.mesh, disc.classes, config.gamma)?;
            Ok(solve_hdg_with(disc, problem, &tau)?)
        }
        Method::Cg => Ok(solve_cg(disc.mesh, disc.classes, config.k, problem)?),
    }
}

pub(crate) fn mesh_and_classes(
    setup: &Setup,
    n: usize,
    pattern: MeshPattern,
) -> Result<(Mesh, FacetClassification), CliError> {
    let mesh = build_mesh(&setup.domain, n, pattern)?;
    let classes = classify_facets(&mesh, &setup.domain)?;
    Ok((mesh, classes))
}

/// CSV number format: scientific, six significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.5e}")
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = PathBuf::from(path);
    tmp.as_mut_os_string().push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
