//! Concrete test and experiment problems.
//!
//! Sign convention throughout: `f = div(sigma grad u)` and `q = -sigma grad u`,
//! so `div q = -f`.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::hdg::{ExactSolution, HdgError, ProblemData, ScalarField, VectorField};
use crate::mesh::{BoundaryKind, BoundarySegment, DomainSpec, MeshError, Point, Region, Subdomain};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("contrast {0} makes the problem ill-posed")]
    IllPosed(f64),
    #[error("contrast {kappa} lies in the critical interval [{min}, {max}]")]
    CriticalContrast { kappa: f64, min: f64, max: f64 },
    #[error("invalid coefficients: {0}")]
    InvalidCoefficient(String),
    #[error(transparent)]
    Data(#[from] HdgError),
    #[error(transparent)]
    Domain(#[from] MeshError),
}

pub const CAVITY_SIGMA_PLUS: f64 = 1.0;
pub const CAVITY_KAPPA: f64 = -1.001;

/// Bounds of the contrast interval in which the layer problem is not
/// well-posed.
pub const METAMATERIAL_KAPPA_MIN: f64 = -1.46;
pub const METAMATERIAL_KAPPA_MAX: f64 = -0.69;

/// `(-1, 1) x (0, 1)` with Plus on `x < 0`, Dirichlet everywhere.
pub fn cavity_domain() -> DomainSpec {
    DomainSpec::vertical_strips(
        &[-1.0, 0.0, 1.0],
        0.0,
        1.0,
        &[Subdomain::Plus, Subdomain::Minus],
        BoundaryKind::Dirichlet,
    )
    .expect("cavity domain is valid")
}

/// Exact cavity solution and the matching source.
///
/// On Plus: `u = ((x+1)^2 - c (x+1)) sin(pi y)` with
/// `c = (2 s+ + s-) / (s+ + s-)`; on Minus: `u = d (x-1) sin(pi y)` with
/// `d = s+ / (s+ + s-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySolution {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

impl CavitySolution {
    fn c(&self) -> f64 {
        (2.0 * self.sigma_plus + self.sigma_minus) / (self.sigma_plus + self.sigma_minus)
    }

    fn d(&self) -> f64 {
        self.sigma_plus / (self.sigma_plus + self.sigma_minus)
    }

    pub fn sigma(&self, tag: Subdomain) -> f64 {
        match tag {
            Subdomain::Plus => self.sigma_plus,
            Subdomain::Minus => self.sigma_minus,
        }
    }

    pub fn u(&self, p: Point, tag: Subdomain) -> f64 {
        let [x, y] = p;
        let s = (PI * y).sin();
        match tag {
            Subdomain::Plus => ((x + 1.0).powi(2) - self.c() * (x + 1.0)) * s,
            Subdomain::Minus => self.d() * (x - 1.0) * s,
        }
    }

    pub fn grad_u(&self, p: Point, tag: Subdomain) -> [f64; 2] {
        let [x, y] = p;
        let (s, c) = ((PI * y).sin(), (PI * y).cos());
        match tag {
            Subdomain::Plus => {
                let g = (x + 1.0).powi(2) - self.c() * (x + 1.0);
                [(2.0 * (x + 1.0) - self.c()) * s, PI * g * c]
            }
            Subdomain::Minus => [self.d() * s, PI * self.d() * (x - 1.0) * c],
        }
    }

    pub fn q(&self, p: Point, tag: Subdomain) -> [f64; 2] {
        let g = self.grad_u(p, tag);
        let s = self.sigma(tag);
        [-s * g[0], -s * g[1]]
    }

    /// `div(sigma grad u)`.
    pub fn f(&self, p: Point, tag: Subdomain) -> f64 {
        let [x, y] = p;
        let s = (PI * y).sin();
        match tag {
            Subdomain::Plus => {
                let g = (x + 1.0).powi(2) - self.c() * (x + 1.0);
                self.sigma_plus * (2.0 - PI * PI * g) * s
            }
            Subdomain::Minus => -self.sigma_minus * PI * PI * self.d() * (x - 1.0) * s,
        }
    }
}

pub fn cavity_problem(sigma_plus: f64, kappa: f64) -> Result<ProblemData, ProblemError> {
    if kappa == -1.0 {
        return Err(ProblemError::IllPosed(kappa));
    }
    let data = ProblemData::new(sigma_plus, kappa)?;
    let sol = CavitySolution { sigma_plus, sigma_minus: data.sigma_minus() };
    let u: ScalarField = Arc::new(move |p, t| sol.u(p, t));
    let q: VectorField = Arc::new(move |p, t| sol.q(p, t));
    Ok(data.with_source(Arc::new(move |p, t| sol.f(p, t))).with_exact(ExactSolution { u, q }))
}

/// `(0, 5) x (0, 2)` with a Minus layer between the chains
/// `(1,0)-(1.3,1)-(1,2)` and `(3,0)-(3.3,1)-(3,2)`, Dirichlet everywhere.
pub fn metamaterial_domain() -> DomainSpec {
    let left = vec![[1.0, 0.0], [1.3, 1.0], [1.0, 2.0]];
    let right = vec![[3.0, 0.0], [3.3, 1.0], [3.0, 2.0]];
    let regions = vec![
        Region { polygon: vec![[0.0, 0.0], [1.0, 0.0], [1.3, 1.0], [1.0, 2.0], [0.0, 2.0]], tag: Subdomain::Plus },
        Region {
            polygon: vec![[1.0, 0.0], [3.0, 0.0], [3.3, 1.0], [3.0, 2.0], [1.0, 2.0], [1.3, 1.0]],
            tag: Subdomain::Minus,
        },
        Region { polygon: vec![[3.0, 0.0], [5.0, 0.0], [5.0, 2.0], [3.0, 2.0], [3.3, 1.0]], tag: Subdomain::Plus },
    ];
    let outer = vec![[0.0, 0.0], [5.0, 0.0], [5.0, 2.0], [0.0, 2.0]];
    let boundary =
        (0..4).map(|i| BoundarySegment { a: outer[i], b: outer[(i + 1) % 4], kind: BoundaryKind::Dirichlet }).collect();
    DomainSpec::new(outer, regions, boundary, vec![left, right]).expect("layer domain is valid")
}

/// Source `sin(pi y / 2)` on the Plus part left of `x = 1.3`, zero elsewhere.
pub fn metamaterial_source(p: Point, tag: Subdomain) -> f64 {
    if tag == Subdomain::Plus && p[0] < 1.3 {
        (PI * p[1] / 2.0).sin()
    } else {
        0.0
    }
}

pub fn metamaterial_problem(kappa: f64) -> Result<(ProblemData, DomainSpec), ProblemError> {
    if (METAMATERIAL_KAPPA_MIN..=METAMATERIAL_KAPPA_MAX).contains(&kappa) {
        return Err(ProblemError::CriticalContrast { kappa, min: METAMATERIAL_KAPPA_MIN, max: METAMATERIAL_KAPPA_MAX });
    }
    let data = ProblemData::new(1.0, kappa)?.with_source(Arc::new(metamaterial_source));
    Ok((data, metamaterial_domain()))
}

/// `u = s- x` on Plus and `u = s+ x` on Minus, so `u` and `sigma du/dx`
/// match across `x = 0` and `f = 0`.
#[derive(Clone)]
pub struct ManufacturedSolution {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub u: ScalarField,
    pub q: VectorField,
    pub f: ScalarField,
}

impl std::fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedSolution")
            .field("sigma_plus", &self.sigma_plus)
            .field("sigma_minus", &self.sigma_minus)
            .finish()
    }
}

impl ManufacturedSolution {
    /// Problem data on the cavity geometry with Dirichlet data from `u`.
    pub fn problem(&self) -> ProblemData {
        ProblemData::new(self.sigma_plus, self.sigma_minus / self.sigma_plus)
            .expect("coefficients checked on construction")
            .with_source(self.f.clone())
            .with_dirichlet(self.u.clone())
            .with_exact(ExactSolution { u: self.u.clone(), q: self.q.clone() })
    }
}

pub fn linear_transmission_manufactured(
    sigma_plus: f64,
    sigma_minus: f64,
) -> Result<ManufacturedSolution, ProblemError> {
    if !(sigma_plus > 0.0 && sigma_minus < 0.0) || sigma_plus + sigma_minus == 0.0 {
        return Err(ProblemError::InvalidCoefficient(format!(
            "need sigma+ > 0 > sigma- with nonzero sum, got ({sigma_plus}, {sigma_minus})"
        )));
    }
    let (sp, sm) = (sigma_plus, sigma_minus);
    let u: ScalarField = Arc::new(move |p: Point, t| match t {
        Subdomain::Plus => sm * p[0],
        Subdomain::Minus => sp * p[0],
    });
    let q: VectorField = Arc::new(move |_, _| [-sp * sm, 0.0]);
    Ok(ManufacturedSolution { sigma_plus, sigma_minus, u, q, f: Arc::new(|_, _| 0.0) })
}
