//! Error norms, convergence rates and the numerical-flux jump diagnostic.

use thiserror::Error;

use crate::hdg::{dot, DiscreteSolution, Discretization, ExactSolution, HdgError, ProblemData, SolveStats, TauField};
use crate::mesh::{FacetLabel, Subdomain};
use crate::polybasis::{make_basis, make_quadrature, ElementKind, Tabulation};
use crate::postprocess::PostprocessedField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("problem has no exact solution")]
    MissingExact,
    #[error(transparent)]
    Setup(#[from] HdgError),
    #[error("table rows must have strictly decreasing h")]
    Unordered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub cells: usize,
    pub h: f64,
    pub e_u: f64,
    pub e_q_l2: f64,
    /// `(|sigma|^-1 e, e)^(1/2)`.
    pub e_q_vh: f64,
    pub e_ubar: f64,
    pub e_ustar: Option<f64>,
}

struct Tables {
    weights: Vec<f64>,
    points: Vec<[f64; 2]>,
    cell: Tabulation,
    star: Option<Tabulation>,
    facet_weights: Vec<f64>,
    facet_psi: Vec<Vec<f64>>,
    facet_s: Vec<f64>,
}

fn tables(disc: &Discretization, star_degree: Option<usize>, degree: usize) -> Result<Tables, HdgError> {
    let quad = make_quadrature(ElementKind::Triangle, degree)?;
    let fq = make_quadrature(ElementKind::Segment, degree)?;
    let cell = disc.cell_basis.tabulate(&quad.points);
    let star = match star_degree {
        Some(d) => Some(make_basis(ElementKind::Triangle, d)?.tabulate(&quad.points)),
        None => None,
    };
    Ok(Tables {
        weights: quad.weights,
        points: quad.points,
        cell,
        star,
        facet_psi: disc.facet_basis.tabulate(&fq.points).values,
        facet_s: fq.points.iter().map(|p| p[0]).collect(),
        facet_weights: fq.weights,
    })
}

/// Facet-wise `L^2` projection of the exact trace, evaluated from the
/// side of triangle `t`.
fn project_trace(disc: &Discretization, tb: &Tables, exact: &ExactSolution, f: usize, tag: Subdomain) -> Vec<f64> {
    let mut c = vec![0.0; disc.nm()];
    for (p, &w) in tb.facet_weights.iter().enumerate() {
        let val = (exact.u)(disc.facet_point(f, tb.facet_s[p]), tag);
        for (l, cl) in c.iter_mut().enumerate() {
            *cl += w * val * tb.facet_psi[p][l];
        }
    }
    c
}

/// Errors with quadrature of degree `2k + 4`.
pub fn compute_errors(
    disc: &Discretization,
    solution: &DiscreteSolution,
    post: Option<&PostprocessedField>,
    problem: &ProblemData,
) -> Result<ErrorReport, MetricsError> {
    compute_errors_with_degree(disc, solution, post, problem, 2 * disc.k + 4)
}

pub fn compute_errors_with_degree(
    disc: &Discretization,
    solution: &DiscreteSolution,
    post: Option<&PostprocessedField>,
    problem: &ProblemData,
    degree: usize,
) -> Result<ErrorReport, MetricsError> {
    let exact = problem.exact.as_ref().ok_or(MetricsError::MissingExact)?;
    let tb = tables(disc, post.map(|p| p.degree), degree)?;
    let nw = disc.nw();
    let (mut eu, mut eq, mut eqv, mut es) = (0.0, 0.0, 0.0, 0.0);
    for (t, tri) in disc.mesh.triangles().iter().enumerate() {
        let map = &disc.geometry.elements[t];
        let inv_abs_sigma = 1.0 / problem.sigma(tri.tag).abs();
        let (qx, qy) = solution.q[t].split_at(nw);
        let (mut su, mut sq, mut ss) = (0.0, 0.0, 0.0);
        for (p, &w) in tb.weights.iter().enumerate() {
            let x = map.to_physical(tb.points[p]);
            let vals = &tb.cell.values[p];
            let du = (exact.u)(x, tri.tag) - dot(&solution.u[t], vals);
            let q = (exact.q)(x, tri.tag);
            let dq = [q[0] - dot(qx, vals), q[1] - dot(qy, vals)];
            su += w * du * du;
            sq += w * (dq[0] * dq[0] + dq[1] * dq[1]);
            if let (Some(pf), Some(star)) = (post, &tb.star) {
                let d = (exact.u)(x, tri.tag) - dot(&pf.coeffs[t], &star.values[p]);
                ss += w * d * d;
            }
        }
        eu += map.det * su;
        eq += map.det * sq;
        eqv += map.det * sq * inv_abs_sigma;
        es += map.det * ss;
    }
    // each element sees its own facets, so interior facets count twice
    let mut eb = 0.0;
    for tri in disc.mesh.triangles() {
        for &f in &tri.facets {
            if disc.classes.label(f) == FacetLabel::Dirichlet {
                continue;
            }
            let pm = project_trace(disc, &tb, exact, f, tri.tag);
            let d2: f64 = pm.iter().zip(&solution.ubar[f]).map(|(a, b)| (a - b) * (a - b)).sum();
            eb += disc.geometry.facets[f].length * d2;
        }
    }
    Ok(ErrorReport {
        cells: disc.mesh.num_triangles(),
        h: disc.mesh.h(),
        e_u: eu.sqrt(),
        e_q_l2: eq.sqrt(),
        e_q_vh: eqv.sqrt(),
        e_ubar: eb.sqrt(),
        e_ustar: post.map(|_| es.sqrt()),
    })
}

/// Element-wise `L^2` projections of the exact `(u, q)` and the facet-wise
/// projection of its trace, packaged as a discrete solution.
pub fn project_exact(disc: &Discretization, problem: &ProblemData) -> Result<DiscreteSolution, MetricsError> {
    let exact = problem.exact.as_ref().ok_or(MetricsError::MissingExact)?;
    let degree = 2 * disc.k + 4;
    let tb = tables(disc, None, degree)?;
    let nw = disc.nw();
    let mut u = Vec::with_capacity(disc.mesh.num_triangles());
    let mut q = Vec::with_capacity(disc.mesh.num_triangles());
    for (t, tri) in disc.mesh.triangles().iter().enumerate() {
        let map = &disc.geometry.elements[t];
        let (mut cu, mut cq) = (vec![0.0; nw], vec![0.0; 2 * nw]);
        for (p, &w) in tb.weights.iter().enumerate() {
            let x = map.to_physical(tb.points[p]);
            let (ue, qe) = ((exact.u)(x, tri.tag), (exact.q)(x, tri.tag));
            for i in 0..nw {
                let phi = tb.cell.values[p][i];
                cu[i] += w * ue * phi;
                cq[i] += w * qe[0] * phi;
                cq[nw + i] += w * qe[1] * phi;
            }
        }
        u.push(cu);
        q.push(cq);
    }
    let ubar = disc
        .mesh
        .facets()
        .iter()
        .enumerate()
        .map(|(f, facet)| {
            if disc.classes.label(f) == FacetLabel::Dirichlet {
                vec![0.0; disc.nm()]
            } else {
                let tag = disc.mesh.triangles()[facet.owners[0].0].tag;
                project_trace(disc, &tb, exact, f, tag)
            }
        })
        .collect();
    Ok(DiscreteSolution { k: disc.k, q, u, ubar, stats: SolveStats { trace_dofs: 0, relative_asymmetry: 0.0 } })
}

/// `L^2(Omega)` norm of `q_h`.
pub fn flux_norm(disc: &Discretization, solution: &DiscreteSolution) -> f64 {
    solution
        .q
        .iter()
        .zip(&disc.geometry.elements)
        .map(|(c, m)| m.det * c.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// Largest `P_k` moment of the jump of `q_h.n + tau (u_h - ubar_h)` over
/// interior and interface facets.
pub fn flux_jump_residual(disc: &Discretization, solution: &DiscreteSolution, tau: &TauField) -> f64 {
    let nw = disc.nw();
    let psi = disc.facet_basis_values();
    let mut worst: f64 = 0.0;
    for (f, facet) in disc.mesh.facets().iter().enumerate() {
        if facet.is_boundary() {
            continue;
        }
        let len = disc.geometry.facets[f].length;
        let mut moments = vec![0.0; disc.nm()];
        for &(t, e) in &facet.owners {
            let n = disc.normal(t, e);
            let cell = disc.facet_cell_values(t, e);
            let (qx, qy) = solution.q[t].split_at(nw);
            for (p, &w) in disc.facet_quad.weights.iter().enumerate() {
                let ub = dot(&solution.ubar[f], &psi[p]);
                let flux = dot(qx, &cell[p]) * n[0]
                    + dot(qy, &cell[p]) * n[1]
                    + tau.get(f) * (dot(&solution.u[t], &cell[p]) - ub);
                for (l, m) in moments.iter_mut().enumerate() {
                    *m += w * len * flux * psi[p][l];
                }
            }
        }
        worst = moments.iter().fold(worst, |a, m| a.max(m.abs()));
    }
    worst
}

/// `log(e_c / e_f) / log(h_c / h_f)`; absent when either error is zero or
/// the result is not finite.
pub fn eoc(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> Option<f64> {
    if e_coarse <= 0.0 || e_fine <= 0.0 || h_coarse == h_fine {
        return None;
    }
    let r = (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln();
    r.is_finite().then_some(r)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateRow {
    pub u: Option<f64>,
    pub q_l2: Option<f64>,
    pub q_vh: Option<f64>,
    pub ubar: Option<f64>,
    pub ustar: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorReport>,
    pub rates: Vec<RateRow>,
}

impl ConvergenceTable {
    pub fn new(rows: Vec<ErrorReport>) -> Result<Self, MetricsError> {
        if rows.windows(2).any(|w| w[1].h >= w[0].h) {
            return Err(MetricsError::Unordered);
        }
        Ok(Self { rows, rates: Vec::new() })
    }

    pub fn push(&mut self, row: ErrorReport) -> Result<(), MetricsError> {
        if self.rows.last().is_some_and(|last| row.h >= last.h) {
            return Err(MetricsError::Unordered);
        }
        self.rows.push(row);
        Ok(())
    }
}

/// Fills `rates`; the first row has no rates.
pub fn compute_rates(mut table: ConvergenceTable) -> ConvergenceTable {
    let mut rates = vec![RateRow::default()];
    for w in table.rows.windows(2) {
        let (c, f) = (&w[0], &w[1]);
        let r = |a: f64, b: f64| eoc(a, b, c.h, f.h);
        rates.push(RateRow {
            u: r(c.e_u, f.e_u),
            q_l2: r(c.e_q_l2, f.e_q_l2),
            q_vh: r(c.e_q_vh, f.e_q_vh),
            ubar: r(c.e_ubar, f.e_ubar),
            ustar: match (c.e_ustar, f.e_ustar) {
                (Some(a), Some(b)) => r(a, b),
                _ => None,
            },
        });
    }
    rates.truncate(table.rows.len());
    table.rates = rates;
    table
}
