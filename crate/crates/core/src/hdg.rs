//! HDG discretization with sign-changing stabilization.
//!
//! Unknowns per triangle are the flux `q_h` (two scalar copies of the
//! `P_k` basis), the scalar `u_h`, and per facet the trace `ubar_h`. The
//! element-local `(q_h, u_h)` block is eliminated so the global system only
//! couples trace unknowns on non-Dirichlet facets.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;
use twofloat::TwoFloat;

use crate::linalg::{sparse_lu_solve_refined, DenseLu, DenseMatrix, LinalgError, SparseMatrix};
use crate::mesh::{FacetClassification, FacetLabel, Mesh, Point, Subdomain};
use crate::polybasis::{
    make_affine_maps, make_basis, make_quadrature, reference_facet_point, BasisError, BasisSet, ElementKind, Geometry,
    QuadratureRule,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HdgError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("local (q, u) block of triangle {element} is singular; check the tau sign condition")]
    SingularLocal { element: usize },
    #[error("global system: {0}")]
    Global(#[from] LinalgError),
    #[error("quadrature degree {degree} too low on triangle {element} (deviation {deviation:e})")]
    QuadratureTooLow { element: usize, degree: usize, deviation: f64 },
    #[error("mesh has {cells} cells; the unhybridized reference solve is limited to {limit}")]
    TooLarge { cells: usize, limit: usize },
}

pub type ScalarField = Arc<dyn Fn(Point, Subdomain) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point, Subdomain) -> [f64; 2] + Send + Sync>;

pub fn zero_field() -> ScalarField {
    Arc::new(|_, _| 0.0)
}

/// Exact `(u, q = -sigma grad u)`, evaluated with the tag of the element
/// the point belongs to.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarField,
    pub q: VectorField,
}

/// Coefficient, data and optional exact solution of
/// `div(sigma grad u) = f`, `u = u_D` on the Dirichlet boundary and
/// `-sigma grad u . n = u_N` on the Neumann boundary.
#[derive(Clone)]
pub struct ProblemData {
    sigma_plus: f64,
    kappa: f64,
    pub source: ScalarField,
    pub dirichlet: ScalarField,
    pub neumann: ScalarField,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData")
            .field("sigma_plus", &self.sigma_plus)
            .field("kappa", &self.kappa)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemData {
    /// Zero data with `sigma = sigma_plus` on Plus and `kappa * sigma_plus`
    /// on Minus.
    pub fn new(sigma_plus: f64, kappa: f64) -> Result<Self, HdgError> {
        if !(sigma_plus > 0.0 && sigma_plus.is_finite()) {
            return Err(HdgError::InvalidParameter(format!("sigma_plus must be positive, got {sigma_plus}")));
        }
        if !(kappa < 0.0 && kappa.is_finite()) {
            return Err(HdgError::InvalidParameter(format!("contrast must be negative, got {kappa}")));
        }
        Ok(Self {
            sigma_plus,
            kappa,
            source: zero_field(),
            dirichlet: zero_field(),
            neumann: zero_field(),
            exact: None,
        })
    }

    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    pub fn sigma_minus(&self) -> f64 {
        self.kappa * self.sigma_plus
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sigma(&self, tag: Subdomain) -> f64 {
        match tag {
            Subdomain::Plus => self.sigma_plus,
            Subdomain::Minus => self.sigma_minus(),
        }
    }

    pub fn with_source(mut self, f: ScalarField) -> Self {
        self.source = f;
        self
    }

    pub fn with_dirichlet(mut self, g: ScalarField) -> Self {
        self.dirichlet = g;
        self
    }

    pub fn with_neumann(mut self, g: ScalarField) -> Self {
        self.neumann = g;
        self
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    /// Multiplies `f`, `u_D`, `u_N` (and the exact solution) by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let scale = |g: &ScalarField| -> ScalarField {
            let g = g.clone();
            Arc::new(move |x, t| c * g(x, t))
        };
        Self {
            sigma_plus: self.sigma_plus,
            kappa: self.kappa,
            source: scale(&self.source),
            dirichlet: scale(&self.dirichlet),
            neumann: scale(&self.neumann),
            exact: self.exact.as_ref().map(|e| {
                let q = e.q.clone();
                ExactSolution { u: scale(&e.u), q: Arc::new(move |x, t| q(x, t).map(|v| c * v)) }
            }),
        }
    }
}

/// Stabilization value per facet.
#[derive(Debug, Clone, PartialEq)]
pub struct TauField {
    values: Vec<f64>,
}

impl TauField {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn get(&self, f: usize) -> f64 {
        self.values[f]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `+gamma` on facets of Plus triangles, `-gamma` on facets of Minus
/// triangles, zero on the interface.
pub fn make_tau(mesh: &Mesh, classes: &FacetClassification, gamma: f64) -> Result<TauField, HdgError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(HdgError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let values = mesh
        .facets()
        .iter()
        .enumerate()
        .map(|(f, facet)| match classes.label(f) {
            FacetLabel::Interface => 0.0,
            FacetLabel::InteriorPlus => gamma,
            FacetLabel::InteriorMinus => -gamma,
            FacetLabel::Dirichlet | FacetLabel::Neumann => match mesh.triangles()[facet.owners[0].0].tag {
                Subdomain::Plus => gamma,
                Subdomain::Minus => -gamma,
            },
        })
        .collect();
    Ok(TauField { values })
}

/// Checks the sign table: zero on the interface, otherwise the sign of the
/// owning subdomain. Returns the first offending facet.
pub fn check_tau_signs(mesh: &Mesh, classes: &FacetClassification, tau: &TauField) -> Result<(), usize> {
    for (f, facet) in mesh.facets().iter().enumerate() {
        let t = tau.get(f);
        let ok = match classes.label(f) {
            FacetLabel::Interface => t == 0.0,
            _ => facet.owners.iter().all(|&(k, _)| match mesh.triangles()[k].tag {
                Subdomain::Plus => t > 0.0,
                Subdomain::Minus => t < 0.0,
            }),
        };
        if !ok {
            return Err(f);
        }
    }
    Ok(())
}

/// Cell basis values at facet quadrature points for one local facet and
/// orientation.
#[derive(Debug, Clone)]
struct FacetTable {
    values: Vec<Vec<f64>>,
}

/// Mesh, geometry, bases and quadrature tables for degree `k`.
#[derive(Debug, Clone)]
pub struct Discretization<'m> {
    pub mesh: &'m Mesh,
    pub classes: &'m FacetClassification,
    pub geometry: Geometry,
    pub k: usize,
    pub cell_basis: BasisSet,
    pub facet_basis: BasisSet,
    pub cell_quad: QuadratureRule,
    pub facet_quad: QuadratureRule,
    cell_values: Vec<Vec<f64>>,
    cell_grads: Vec<Vec<[f64; 2]>>,
    facet_values: Vec<Vec<f64>>,
    /// `[local facet][reversed]`
    facet_tables: [[FacetTable; 2]; 3],
}

impl<'m> Discretization<'m> {
    /// Quadrature exact to degree `2k + 2`.
    pub fn new(mesh: &'m Mesh, classes: &'m FacetClassification, k: usize) -> Result<Self, HdgError> {
        Self::with_quadrature(mesh, classes, k, 2 * k + 2)
    }

    pub fn with_quadrature(
        mesh: &'m Mesh,
        classes: &'m FacetClassification,
        k: usize,
        degree: usize,
    ) -> Result<Self, HdgError> {
        if k > 6 {
            return Err(HdgError::InvalidParameter(format!("degree {k} unsupported (max 6)")));
        }
        let geometry = make_affine_maps(mesh)?;
        let cell_basis = make_basis(ElementKind::Triangle, k)?;
        let facet_basis = make_basis(ElementKind::Segment, k)?;
        let cell_quad = make_quadrature(ElementKind::Triangle, degree)?;
        let facet_quad = make_quadrature(ElementKind::Segment, degree)?;
        let tab = cell_basis.tabulate(&cell_quad.points);
        let facet_values = facet_basis.tabulate(&facet_quad.points).values;
        let table = |e: usize, reversed: bool| FacetTable {
            values: facet_quad
                .points
                .iter()
                .map(|s| {
                    let t = if reversed { 1.0 - s[0] } else { s[0] };
                    cell_basis.eval(reference_facet_point(e, t))
                })
                .collect(),
        };
        let facet_tables = [0, 1, 2].map(|e| [table(e, false), table(e, true)]);
        Ok(Self {
            mesh,
            classes,
            geometry,
            k,
            cell_basis,
            facet_basis,
            cell_quad,
            facet_quad,
            cell_values: tab.values,
            cell_grads: tab.grads,
            facet_values,
            facet_tables,
        })
    }

    pub fn nw(&self) -> usize {
        self.cell_basis.dim()
    }

    pub fn nm(&self) -> usize {
        self.facet_basis.dim()
    }

    /// Whether local facet `e` of triangle `t` runs against the facet's
    /// stored orientation.
    pub fn is_reversed(&self, t: usize, e: usize) -> bool {
        let tri = &self.mesh.triangles()[t];
        tri.vertices[e] != self.mesh.facets()[tri.facets[e]].vertices[0]
    }

    /// Physical point at facet parameter `s` of global facet `f`.
    pub fn facet_point(&self, f: usize, s: f64) -> Point {
        let [a, b] = self.mesh.facet_points(f);
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }

    /// Cell basis at the facet quadrature points of local facet `e` of `t`.
    pub(crate) fn facet_cell_values(&self, t: usize, e: usize) -> &[Vec<f64>] {
        &self.facet_tables[e][self.is_reversed(t, e) as usize].values
    }

    pub(crate) fn facet_basis_values(&self) -> &[Vec<f64>] {
        &self.facet_values
    }

    pub(crate) fn cell_values(&self) -> &[Vec<f64>] {
        &self.cell_values
    }

    pub(crate) fn cell_grads(&self) -> &[Vec<[f64; 2]>] {
        &self.cell_grads
    }

    /// Outward unit normal of triangle `t` on its local facet `e`.
    pub fn normal(&self, t: usize, e: usize) -> [f64; 2] {
        let f = self.mesh.triangles()[t].facets[e];
        let owner = self.mesh.facets()[f].owners.iter().position(|&(k, _)| k == t).unwrap();
        self.geometry.facets[f].normals[owner]
    }
}

/// Dense element system in the ordering `[q_x, q_y, u, ubar_0, ubar_1,
/// ubar_2]`, where `ubar_e` belongs to local facet `e`.
#[derive(Debug, Clone)]
pub struct LocalElementSystem {
    pub element: usize,
    pub nw: usize,
    pub nm: usize,
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl LocalElementSystem {
    /// Size of the `(q, u)` block.
    pub fn interior_dim(&self) -> usize {
        3 * self.nw
    }

    pub fn dim(&self) -> usize {
        3 * self.nw + 3 * self.nm
    }

    fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> DenseMatrix {
        let mut b = DenseMatrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                b[(i, j)] = self.matrix[(r, c)];
            }
        }
        b
    }

    /// `(sigma^-1 q, r)_K`.
    pub fn a_block(&self) -> DenseMatrix {
        self.block(0..2 * self.nw, 0..2 * self.nw)
    }

    /// Rows `v`, columns `q`: `(q, grad v)_K - <q.n, v>_dK`.
    pub fn b_block(&self) -> DenseMatrix {
        self.block(2 * self.nw..3 * self.nw, 0..2 * self.nw)
    }

    /// `-<tau u, v>_dK`.
    pub fn c_block(&self) -> DenseMatrix {
        self.block(2 * self.nw..3 * self.nw, 2 * self.nw..3 * self.nw)
    }

    /// Rows `vbar`, columns `(q, u)`.
    pub fn facet_coupling(&self) -> DenseMatrix {
        self.block(3 * self.nw..self.dim(), 0..3 * self.nw)
    }
}

/// Element matrix and right-hand side of the three HDG equations tested
/// with the local basis functions of `t`.
pub fn assemble_local(disc: &Discretization, t: usize, problem: &ProblemData, tau: &TauField) -> LocalElementSystem {
    let (nw, nm) = (disc.nw(), disc.nm());
    let n = 3 * nw + 3 * nm;
    let (qx, qy, u) = (0, nw, 2 * nw);
    let bar = |e: usize| 3 * nw + e * nm;
    let mut m = DenseMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    let tri = &disc.mesh.triangles()[t];
    let map = &disc.geometry.elements[t];
    let sigma = problem.sigma(tri.tag);
    let det = map.det;

    // volume terms
    for (p, &w) in disc.cell_quad.weights.iter().enumerate() {
        let wd = w * det;
        let vals = &disc.cell_values()[p];
        let grads: Vec<[f64; 2]> = disc.cell_grads()[p].iter().map(|&g| map.grad(g)).collect();
        let x = map.to_physical(disc.cell_quad.points[p]);
        let f = (problem.source)(x, tri.tag);
        for i in 0..nw {
            for j in 0..nw {
                let mass = wd * vals[i] * vals[j];
                m[(qx + i, qx + j)] += mass / sigma;
                m[(qy + i, qy + j)] += mass / sigma;
                // (grad u_j, r_i)
                m[(qx + i, u + j)] += wd * grads[j][0] * vals[i];
                m[(qy + i, u + j)] += wd * grads[j][1] * vals[i];
                // (q_j, grad v_i)
                m[(u + i, qx + j)] += wd * vals[j] * grads[i][0];
                m[(u + i, qy + j)] += wd * vals[j] * grads[i][1];
            }
            rhs[u + i] += wd * f * vals[i];
        }
    }

    // facet terms
    for e in 0..3 {
        let f = tri.facets[e];
        let label = disc.classes.label(f);
        let len = disc.geometry.facets[f].length;
        let normal = disc.normal(t, e);
        let tau_f = tau.get(f);
        let cell = disc.facet_cell_values(t, e);
        for (p, &w) in disc.facet_quad.weights.iter().enumerate() {
            let wl = w * len;
            let phi = &cell[p];
            let psi = &disc.facet_values[p];
            let s = disc.facet_quad.points[p][0];
            let x = disc.facet_point(f, s);
            for i in 0..nw {
                for j in 0..nw {
                    let pp = wl * phi[i] * phi[j];
                    // -<u, r.n>
                    m[(qx + i, u + j)] -= pp * normal[0];
                    m[(qy + i, u + j)] -= pp * normal[1];
                    // -<q.n, v>
                    m[(u + i, qx + j)] -= pp * normal[0];
                    m[(u + i, qy + j)] -= pp * normal[1];
                    // -<tau u, v>
                    m[(u + i, u + j)] -= tau_f * pp;
                }
                for l in 0..nm {
                    let pm = wl * phi[i] * psi[l];
                    // +<ubar, r.n>
                    m[(qx + i, bar(e) + l)] += pm * normal[0];
                    m[(qy + i, bar(e) + l)] += pm * normal[1];
                    // +<tau ubar, v>
                    m[(u + i, bar(e) + l)] += tau_f * pm;
                    // <q.n + tau u, vbar>
                    m[(bar(e) + l, qx + i)] += pm * normal[0];
                    m[(bar(e) + l, qy + i)] += pm * normal[1];
                    m[(bar(e) + l, u + i)] += tau_f * pm;
                }
            }
            for l in 0..nm {
                for j in 0..nm {
                    m[(bar(e) + l, bar(e) + j)] -= tau_f * wl * psi[l] * psi[j];
                }
            }
            match label {
                FacetLabel::Dirichlet => {
                    let g = (problem.dirichlet)(x, tri.tag);
                    for i in 0..nw {
                        rhs[qx + i] -= wl * g * phi[i] * normal[0];
                        rhs[qy + i] -= wl * g * phi[i] * normal[1];
                        rhs[u + i] -= wl * tau_f * g * phi[i];
                    }
                }
                FacetLabel::Neumann => {
                    let g = (problem.neumann)(x, tri.tag);
                    for l in 0..nm {
                        rhs[bar(e) + l] += wl * g * psi[l];
                    }
                }
                _ => {}
            }
        }
    }
    LocalElementSystem { element: t, nw, nm, matrix: m, rhs }
}

/// Re-assembles `t` with a rule four degrees higher and compares the
/// matrices.
pub fn verify_quadrature(
    disc: &Discretization,
    t: usize,
    problem: &ProblemData,
    tau: &TauField,
) -> Result<(), HdgError> {
    let degree = disc.cell_quad.degree;
    let fine = Discretization::with_quadrature(disc.mesh, disc.classes, disc.k, degree + 4)?;
    let a = assemble_local(disc, t, problem, tau).matrix;
    let b = assemble_local(&fine, t, problem, tau).matrix;
    let scale = b.max_abs().max(f64::MIN_POSITIVE);
    let mut deviation: f64 = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            deviation = deviation.max((a[(i, j)] - b[(i, j)]).abs() / scale);
        }
    }
    if deviation > 1e-12 {
        return Err(HdgError::QuadratureTooLow { element: t, degree, deviation });
    }
    Ok(())
}

/// Schur complement of one element on its trace unknowns together with the
/// data needed to recover `(q_h, u_h)`.
#[derive(Debug, Clone)]
pub struct CondensedElement {
    /// `3 nm x 3 nm`, rows and columns ordered by local facet.
    pub schur: DenseMatrix,
    /// Rounding error of `schur`.
    schur_lo: DenseMatrix,
    pub rhs: Vec<f64>,
    /// `M^-1 G`, `3 nw x 3 nm`.
    recovery: DenseMatrix,
    /// `M^-1 F`.
    recovery_rhs: Vec<f64>,
}

impl CondensedElement {
    /// `(q, u)` coefficients given the element's trace coefficients.
    pub fn recover(&self, ubar: &[f64]) -> Vec<f64> {
        let g = self.recovery.mul_vec(ubar);
        self.recovery_rhs.iter().zip(&g).map(|(a, b)| a - b).collect()
    }
}

/// Eliminates `(q, u)` from the element system. The elimination runs in
/// double-double arithmetic: near the critical contrast the trace system
/// amplifies rounding errors in the Schur complement far more than errors
/// in the data.
pub fn condense(local: &LocalElementSystem) -> Result<CondensedElement, HdgError> {
    let ni = local.interior_dim();
    let nt = 3 * local.nm;
    let dd = TwoFloat::from_f64;
    let mut inner: Vec<Vec<TwoFloat>> = (0..ni).map(|i| (0..ni).map(|j| dd(local.matrix[(i, j)])).collect()).collect();
    let mut coupled: Vec<Vec<TwoFloat>> =
        (0..ni).map(|i| (0..nt).map(|j| dd(local.matrix[(i, ni + j)])).chain([dd(local.rhs[i])]).collect()).collect();
    dd_lu_solve(&mut inner, &mut coupled).ok_or(HdgError::SingularLocal { element: local.element })?;
    let mut schur = DenseMatrix::zeros(nt, nt);
    let mut schur_lo = DenseMatrix::zeros(nt, nt);
    let mut rhs = vec![0.0; nt];
    for a in 0..nt {
        let row = local.matrix.row(ni + a);
        let reduce =
            |b: usize| -> TwoFloat { (0..ni).fold(TwoFloat::from_f64(0.0), |acc, i| acc + dd(row[i]) * coupled[i][b]) };
        for b in 0..nt {
            let v = dd(local.matrix[(ni + a, ni + b)]) - reduce(b);
            schur[(a, b)] = v.hi();
            schur_lo[(a, b)] = v.lo();
        }
        rhs[a] = f64::from(dd(local.rhs[ni + a]) - reduce(nt));
    }
    let mut recovery = DenseMatrix::zeros(ni, nt);
    let mut recovery_rhs = vec![0.0; ni];
    for i in 0..ni {
        for j in 0..nt {
            recovery[(i, j)] = f64::from(coupled[i][j]);
        }
        recovery_rhs[i] = f64::from(coupled[i][nt]);
    }
    Ok(CondensedElement { schur, schur_lo, rhs, recovery, recovery_rhs })
}

/// Overwrites `b` with `a^-1 b` by LU with partial pivoting; `None` when a
/// pivot falls below `1e-14 max|a|`.
fn dd_lu_solve(a: &mut [Vec<TwoFloat>], b: &mut [Vec<TwoFloat>]) -> Option<()> {
    let n = a.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.hi().abs()));
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].hi().abs().total_cmp(&a[j][k].hi().abs()))?;
        if !(a[p][k].hi().abs() > 1e-14 * scale) {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        let (top, rest) = a.split_at_mut(k + 1);
        let (btop, brest) = b.split_at_mut(k + 1);
        let (pivot_row, pivot_b) = (&top[k], &btop[k]);
        for (row, brow) in rest.iter_mut().zip(brest.iter_mut()) {
            let l = row[k] / pivot_row[k];
            for (x, &t) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                *x -= l * t;
            }
            for (x, &t) in brow.iter_mut().zip(pivot_b) {
                *x -= l * t;
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..b[k].len() {
            let mut s = b[k][j];
            for i in k + 1..n {
                s -= a[k][i] * b[i][j];
            }
            b[k][j] = s / a[k][k];
        }
    }
    Some(())
}

/// Global numbering of trace unknowns: facets in mesh order, Dirichlet
/// facets excluded.
#[derive(Debug, Clone)]
pub struct TraceDofs {
    offsets: Vec<Option<usize>>,
    nm: usize,
    count: usize,
}

impl TraceDofs {
    pub fn new(classes: &FacetClassification, nm: usize) -> Self {
        let mut next = 0;
        let offsets = classes
            .labels()
            .iter()
            .map(|&l| {
                if l == FacetLabel::Dirichlet {
                    None
                } else {
                    next += nm;
                    Some(next - nm)
                }
            })
            .collect();
        Self { offsets, nm, count: next }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn offset(&self, f: usize) -> Option<usize> {
        self.offsets[f]
    }

    pub fn nm(&self) -> usize {
        self.nm
    }
}

#[derive(Debug, Clone)]
pub struct TraceSystem {
    pub matrix: SparseMatrix,
    /// Rounding error of `matrix` from the double-double assembly.
    pub correction: SparseMatrix,
    pub rhs: Vec<f64>,
    pub dofs: TraceDofs,
    pub condensed: Vec<CondensedElement>,
}

impl TraceSystem {
    /// `max |S - S^T| / max |S|`.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.matrix.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            self.matrix.max_asymmetry() / scale
        }
    }
}

pub fn assemble_trace_system(
    disc: &Discretization,
    problem: &ProblemData,
    tau: &TauField,
) -> Result<TraceSystem, HdgError> {
    let nm = disc.nm();
    let dofs = TraceDofs::new(disc.classes, nm);
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; dofs.len()];
    let mut condensed = Vec::with_capacity(disc.mesh.num_triangles());
    for (t, tri) in disc.mesh.triangles().iter().enumerate() {
        let local = assemble_local(disc, t, problem, tau);
        let c = condense(&local)?;
        for a in 0..3 {
            let Some(oa) = dofs.offset(tri.facets[a]) else { continue };
            for l in 0..nm {
                rhs[oa + l] += c.rhs[a * nm + l];
                for b in 0..3 {
                    let Some(ob) = dofs.offset(tri.facets[b]) else { continue };
                    for j in 0..nm {
                        let (r, s) = (a * nm + l, b * nm + j);
                        triplets.push((oa + l, ob + j, TwoFloat::new_add(c.schur[(r, s)], c.schur_lo[(r, s)])));
                    }
                }
            }
        }
        condensed.push(c);
    }
    let (matrix, correction) = SparseMatrix::from_triplets_dd(dofs.len(), &triplets)?;
    Ok(TraceSystem { matrix, correction, rhs, dofs, condensed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub trace_dofs: usize,
    pub relative_asymmetry: f64,
}

/// HDG coefficients in the orthonormal bases: `q[t]` holds the x- then
/// y-component coefficients, `u[t]` the scalar, `ubar[f]` the trace on
/// facet `f` (zero on Dirichlet facets).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub k: usize,
    pub q: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub ubar: Vec<Vec<f64>>,
    pub stats: SolveStats,
}

impl DiscreteSolution {
    /// Sum of the coefficient 2-norms of `q`, `u` and `ubar`.
    pub fn coefficient_norm(&self) -> f64 {
        let norm = |v: &Vec<Vec<f64>>| v.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        norm(&self.q) + norm(&self.u) + norm(&self.ubar)
    }

    /// Trace coefficients of triangle `t` ordered by local facet.
    pub fn local_trace(&self, mesh: &Mesh, t: usize) -> Vec<f64> {
        mesh.triangles()[t].facets.iter().flat_map(|&f| self.ubar[f].iter().copied()).collect()
    }
}

pub fn solve_hdg(
    mesh: &Mesh,
    classes: &FacetClassification,
    k: usize,
    problem: &ProblemData,
    tau: &TauField,
) -> Result<DiscreteSolution, HdgError> {
    let disc = Discretization::new(mesh, classes, k)?;
    solve_hdg_with(&disc, problem, tau)
}

pub fn solve_hdg_with(
    disc: &Discretization,
    problem: &ProblemData,
    tau: &TauField,
) -> Result<DiscreteSolution, HdgError> {
    if tau.values().len() != disc.mesh.num_facets() {
        return Err(HdgError::InvalidParameter("tau field does not match the mesh".into()));
    }
    let system = assemble_trace_system(disc, problem, tau)?;
    let x = sparse_lu_solve_refined(&system.matrix, Some(&system.correction), &system.rhs)?;
    let nm = disc.nm();
    let nw = disc.nw();
    let ubar: Vec<Vec<f64>> = (0..disc.mesh.num_facets())
        .map(|f| match system.dofs.offset(f) {
            Some(o) => x[o..o + nm].to_vec(),
            None => vec![0.0; nm],
        })
        .collect();
    let mut q = Vec::with_capacity(disc.mesh.num_triangles());
    let mut u = Vec::with_capacity(disc.mesh.num_triangles());
    for (t, tri) in disc.mesh.triangles().iter().enumerate() {
        let local: Vec<f64> = tri.facets.iter().flat_map(|&f| ubar[f].iter().copied()).collect();
        let qu = system.condensed[t].recover(&local);
        q.push(qu[..2 * nw].to_vec());
        u.push(qu[2 * nw..].to_vec());
    }
    Ok(DiscreteSolution {
        k: disc.k,
        q,
        u,
        ubar,
        stats: SolveStats { trace_dofs: system.dofs.len(), relative_asymmetry: system.relative_asymmetry() },
    })
}

/// Largest residual of the three HDG equations for a given triple,
/// relative to the size of the terms involved.
pub fn hdg_residual(disc: &Discretization, problem: &ProblemData, tau: &TauField, sol: &DiscreteSolution) -> f64 {
    let nm = disc.nm();
    let dofs = TraceDofs::new(disc.classes, nm);
    let mut trace_res = vec![0.0; dofs.len()];
    let mut trace_scale = vec![0.0f64; dofs.len()];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (t, tri) in disc.mesh.triangles().iter().enumerate() {
        let local = assemble_local(disc, t, problem, tau);
        let mut x = sol.q[t].clone();
        x.extend_from_slice(&sol.u[t]);
        x.extend(sol.local_trace(disc.mesh, t));
        for i in 0..local.dim() {
            let terms: Vec<f64> = local.matrix.row(i).iter().zip(&x).map(|(a, b)| a * b).collect();
            let r = terms.iter().sum::<f64>() - local.rhs[i];
            let s = terms.iter().fold(local.rhs[i].abs(), |m, v| m.max(v.abs()));
            if i < local.interior_dim() {
                worst = worst.max(r.abs());
                scale = scale.max(s);
            } else {
                let (e, l) = ((i - local.interior_dim()) / nm, (i - local.interior_dim()) % nm);
                if let Some(o) = dofs.offset(tri.facets[e]) {
                    trace_res[o + l] += r;
                    trace_scale[o + l] = trace_scale[o + l].max(s);
                }
            }
        }
    }
    for (r, s) in trace_res.iter().zip(&trace_scale) {
        worst = worst.max(r.abs());
        scale = scale.max(*s);
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Cell limit for [`solve_hdg_unhybridized`].
pub const UNHYBRIDIZED_LIMIT: usize = 64;

/// Solves the full `(q, u, ubar)` system with one dense LU, without static
/// condensation. Reference path for small meshes.
pub fn solve_hdg_unhybridized(
    mesh: &Mesh,
    classes: &FacetClassification,
    k: usize,
    problem: &ProblemData,
    tau: &TauField,
) -> Result<DiscreteSolution, HdgError> {
    if mesh.num_triangles() > UNHYBRIDIZED_LIMIT {
        return Err(HdgError::TooLarge { cells: mesh.num_triangles(), limit: UNHYBRIDIZED_LIMIT });
    }
    let disc = Discretization::new(mesh, classes, k)?;
    let (nw, nm) = (disc.nw(), disc.nm());
    let nt = mesh.num_triangles();
    let dofs = TraceDofs::new(classes, nm);
    let interior = 3 * nw * nt;
    let n = interior + dofs.len();
    let mut a = DenseMatrix::zeros(n, n);
    let mut b = vec![0.0; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let local = assemble_local(&disc, t, problem, tau);
        let global = |i: usize| -> Option<usize> {
            if i < 3 * nw {
                Some(3 * nw * t + i)
            } else {
                let (e, l) = ((i - 3 * nw) / nm, (i - 3 * nw) % nm);
                dofs.offset(tri.facets[e]).map(|o| interior + o + l)
            }
        };
        for i in 0..local.dim() {
            let Some(gi) = global(i) else { continue };
            b[gi] += local.rhs[i];
            for j in 0..local.dim() {
                if let Some(gj) = global(j) {
                    a[(gi, gj)] += local.matrix[(i, j)];
                }
            }
        }
    }
    let lu = DenseLu::factor(&a)?;
    let x = lu.solve(&b);
    let q = (0..nt).map(|t| x[3 * nw * t..3 * nw * t + 2 * nw].to_vec()).collect();
    let u = (0..nt).map(|t| x[3 * nw * t + 2 * nw..3 * nw * (t + 1)].to_vec()).collect();
    let ubar = (0..mesh.num_facets())
        .map(|f| match dofs.offset(f) {
            Some(o) => x[interior + o..interior + o + nm].to_vec(),
            None => vec![0.0; nm],
        })
        .collect();
    Ok(DiscreteSolution {
        k,
        q,
        u,
        ubar,
        stats: SolveStats { trace_dofs: dofs.len(), relative_asymmetry: a.max_asymmetry() / a.max_abs() },
    })
}

/// Evaluates a modal expansion.
#[inline]
pub fn dot(coeffs: &[f64], values: &[f64]) -> f64 {
    coeffs.iter().zip(values).map(|(c, v)| c * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, classify_facets, BoundaryKind, DiagonalPattern, DomainSpec};
    use crate::problems::{cavity_domain, cavity_problem, linear_transmission_manufactured};

    fn cavity(n: usize, pattern: DiagonalPattern) -> (Mesh, FacetClassification) {
        let domain = cavity_domain();
        let mesh = build_structured_mesh(&domain, n, pattern).unwrap();
        let classes = classify_facets(&mesh, &domain).unwrap();
        (mesh, classes)
    }

    fn unit_square(n: usize) -> (Mesh, FacetClassification) {
        let domain =
            DomainSpec::vertical_strips(&[0.0, 1.0], 0.0, 1.0, &[Subdomain::Plus], BoundaryKind::Dirichlet).unwrap();
        let mesh = build_structured_mesh(&domain, n, DiagonalPattern::UniformDiagonals).unwrap();
        let classes = classify_facets(&mesh, &domain).unwrap();
        (mesh, classes)
    }

    fn rel_diff(a: &DiscreteSolution, b: &DiscreteSolution) -> f64 {
        let flat =
            |s: &DiscreteSolution| -> Vec<f64> { s.q.iter().chain(&s.u).chain(&s.ubar).flatten().copied().collect() };
        let (x, y) = (flat(a), flat(b));
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        x.iter().zip(&y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / scale
    }

    #[test]
    fn tau_sign_table() {
        let (mesh, classes) = cavity(4, DiagonalPattern::MirroredDiagonals);
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        assert!(check_tau_signs(&mesh, &classes, &tau).is_ok());
        for (f, facet) in mesh.facets().iter().enumerate() {
            let on_interface = facet.vertices.iter().all(|&v| mesh.vertices()[v][0] == 0.0);
            assert_eq!(tau.get(f) == 0.0, on_interface);
            assert!([1.0, -1.0, 0.0].contains(&tau.get(f)));
        }
        let (mesh, classes) = unit_square(3);
        let tau = make_tau(&mesh, &classes, 2.5).unwrap();
        assert!(tau.values().iter().all(|&t| t == 2.5));
        assert!(make_tau(&mesh, &classes, 0.0).is_err());
        let mut bad = tau.values().to_vec();
        bad[0] = -1.0;
        assert_eq!(check_tau_signs(&mesh, &classes, &TauField::from_values(bad)), Err(0));
    }

    #[test]
    fn local_block_dimensions_and_symmetry() {
        let (mesh, classes) = unit_square(1);
        let disc = Discretization::new(&mesh, &classes, 0).unwrap();
        let problem = ProblemData::new(1.0, -1.0).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        let local = assemble_local(&disc, 0, &problem, &tau);
        assert_eq!((local.a_block().rows(), local.a_block().cols()), (2, 2));
        assert_eq!((local.b_block().rows(), local.b_block().cols()), (1, 2));
        assert_eq!((local.facet_coupling().rows(), local.facet_coupling().cols()), (3, 3));
        assert!(local.rhs.iter().all(|&v| v == 0.0));
        for k in 0..=3 {
            let disc = Discretization::new(&mesh, &classes, k).unwrap();
            let m = assemble_local(&disc, 1, &problem, &tau).matrix;
            assert!(m.max_asymmetry() <= 1e-14 * m.max_abs(), "k={k}");
            assert!(verify_quadrature(&disc, 1, &problem, &tau).is_ok());
        }
    }

    #[test]
    fn a_block_sign_follows_subdomain() {
        let (mesh, classes) = cavity(2, DiagonalPattern::MirroredDiagonals);
        let disc = Discretization::new(&mesh, &classes, 1).unwrap();
        let problem = ProblemData::new(1.0, -2.0).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        for t in 0..mesh.num_triangles() {
            let a = assemble_local(&disc, t, &problem, &tau).a_block();
            let sign = problem.sigma(mesh.triangles()[t].tag).signum();
            for i in 0..a.rows() {
                assert!(sign * a[(i, i)] > 0.0);
            }
        }
    }

    #[test]
    fn too_low_quadrature_is_flagged() {
        let (mesh, classes) = unit_square(1);
        let disc = Discretization::with_quadrature(&mesh, &classes, 3, 2).unwrap();
        let problem = ProblemData::new(1.0, -1.0).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        assert!(matches!(
            verify_quadrature(&disc, 0, &problem, &tau),
            Err(HdgError::QuadratureTooLow { element: 0, .. })
        ));
    }

    #[test]
    fn schur_complements_are_symmetric() {
        let (mesh, classes) = cavity(2, DiagonalPattern::UniformDiagonals);
        let problem = cavity_problem(1.0, -1.5).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        for k in 0..=3 {
            let disc = Discretization::new(&mesh, &classes, k).unwrap();
            for t in 0..mesh.num_triangles() {
                let s = condense(&assemble_local(&disc, t, &problem, &tau)).unwrap().schur;
                assert!(s.max_asymmetry() <= 1e-12 * s.max_abs());
            }
        }
    }

    #[test]
    fn mirrored_elements_have_opposite_schur_complements() {
        // two triangles mirrored across x = 0
        let vertices = vec![[0.0, 0.0], [0.0, 1.0], [-0.7, 0.4], [0.7, 0.4]];
        let cells = vec![([0, 1, 2], Subdomain::Plus), ([0, 3, 1], Subdomain::Minus)];
        let mesh = Mesh::from_triangles(vertices, cells).unwrap();
        let domain = DomainSpec::new(
            vec![[0.0, 0.0], [0.7, 0.4], [0.0, 1.0], [-0.7, 0.4]],
            vec![
                crate::mesh::Region { polygon: vec![[0.0, 0.0], [0.0, 1.0], [-0.7, 0.4]], tag: Subdomain::Plus },
                crate::mesh::Region { polygon: vec![[0.0, 0.0], [0.7, 0.4], [0.0, 1.0]], tag: Subdomain::Minus },
            ],
            [[0.0, 0.0], [0.7, 0.4], [0.0, 1.0], [-0.7, 0.4]]
                .windows(2)
                .map(|w| (w[0], w[1]))
                .chain(std::iter::once(([-0.7, 0.4], [0.0, 0.0])))
                .map(|(a, b)| crate::mesh::BoundarySegment { a, b, kind: BoundaryKind::Dirichlet })
                .collect(),
            vec![vec![[0.0, 0.0], [0.0, 1.0]]],
        )
        .unwrap();
        let classes = classify_facets(&mesh, &domain).unwrap();
        let problem = ProblemData::new(1.0, -1.0).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        let disc = Discretization::new(&mesh, &classes, 2).unwrap();
        let s0 = condense(&assemble_local(&disc, 0, &problem, &tau)).unwrap().schur;
        let s1 = condense(&assemble_local(&disc, 1, &problem, &tau)).unwrap().schur;
        // reflection maps local facets 0, 1, 2 of triangle 0 to 2, 1, 0 of
        // triangle 1; a reversed facet parameter flips Legendre mode l by (-1)^l
        let nm = disc.nm();
        let perm = [2, 1, 0];
        let same_direction = |a: usize| {
            let fa = mesh.facet_points(mesh.triangles()[0].facets[a])[0];
            let fb = mesh.facet_points(mesh.triangles()[1].facets[perm[a]])[0];
            (-fa[0] - fb[0]).abs() < 1e-14 && (fa[1] - fb[1]).abs() < 1e-14
        };
        let sign = |a: usize, l: usize| if same_direction(a) { 1.0 } else { (-1.0f64).powi(l as i32) };
        for a in 0..3 {
            for b in 0..3 {
                for l in 0..nm {
                    for j in 0..nm {
                        let x = s0[(a * nm + l, b * nm + j)];
                        let y = s1[(perm[a] * nm + l, perm[b] * nm + j)];
                        assert!((x + sign(a, l) * sign(b, j) * y).abs() < 1e-12, "({a},{b},{l},{j}): {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn one_element_matches_direct_solve() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mesh = Mesh::from_triangles(vertices, vec![([0, 1, 2], Subdomain::Plus)]).unwrap();
        let domain = DomainSpec::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![crate::mesh::Region { polygon: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], tag: Subdomain::Plus }],
            vec![
                crate::mesh::BoundarySegment { a: [0.0, 0.0], b: [1.0, 0.0], kind: BoundaryKind::Dirichlet },
                crate::mesh::BoundarySegment { a: [1.0, 0.0], b: [0.0, 1.0], kind: BoundaryKind::Dirichlet },
                crate::mesh::BoundarySegment { a: [0.0, 1.0], b: [0.0, 0.0], kind: BoundaryKind::Dirichlet },
            ],
            vec![],
        )
        .unwrap();
        let classes = classify_facets(&mesh, &domain).unwrap();
        let problem = ProblemData::new(1.0, -1.0)
            .unwrap()
            .with_source(Arc::new(|p, _| 1.0 + p[0]))
            .with_dirichlet(Arc::new(|p, _| p[1]));
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        let a = solve_hdg(&mesh, &classes, 2, &problem, &tau).unwrap();
        assert_eq!(a.stats.trace_dofs, 0);
        let b = solve_hdg_unhybridized(&mesh, &classes, 2, &problem, &tau).unwrap();
        assert!(rel_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn condensed_matches_unhybridized() {
        for pattern in [DiagonalPattern::MirroredDiagonals, DiagonalPattern::UniformDiagonals] {
            let (mesh, classes) = cavity(2, pattern);
            let problem = cavity_problem(1.0, -1.5).unwrap();
            let tau = make_tau(&mesh, &classes, 1.0).unwrap();
            for k in 0..=2 {
                let a = solve_hdg(&mesh, &classes, k, &problem, &tau).unwrap();
                let b = solve_hdg_unhybridized(&mesh, &classes, k, &problem, &tau).unwrap();
                assert!(rel_diff(&a, &b) < 1e-9, "k={k}");
            }
        }
        let (mesh, classes) = cavity(8, DiagonalPattern::MirroredDiagonals);
        let problem = ProblemData::new(1.0, -2.0).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        assert!(matches!(solve_hdg_unhybridized(&mesh, &classes, 1, &problem, &tau), Err(HdgError::TooLarge { .. })));
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let (mesh, classes) = cavity(4, DiagonalPattern::MirroredDiagonals);
        let problem = ProblemData::new(1.0, -1.001).unwrap();
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        for k in 0..=2 {
            let sol = solve_hdg(&mesh, &classes, k, &problem, &tau).unwrap();
            assert!(sol.coefficient_norm() <= 1e-10);
            assert!(sol.stats.relative_asymmetry <= 1e-12);
        }
    }

    #[test]
    fn linear_transmission_is_exact() {
        let m = linear_transmission_manufactured(1.0, -2.0).unwrap();
        let problem = m.problem();
        for pattern in [DiagonalPattern::MirroredDiagonals, DiagonalPattern::UniformDiagonals] {
            let (mesh, classes) = cavity(2, pattern);
            let tau = make_tau(&mesh, &classes, 1.0).unwrap();
            let disc = Discretization::new(&mesh, &classes, 1).unwrap();
            let sol = solve_hdg_with(&disc, &problem, &tau).unwrap();
            assert!(hdg_residual(&disc, &problem, &tau, &sol) < 1e-9);
            for t in 0..mesh.num_triangles() {
                let tag = mesh.triangles()[t].tag;
                for xi in [[0.2, 0.3], [0.6, 0.1]] {
                    let x = disc.geometry.elements[t].to_physical(xi);
                    let vals = disc.cell_basis.eval(xi);
                    assert!((dot(&sol.u[t], &vals) - (m.u)(x, tag)).abs() < 1e-10);
                    let (qx, qy) = sol.q[t].split_at(disc.nw());
                    let q = (m.q)(x, tag);
                    assert!((dot(qx, &vals) - q[0]).abs() < 1e-10 && (dot(qy, &vals) - q[1]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn scaling_covariance() {
        let (mesh, classes) = cavity(4, DiagonalPattern::UniformDiagonals);
        let problem = cavity_problem(1.0, -2.0).unwrap().with_dirichlet(Arc::new(|p, _| p[0] * p[1]));
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        let a = solve_hdg(&mesh, &classes, 2, &problem, &tau).unwrap();
        let b = solve_hdg(&mesh, &classes, 2, &problem.scaled(-3.5), &tau).unwrap();
        let scaled = DiscreteSolution {
            q: a.q.iter().map(|v| v.iter().map(|x| -3.5 * x).collect()).collect(),
            u: a.u.iter().map(|v| v.iter().map(|x| -3.5 * x).collect()).collect(),
            ubar: a.ubar.iter().map(|v| v.iter().map(|x| -3.5 * x).collect()).collect(),
            ..a.clone()
        };
        assert!(rel_diff(&b, &scaled) < 1e-11);
    }

    #[test]
    fn neumann_manufactured() {
        // u = x^2 - y on the unit square, Neumann on the right edge
        let outer = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let kinds = [BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet];
        let domain = DomainSpec::new(
            outer.clone(),
            vec![crate::mesh::Region { polygon: outer.clone(), tag: Subdomain::Plus }],
            (0..4)
                .map(|i| crate::mesh::BoundarySegment { a: outer[i], b: outer[(i + 1) % 4], kind: kinds[i] })
                .collect(),
            vec![],
        )
        .unwrap();
        let mesh = build_structured_mesh(&domain, 3, DiagonalPattern::UniformDiagonals).unwrap();
        let classes = classify_facets(&mesh, &domain).unwrap();
        let sigma = 2.0;
        // q = -sigma (2x, -1); u_N = q.n on x = 1 with n = (1, 0)
        let problem = ProblemData::new(sigma, -1.0)
            .unwrap()
            .with_source(Arc::new(move |_, _| 2.0 * sigma))
            .with_dirichlet(Arc::new(|p, _| p[0] * p[0] - p[1]))
            .with_neumann(Arc::new(move |p, _| -sigma * 2.0 * p[0]));
        let tau = make_tau(&mesh, &classes, 1.0).unwrap();
        let sol = solve_hdg(&mesh, &classes, 2, &problem, &tau).unwrap();
        let disc = Discretization::new(&mesh, &classes, 2).unwrap();
        for t in 0..mesh.num_triangles() {
            let x = mesh.centroid(t);
            let xi = disc.geometry.elements[t].to_reference(x);
            let v = dot(&sol.u[t], &disc.cell_basis.eval(xi));
            assert!((v - (x[0] * x[0] - x[1])).abs() < 1e-10);
        }
    }
}
