//! Continuous Lagrange `P_k` baseline for the sign-indefinite weak form
//! `(sigma grad u, grad v) = -(f, v) - <u_N, v>_N`.
//!
//! Element functions are stored in the orthonormal modal basis so the
//! result can be measured with the same tools as the HDG solution.

use std::collections::BTreeMap;

use crate::hdg::{dot, DiscreteSolution, Discretization, HdgError, ProblemData, SolveStats};
use crate::linalg::{sparse_lu_solve, DenseLu, DenseMatrix, SparseMatrix};
use crate::mesh::{FacetClassification, FacetLabel, Mesh, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Vertex(usize),
    /// Local edge and position `1..k` counted from the edge's first vertex.
    Edge(usize, usize),
    Interior(usize),
}

/// Equispaced Lagrange nodes on the reference triangle: vertices, then
/// edge nodes per local edge, then interior nodes.
fn reference_nodes(k: usize) -> Vec<(Point, NodeKind)> {
    let kf = k as f64;
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let mut nodes: Vec<(Point, NodeKind)> = (0..3).map(|v| (corners[v], NodeKind::Vertex(v))).collect();
    for e in 0..3 {
        let (a, b) = (corners[e], corners[(e + 1) % 3]);
        for m in 1..k {
            let t = m as f64 / kf;
            nodes.push(([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], NodeKind::Edge(e, m)));
        }
    }
    let mut idx = 0;
    for j in 1..k {
        for i in 1..k - j {
            nodes.push(([i as f64 / kf, j as f64 / kf], NodeKind::Interior(idx)));
            idx += 1;
        }
    }
    nodes
}

/// Modal coefficients of the Lagrange basis: column `a` holds the
/// expansion of the nodal function of node `a`.
fn nodal_to_modal(disc: &Discretization, nodes: &[(Point, NodeKind)]) -> Result<DenseMatrix, HdgError> {
    let n = disc.nw();
    let rows: Vec<Vec<f64>> = nodes.iter().map(|(p, _)| disc.cell_basis.eval(*p)).collect();
    let v = DenseMatrix::from_rows(&rows)?;
    Ok(DenseLu::factor(&v)?.solve_matrix(&DenseMatrix::identity(n)))
}

struct Numbering {
    /// Global node per element and local node.
    element_nodes: Vec<Vec<usize>>,
    count: usize,
}

fn number_nodes(mesh: &Mesh, k: usize, nodes: &[(Point, NodeKind)]) -> Numbering {
    let nv = mesh.vertices().len();
    let per_edge = k.saturating_sub(1);
    let interior = nodes.iter().filter(|(_, n)| matches!(n, NodeKind::Interior(_))).count();
    let edge_base = nv;
    let cell_base = nv + mesh.num_facets() * per_edge;
    let element_nodes = mesh
        .triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            nodes
                .iter()
                .map(|(_, kind)| match *kind {
                    NodeKind::Vertex(v) => tri.vertices[v],
                    NodeKind::Edge(e, m) => {
                        let f = tri.facets[e];
                        let forward = tri.vertices[e] == mesh.facets()[f].vertices[0];
                        let pos = if forward { m } else { k - m };
                        edge_base + f * per_edge + pos - 1
                    }
                    NodeKind::Interior(i) => cell_base + t * interior + i,
                })
                .collect()
        })
        .collect();
    Numbering { element_nodes, count: cell_base + mesh.num_triangles() * interior }
}

/// Solves the continuous problem with Lagrange `P_k`, `k >= 1`, with
/// Dirichlet nodes eliminated. The returned solution carries `u_h`, the
/// projection of `-sigma grad u_h` as `q`, and the facet projection of the
/// trace as `ubar`.
pub fn solve_cg(
    mesh: &Mesh,
    classes: &FacetClassification,
    k: usize,
    problem: &ProblemData,
) -> Result<DiscreteSolution, HdgError> {
    if k == 0 {
        return Err(HdgError::InvalidParameter("continuous elements need k >= 1".into()));
    }
    let disc = Discretization::new(mesh, classes, k)?;
    let nodes = reference_nodes(k);
    let nw = disc.nw();
    debug_assert_eq!(nodes.len(), nw);
    let modal = nodal_to_modal(&disc, &nodes)?;
    let numbering = number_nodes(mesh, k, &nodes);

    // Dirichlet node values, first owner wins.
    let mut fixed: BTreeMap<usize, f64> = BTreeMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let map = &disc.geometry.elements[t];
        for (a, (p, kind)) in nodes.iter().enumerate() {
            let on_dirichlet = match *kind {
                NodeKind::Vertex(v) => {
                    [v, (v + 2) % 3].iter().any(|&e| classes.label(tri.facets[e]) == FacetLabel::Dirichlet)
                }
                NodeKind::Edge(e, _) => classes.label(tri.facets[e]) == FacetLabel::Dirichlet,
                NodeKind::Interior(_) => false,
            };
            if on_dirichlet {
                let g = numbering.element_nodes[t][a];
                fixed.entry(g).or_insert_with(|| (problem.dirichlet)(map.to_physical(*p), tri.tag));
            }
        }
    }
    let mut free = vec![usize::MAX; numbering.count];
    let mut nfree = 0;
    for (g, slot) in free.iter_mut().enumerate() {
        if !fixed.contains_key(&g) {
            *slot = nfree;
            nfree += 1;
        }
    }

    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; nfree];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let map = &disc.geometry.elements[t];
        let sigma = problem.sigma(tri.tag);
        let mut stiff = DenseMatrix::zeros(nw, nw);
        let mut load = vec![0.0; nw];
        for (p, &w) in disc.cell_quad.weights.iter().enumerate() {
            let wd = w * map.det;
            let grads: Vec<[f64; 2]> = disc.cell_grads()[p].iter().map(|&g| map.grad(g)).collect();
            let f = (problem.source)(map.to_physical(disc.cell_quad.points[p]), tri.tag);
            for i in 0..nw {
                for j in 0..nw {
                    stiff[(i, j)] += wd * sigma * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                }
                load[i] -= wd * f * disc.cell_values()[p][i];
            }
        }
        for e in 0..3 {
            let f = tri.facets[e];
            if classes.label(f) != FacetLabel::Neumann {
                continue;
            }
            let len = disc.geometry.facets[f].length;
            let cell = disc.facet_cell_values(t, e);
            for (p, &w) in disc.facet_quad.weights.iter().enumerate() {
                let x = disc.facet_point(f, disc.facet_quad.points[p][0]);
                let g = (problem.neumann)(x, tri.tag);
                for i in 0..nw {
                    load[i] -= w * len * g * cell[p][i];
                }
            }
        }
        // nodal blocks: C^T S C and C^T b
        let kc = stiff.matmul(&modal);
        let nodes_t = &numbering.element_nodes[t];
        for a in 0..nw {
            let ga = nodes_t[a];
            if free[ga] == usize::MAX {
                continue;
            }
            let ra = free[ga];
            rhs[ra] += (0..nw).map(|i| modal[(i, a)] * load[i]).sum::<f64>();
            for b in 0..nw {
                let kab: f64 = (0..nw).map(|i| modal[(i, a)] * kc[(i, b)]).sum();
                let gb = nodes_t[b];
                match fixed.get(&gb) {
                    Some(val) => rhs[ra] -= kab * val,
                    None => triplets.push((ra, free[gb], kab)),
                }
            }
        }
    }
    let matrix = SparseMatrix::from_triplets(nfree, &triplets)?;
    let x = sparse_lu_solve(&matrix, &rhs)?;
    let asym = if matrix.max_abs() > 0.0 { matrix.max_asymmetry() / matrix.max_abs() } else { 0.0 };

    let value = |g: usize| fixed.get(&g).copied().unwrap_or_else(|| x[free[g]]);
    let u: Vec<Vec<f64>> = numbering
        .element_nodes
        .iter()
        .map(|nodes_t| {
            let nodal: Vec<f64> = nodes_t.iter().map(|&g| value(g)).collect();
            modal.mul_vec(&nodal)
        })
        .collect();
    let q = flux_projection(&disc, problem, &u);
    let ubar = trace_projection(&disc, &u);
    Ok(DiscreteSolution { k, q, u, ubar, stats: SolveStats { trace_dofs: nfree, relative_asymmetry: asym } })
}

/// Modal coefficients of `-sigma grad u_h` per element.
fn flux_projection(disc: &Discretization, problem: &ProblemData, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let nw = disc.nw();
    disc.mesh
        .triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            let map = &disc.geometry.elements[t];
            let sigma = problem.sigma(tri.tag);
            let mut q = vec![0.0; 2 * nw];
            for (p, &w) in disc.cell_quad.weights.iter().enumerate() {
                let mut g = [0.0; 2];
                for (c, rg) in u[t].iter().zip(&disc.cell_grads()[p]) {
                    let pg = map.grad(*rg);
                    g[0] += c * pg[0];
                    g[1] += c * pg[1];
                }
                // orthonormal reference basis: physical mass matrix is det * I
                for i in 0..nw {
                    let phi = disc.cell_values()[p][i];
                    q[i] -= w * sigma * g[0] * phi;
                    q[nw + i] -= w * sigma * g[1] * phi;
                }
            }
            q
        })
        .collect()
}

/// Facet-wise `L^2` projection of the trace of `u` seen from the first
/// owner of each facet.
fn trace_projection(disc: &Discretization, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let nm = disc.nm();
    let psi = disc.facet_basis.tabulate(&disc.facet_quad.points).values;
    disc.mesh
        .facets()
        .iter()
        .map(|facet| {
            let (t, e) = facet.owners[0];
            let cell = disc.facet_cell_values(t, e);
            let mut c = vec![0.0; nm];
            for (p, &w) in disc.facet_quad.weights.iter().enumerate() {
                let val = dot(&u[t], &cell[p]);
                for l in 0..nm {
                    c[l] += w * val * psi[p][l];
                }
            }
            c
        })
        .collect()
}
