//! Element-wise `P_{k+1}` reconstruction `u*` from `(q_h, u_h)`:
//! `(grad u*, grad v)_K = -(sigma^-1 q_h, grad v)_K` for all
//! `v in P_{k+1}(K)` and `(u*, 1)_K = (u_h, 1)_K`.

use crate::hdg::{dot, DiscreteSolution, Discretization, HdgError, ProblemData};
use crate::linalg::{DenseLu, DenseMatrix};
use crate::polybasis::{make_basis, make_quadrature, BasisSet, ElementKind};

#[derive(Debug, Clone, PartialEq)]
pub struct PostprocessedField {
    /// Degree of the reconstruction, `k + 1`.
    pub degree: usize,
    pub coeffs: Vec<Vec<f64>>,
}

impl PostprocessedField {
    pub fn basis(&self) -> BasisSet {
        make_basis(ElementKind::Triangle, self.degree).expect("degree checked on construction")
    }
}

pub fn postprocess(
    disc: &Discretization,
    solution: &DiscreteSolution,
    problem: &ProblemData,
) -> Result<PostprocessedField, HdgError> {
    let k = disc.k;
    let star = make_basis(ElementKind::Triangle, k + 1)?;
    let quad = make_quadrature(ElementKind::Triangle, 2 * k + 2)?;
    let tab_star = star.tabulate(&quad.points);
    let tab = disc.cell_basis.tabulate(&quad.points);
    let (n, nw) = (star.dim(), disc.nw());
    let coeffs = disc
        .mesh
        .triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            let map = &disc.geometry.elements[t];
            let inv_sigma = 1.0 / problem.sigma(tri.tag);
            let (qx, qy) = solution.q[t].split_at(nw);
            // bordered system [S m; m^T 0]
            let mut a = DenseMatrix::zeros(n + 1, n + 1);
            let mut b = vec![0.0; n + 1];
            for (p, &w) in quad.weights.iter().enumerate() {
                let wd = w * map.det;
                let g: Vec<[f64; 2]> = tab_star.grads[p].iter().map(|&g| map.grad(g)).collect();
                let q = [dot(qx, &tab.values[p]), dot(qy, &tab.values[p])];
                for i in 0..n {
                    for j in 0..n {
                        a[(i, j)] += wd * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                    }
                    b[i] -= wd * inv_sigma * (q[0] * g[i][0] + q[1] * g[i][1]);
                    let m = wd * tab_star.values[p][i];
                    a[(i, n)] += m;
                    a[(n, i)] += m;
                }
                b[n] += wd * dot(&solution.u[t], &tab.values[p]);
            }
            let lu = DenseLu::factor(&a).expect("gradient Gram matrix of a nondegenerate triangle");
            let mut x = lu.solve(&b);
            x.truncate(n);
            x
        })
        .collect();
    Ok(PostprocessedField { degree: k + 1, coeffs })
}
