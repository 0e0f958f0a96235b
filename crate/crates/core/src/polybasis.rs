//! Orthonormal polynomial bases, quadrature and affine element maps.
//!
//! The reference triangle is `{(x, y) : x, y >= 0, x + y <= 1}` (area 1/2)
//! and the reference segment is `[0, 1]`. Triangle bases are Dubiner
//! (collapsed-coordinate Jacobi) products scaled to be orthonormal in
//! `L2(reference triangle)`; segment bases are shifted Legendre polynomials,
//! orthonormal in `L2(0, 1)`. Both are ordered by total degree, so the
//! degree-`k` basis is a prefix of the degree-`k + 1` basis.

use thiserror::Error;

use crate::mesh::{Mesh, Point};

/// Largest polynomial degree of a basis (element degree 6 plus one for
/// post-processing).
pub const MAX_BASIS_DEGREE: usize = 7;
/// Largest exactness degree of a quadrature rule.
pub const MAX_QUADRATURE_DEGREE: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("{kind:?} degree {degree} unsupported (max {max})")]
    UnsupportedDegree { kind: ElementKind, degree: usize, max: usize },
    #[error("degenerate triangle {cell} (det {det:e})")]
    DegenerateTriangle { cell: usize, det: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Triangle,
    Segment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    kind: ElementKind,
    degree: usize,
    /// `(p, q)` index pairs for triangles, `(n, 0)` for segments.
    modes: Vec<(usize, usize)>,
}

/// Values and reference gradients of a basis at a list of points, indexed
/// `[point][function]`.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<[f64; 2]>>,
}

pub fn make_basis(kind: ElementKind, k: usize) -> Result<BasisSet, BasisError> {
    if k > MAX_BASIS_DEGREE {
        return Err(BasisError::UnsupportedDegree { kind, degree: k, max: MAX_BASIS_DEGREE });
    }
    let modes = match kind {
        ElementKind::Triangle => (0..=k).flat_map(|n| (0..=n).rev().map(move |p| (p, n - p))).collect(),
        ElementKind::Segment => (0..=k).map(|n| (n, 0)).collect(),
    };
    Ok(BasisSet { kind, degree: k, modes })
}

pub fn dimension(kind: ElementKind, k: usize) -> usize {
    match kind {
        ElementKind::Triangle => (k + 1) * (k + 2) / 2,
        ElementKind::Segment => k + 1,
    }
}

impl BasisSet {
    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// Evaluates all basis functions at `p` (segment: `p[0]` is the
    /// parameter).
    pub fn eval(&self, p: Point) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        let mut g = vec![[0.0; 2]; self.dim()];
        self.eval_into(p, &mut v, &mut g);
        v
    }

    /// Reference gradients; for segments only component 0 (d/ds) is set.
    pub fn eval_grad(&self, p: Point) -> Vec<[f64; 2]> {
        let mut v = vec![0.0; self.dim()];
        let mut g = vec![[0.0; 2]; self.dim()];
        self.eval_into(p, &mut v, &mut g);
        g
    }

    pub fn eval_into(&self, p: Point, values: &mut [f64], grads: &mut [[f64; 2]]) {
        match self.kind {
            ElementKind::Segment => {
                let (l, dl) = legendre(self.degree, 2.0 * p[0] - 1.0);
                for n in 0..=self.degree {
                    let c = ((2 * n + 1) as f64).sqrt();
                    values[n] = c * l[n];
                    grads[n] = [2.0 * c * dl[n], 0.0];
                }
            }
            ElementKind::Triangle => self.eval_triangle(p, values, grads),
        }
    }

    fn eval_triangle(&self, [x, y]: Point, values: &mut [f64], grads: &mut [[f64; 2]]) {
        let k = self.degree;
        // L_p = P_p(a) (1 - y)^p with a = 2x/(1-y) - 1, by the Legendre
        // recurrence multiplied through by (1 - y)^p.
        let mut lp = vec![[0.0; 3]; k + 1];
        lp[0] = [1.0, 0.0, 0.0];
        if k >= 1 {
            lp[1] = [2.0 * x - 1.0 + y, 2.0, 1.0];
        }
        let w = 1.0 - y;
        for p in 1..k {
            let pf = p as f64;
            let (a, b) = ((2.0 * pf + 1.0) / (pf + 1.0), pf / (pf + 1.0));
            let s = 2.0 * x - 1.0 + y;
            let [l1, l1x, l1y] = lp[p];
            let [l0, l0x, l0y] = lp[p - 1];
            lp[p + 1] = [
                a * s * l1 - b * w * w * l0,
                a * (2.0 * l1 + s * l1x) - b * w * w * l0x,
                a * (l1 + s * l1y) - b * (w * w * l0y - 2.0 * w * l0),
            ];
        }
        let t = 2.0 * y - 1.0;
        let jac: Vec<(Vec<f64>, Vec<f64>)> = (0..=k).map(|p| jacobi(2 * p + 1, k - p, t)).collect();
        for (i, &(p, q)) in self.modes.iter().enumerate() {
            let [l, lx, ly] = lp[p];
            let norm = (2.0 * (2 * p + 1) as f64 * (p + q + 1) as f64).sqrt();
            let (j, dj) = (jac[p].0[q], 2.0 * jac[p].1[q]);
            values[i] = norm * l * j;
            grads[i] = [norm * lx * j, norm * (ly * j + l * dj)];
        }
    }

    pub fn tabulate(&self, points: &[Point]) -> Tabulation {
        let n = self.dim();
        let mut values = Vec::with_capacity(points.len());
        let mut grads = Vec::with_capacity(points.len());
        for &p in points {
            let mut v = vec![0.0; n];
            let mut g = vec![[0.0; 2]; n];
            self.eval_into(p, &mut v, &mut g);
            values.push(v);
            grads.push(g);
        }
        Tabulation { values, grads }
    }
}

/// Legendre polynomials `P_0..=P_k` and derivatives at `t`.
fn legendre(k: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; k + 1];
    let mut dp = vec![0.0; k + 1];
    p[0] = 1.0;
    if k >= 1 {
        p[1] = t;
        dp[1] = 1.0;
    }
    for n in 1..k {
        let nf = n as f64;
        p[n + 1] = ((2.0 * nf + 1.0) * t * p[n] - nf * p[n - 1]) / (nf + 1.0);
        dp[n + 1] = ((2.0 * nf + 1.0) * (p[n] + t * dp[n]) - nf * dp[n - 1]) / (nf + 1.0);
    }
    (p, dp)
}

/// Jacobi polynomials `P_n^(alpha, 0)(t)` for `n = 0..=m` and their
/// t-derivatives.
fn jacobi(alpha: usize, m: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let a = alpha as f64;
    let mut p = vec![1.0];
    let mut dp = vec![0.0];
    if m >= 1 {
        p.push(((a + 2.0) * t + a) / 2.0);
        dp.push((a + 2.0) / 2.0);
    }
    for n in 2..=m {
        let nf = n as f64;
        let c1 = 2.0 * nf * (nf + a) * (2.0 * nf + a - 2.0);
        let c2 = (2.0 * nf + a - 1.0) * a * a;
        let c3 = (2.0 * nf + a - 1.0) * (2.0 * nf + a) * (2.0 * nf + a - 2.0);
        let c4 = 2.0 * (nf + a - 1.0) * (nf - 1.0) * (2.0 * nf + a);
        p.push(((c2 + c3 * t) * p[n - 1] - c4 * p[n - 2]) / c1);
        dp.push((c3 * p[n - 1] + (c2 + c3 * t) * dp[n - 1] - c4 * dp[n - 2]) / c1);
    }
    (p, dp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: ElementKind,
    pub degree: usize,
    /// Reference coordinates; segments use `[s, 0.0]`.
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss-Legendre on segments; collapsed (Duffy) Gauss-Legendre products on
/// triangles. Exact for polynomials of total degree `degree`.
pub fn make_quadrature(kind: ElementKind, degree: usize) -> Result<QuadratureRule, BasisError> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(BasisError::UnsupportedDegree { kind, degree, max: MAX_QUADRATURE_DEGREE });
    }
    match kind {
        ElementKind::Segment => {
            let (x, w) = gauss_legendre(degree / 2 + 1);
            Ok(QuadratureRule { kind, degree, points: x.iter().map(|&s| [s, 0.0]).collect(), weights: w })
        }
        ElementKind::Triangle => {
            // the (1 - u) Jacobian raises the degree in u by one
            let (x, w) = gauss_legendre((degree + 3) / 2);
            let mut points = Vec::with_capacity(x.len() * x.len());
            let mut weights = Vec::with_capacity(x.len() * x.len());
            for (&u, &wu) in x.iter().zip(&w) {
                for (&v, &wv) in x.iter().zip(&w) {
                    points.push([u, (1.0 - u) * v]);
                    weights.push(wu * wv * (1.0 - u));
                }
            }
            Ok(QuadratureRule { kind, degree, points, weights })
        }
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            let step = p[n] / d[n];
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, t).1[n];
        x[n - 1 - i] = 0.5 * (t + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Affine map from the reference triangle: `x = origin + jac * xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMap {
    pub origin: Point,
    pub jac: [[f64; 2]; 2],
    pub inv_t: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementMap {
    pub fn new(a: Point, b: Point, c: Point) -> Self {
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_t = [[jac[1][1] / det, -jac[1][0] / det], [-jac[0][1] / det, jac[0][0] / det]];
        Self { origin: a, jac, inv_t, det }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J^{-1} = (inv_t)^T
        [self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1], self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1]]
    }

    /// Physical gradient from a reference gradient.
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1], self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetMap {
    pub length: f64,
    /// Unit normal pointing out of each owner, in owner order.
    pub normals: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct Geometry {
    pub elements: Vec<ElementMap>,
    pub facets: Vec<FacetMap>,
}

const REFERENCE_VERTICES: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Reference-triangle point at parameter `t` along local facet `e`.
pub fn reference_facet_point(e: usize, t: f64) -> Point {
    let (a, b) = (REFERENCE_VERTICES[e], REFERENCE_VERTICES[(e + 1) % 3]);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

pub fn outward_normal(a: Point, b: Point) -> [f64; 2] {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = (dx * dx + dy * dy).sqrt();
    [dy / len, -dx / len]
}

pub fn make_affine_maps(mesh: &Mesh) -> Result<Geometry, BasisError> {
    let mut elements = Vec::with_capacity(mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle_points(t);
        let map = ElementMap::new(a, b, c);
        let scale = mesh.diameter(t).powi(2);
        if !(map.det > 1e-14 * scale) {
            return Err(BasisError::DegenerateTriangle { cell: t, det: map.det });
        }
        elements.push(map);
    }
    let facets = mesh
        .facets()
        .iter()
        .enumerate()
        .map(|(f, facet)| {
            let [a, b] = mesh.facet_points(f);
            let length = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let normals = facet
                .owners
                .iter()
                .map(|&(t, e)| {
                    let tri = mesh.triangles()[t].vertices;
                    let v = mesh.vertices();
                    outward_normal(v[tri[e]], v[tri[(e + 1) % 3]])
                })
                .collect();
            FacetMap { length, normals }
        })
        .collect();
    Ok(Geometry { elements, facets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, BoundaryKind, DiagonalPattern, DomainSpec, Subdomain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    /// Exact integral of x^a y^b over the reference triangle.
    fn monomial_integral(a: usize, b: usize) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn dimensions() {
        assert_eq!(make_basis(ElementKind::Triangle, 0).unwrap().dim(), 1);
        assert_eq!(make_basis(ElementKind::Triangle, 3).unwrap().dim(), 10);
        assert_eq!(make_basis(ElementKind::Segment, 3).unwrap().dim(), 4);
        let b = make_basis(ElementKind::Triangle, 0).unwrap();
        let v = b.eval([0.2, 0.3]);
        assert!((v[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(make_basis(ElementKind::Triangle, MAX_BASIS_DEGREE + 1).is_err());
    }

    #[test]
    fn triangle_basis_is_orthonormal() {
        for k in 0..=MAX_BASIS_DEGREE {
            let b = make_basis(ElementKind::Triangle, k).unwrap();
            let q = make_quadrature(ElementKind::Triangle, 2 * k).unwrap();
            let tab = b.tabulate(&q.points);
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    let g: f64 = (0..q.len()).map(|p| q.weights[p] * tab.values[p][i] * tab.values[p][j]).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-12, "k={k} ({i},{j}) = {g}");
                }
            }
        }
    }

    #[test]
    fn segment_basis_is_orthonormal() {
        let b = make_basis(ElementKind::Segment, 6).unwrap();
        let q = make_quadrature(ElementKind::Segment, 12).unwrap();
        let tab = b.tabulate(&q.points);
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let g: f64 = (0..q.len()).map(|p| q.weights[p] * tab.values[p][i] * tab.values[p][j]).sum();
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn projection_reproduces_quadratic() {
        let b = make_basis(ElementKind::Triangle, 2).unwrap();
        let q = make_quadrature(ElementKind::Triangle, 6).unwrap();
        let f = |p: Point| p[0] * p[0] + p[1];
        let coeffs: Vec<f64> = (0..b.dim())
            .map(|i| (0..q.len()).map(|p| q.weights[p] * f(q.points[p]) * b.eval(q.points[p])[i]).sum())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen::<f64>() * (1.0 - x);
            let v: f64 = b.eval([x, y]).iter().zip(&coeffs).map(|(a, c)| a * c).sum();
            worst = worst.max((v - f([x, y])).abs());
        }
        assert!(worst <= 1e-13, "{worst}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in [1, 3, 5, 7] {
            let b = make_basis(ElementKind::Triangle, k).unwrap();
            for _ in 0..10 {
                let x: f64 = 0.05 + 0.8 * rng.gen::<f64>();
                let y: f64 = 0.05 + (0.9 - x) * rng.gen::<f64>();
                let g = b.eval_grad([x, y]);
                let (xp, xm) = (b.eval([x + h, y]), b.eval([x - h, y]));
                let (yp, ym) = (b.eval([x, y + h]), b.eval([x, y - h]));
                let scale = g.iter().flat_map(|v| v.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
                for i in 0..b.dim() {
                    let fx = (xp[i] - xm[i]) / (2.0 * h);
                    let fy = (yp[i] - ym[i]) / (2.0 * h);
                    assert!((fx - g[i][0]).abs() <= 1e-6 * scale, "k={k} i={i}");
                    assert!((fy - g[i][1]).abs() <= 1e-6 * scale, "k={k} i={i}");
                }
            }
        }
        let s = make_basis(ElementKind::Segment, 5).unwrap();
        let g = s.eval_grad([0.3, 0.0]);
        let (p, m) = (s.eval([0.3 + h, 0.0]), s.eval([0.3 - h, 0.0]));
        for i in 0..s.dim() {
            assert!(((p[i] - m[i]) / (2.0 * h) - g[i][0]).abs() < 1e-6 * 50.0);
        }
    }

    #[test]
    fn gradients_are_exact_at_collapsed_vertex() {
        // the recurrence form is polynomial, so the apex y = 1 is regular
        let b = make_basis(ElementKind::Triangle, 4).unwrap();
        let v = b.eval([0.0, 1.0]);
        assert!(v.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn triangle_rule_integrates_x_squared() {
        for d in 2..=10 {
            let q = make_quadrature(ElementKind::Triangle, d).unwrap();
            let s: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0] * p[0]).sum();
            assert!((s - 1.0 / 12.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_rule_degree_8_monomial() {
        let q = make_quadrature(ElementKind::Triangle, 8).unwrap();
        let s: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0].powi(3) * p[1].powi(4)).sum();
        let exact = monomial_integral(3, 4);
        assert!(((s - exact) / exact).abs() < 1e-14, "{s} vs {exact}");
    }

    #[test]
    fn rules_exact_up_to_degree() {
        for d in 0..=20 {
            let q = make_quadrature(ElementKind::Triangle, d).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
            for a in 0..=d {
                for b in 0..=(d - a) {
                    let s: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let e = monomial_integral(a, b);
                    assert!(((s - e) / e).abs() < 1e-13, "d={d} x^{a} y^{b}");
                }
            }
            let s = make_quadrature(ElementKind::Segment, d).unwrap();
            assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let m: f64 = s.points.iter().zip(&s.weights).map(|(p, w)| w * p[0].powi(d as i32)).sum();
            assert!((m - 1.0 / (d as f64 + 1.0)).abs() < 1e-14);
        }
        assert!(make_quadrature(ElementKind::Triangle, MAX_QUADRATURE_DEGREE + 1).is_err());
    }

    #[test]
    fn identity_map() {
        let m = ElementMap::new([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        assert_eq!(m.jac, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(m.det, 1.0);
        assert_eq!(m.to_reference([0.25, 0.5]), [0.25, 0.5]);
    }

    #[test]
    fn maps_round_trip() {
        let m = ElementMap::new([0.3, -1.0], [1.1, -0.8], [0.5, 0.4]);
        let x = m.to_physical([0.2, 0.3]);
        let xi = m.to_reference(x);
        assert!((xi[0] - 0.2).abs() < 1e-14 && (xi[1] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn facet_lengths_and_normals() {
        let d = DomainSpec::vertical_strips(
            &[-1.0, 0.0, 1.0],
            0.0,
            1.0,
            &[Subdomain::Plus, Subdomain::Minus],
            BoundaryKind::Dirichlet,
        )
        .unwrap();
        let mesh = build_structured_mesh(&d, 4, DiagonalPattern::UniformDiagonals).unwrap();
        let g = make_affine_maps(&mesh).unwrap();
        let h = 0.25;
        for t in 0..mesh.num_triangles() {
            let mut lens: Vec<f64> = mesh.triangles()[t].facets.iter().map(|&f| g.facets[f].length).collect();
            lens.sort_by(f64::total_cmp);
            assert!((lens[0] - h).abs() < 1e-15 && (lens[1] - h).abs() < 1e-15);
            assert!((lens[2] - h * 2f64.sqrt()).abs() < 1e-15);
        }
        for (f, facet) in mesh.facets().iter().enumerate() {
            if facet.owners.len() == 2 {
                let n = &g.facets[f].normals;
                assert!((n[0][0] + n[1][0]).abs() < 1e-15 && (n[0][1] + n[1][1]).abs() < 1e-15);
            }
            // outward: points away from the owner's centroid
            let c = mesh.centroid(facet.owners[0].0);
            let [a, _] = mesh.facet_points(f);
            let n = g.facets[f].normals[0];
            assert!((a[0] - c[0]) * n[0] + (a[1] - c[1]) * n[1] > 0.0);
        }
        let area: f64 = g.elements.iter().map(|e| e.det / 2.0).sum();
        assert!((area - 2.0).abs() < 1e-12 * 2.0);
    }

    #[test]
    fn squared_random_polynomial_integrates_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..=5usize {
            // random p in P_k as monomial combination
            let terms: Vec<(usize, usize, f64)> = (0..=k)
                .flat_map(|a| (0..=(k - a)).map(move |b| (a, b)))
                .map(|(a, b)| (a, b, rng.gen_range(-1.0..1.0)))
                .collect();
            let mut exact = 0.0;
            for &(a1, b1, c1) in &terms {
                for &(a2, b2, c2) in &terms {
                    exact += c1 * c2 * monomial_integral(a1 + a2, b1 + b2);
                }
            }
            let q = make_quadrature(ElementKind::Triangle, 2 * k).unwrap();
            let s: f64 = q
                .points
                .iter()
                .zip(&q.weights)
                .map(|(p, w)| {
                    let v: f64 = terms.iter().map(|&(a, b, c)| c * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                    w * v * v
                })
                .sum();
            assert!(((s - exact) / exact).abs() < 1e-12);
        }
    }
}
