//! Conforming simplicial meshes of two-phase polygonal domains.
//!
//! Triangles carry the tag of the subdomain they belong to and every facet
//! is stored once, with a fixed orientation (lower vertex index first) and
//! one or two owning triangles. Local facet `e` of a triangle is the edge
//! from its vertex `e` to vertex `(e + 1) % 3`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type Point = [f64; 2];

const GEOM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("resolution must be at least 1, got {0}")]
    InvalidResolution(usize),
    #[error("interface not aligned with the n={n} grid: {detail}")]
    InterfaceNotAligned { n: usize, detail: String },
    #[error("degenerate cell {cell} (signed area {area:e})")]
    DegenerateCell { cell: usize, area: f64 },
    #[error("triangle {0} is not contained in a single subdomain")]
    NonConforming(usize),
    #[error("boundary facet {facet} ({a:?}-{b:?}) lies on no tagged boundary segment")]
    UntaggedBoundary { facet: usize, a: Point, b: Point },
    #[error("triangle {0} has every facet on the interface")]
    InterfaceOnlyTriangle(usize),
    #[error("mesh text: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Plus,
    Minus,
}

impl Subdomain {
    pub fn symbol(self) -> char {
        match self {
            Subdomain::Plus => '+',
            Subdomain::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Counter-clockwise polygon.
    pub polygon: Vec<Point>,
    pub tag: Subdomain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySegment {
    pub a: Point,
    pub b: Point,
    pub kind: BoundaryKind,
}

/// Polygonal domain split into tagged subdomains.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    outer: Vec<Point>,
    regions: Vec<Region>,
    boundary: Vec<BoundarySegment>,
    interfaces: Vec<Vec<Point>>,
}

impl DomainSpec {
    /// Validates that the regions tile the outer polygon and that every
    /// outer edge is covered by tagged boundary segments.
    pub fn new(
        outer: Vec<Point>,
        regions: Vec<Region>,
        boundary: Vec<BoundarySegment>,
        interfaces: Vec<Vec<Point>>,
    ) -> Result<Self, MeshError> {
        if outer.len() < 3 {
            return Err(MeshError::InvalidDomain("outer polygon needs 3 vertices".into()));
        }
        let area = polygon_area(&outer);
        if area <= 0.0 {
            return Err(MeshError::InvalidDomain("outer polygon must be counter-clockwise".into()));
        }
        if regions.is_empty() {
            return Err(MeshError::InvalidDomain("no subdomains".into()));
        }
        let mut total = 0.0;
        for (i, r) in regions.iter().enumerate() {
            let a = polygon_area(&r.polygon);
            if a <= 0.0 {
                return Err(MeshError::InvalidDomain(format!("region {i} is not counter-clockwise")));
            }
            if !r.polygon.iter().all(|p| point_in_polygon(*p, &outer, GEOM_TOL)) {
                return Err(MeshError::InvalidDomain(format!("region {i} leaves the outer polygon")));
            }
            total += a;
        }
        if (total - area).abs() > 1e-9 * area {
            return Err(MeshError::InvalidDomain(format!(
                "subdomain areas sum to {total}, outer polygon has area {area}"
            )));
        }
        for i in 0..outer.len() {
            let (a, b) = (outer[i], outer[(i + 1) % outer.len()]);
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            for p in [a, mid, b] {
                let hits = boundary.iter().filter(|s| on_segment(p, s.a, s.b, GEOM_TOL)).count();
                if hits == 0 {
                    return Err(MeshError::InvalidDomain(format!("boundary point {p:?} is untagged")));
                }
            }
        }
        Ok(Self { outer, regions, boundary, interfaces })
    }

    /// Rectangle `[x_breaks[0], x_breaks[last]] x [y0, y1]` cut into vertical
    /// strips, strip `i` tagged `tags[i]`. Interfaces are recorded where
    /// neighbouring tags differ. The whole boundary gets `kind`.
    pub fn vertical_strips(
        x_breaks: &[f64],
        y0: f64,
        y1: f64,
        tags: &[Subdomain],
        kind: BoundaryKind,
    ) -> Result<Self, MeshError> {
        if x_breaks.len() != tags.len() + 1 || tags.is_empty() {
            return Err(MeshError::InvalidDomain("need one tag per strip".into()));
        }
        if x_breaks.windows(2).any(|w| w[1] <= w[0]) || y1 <= y0 {
            return Err(MeshError::InvalidDomain("breaks must be increasing".into()));
        }
        let (xa, xb) = (x_breaks[0], *x_breaks.last().unwrap());
        let outer = vec![[xa, y0], [xb, y0], [xb, y1], [xa, y1]];
        let regions = tags
            .iter()
            .enumerate()
            .map(|(i, &tag)| Region {
                polygon: vec![[x_breaks[i], y0], [x_breaks[i + 1], y0], [x_breaks[i + 1], y1], [x_breaks[i], y1]],
                tag,
            })
            .collect();
        let boundary = (0..4).map(|i| BoundarySegment { a: outer[i], b: outer[(i + 1) % 4], kind }).collect();
        let interfaces = (1..tags.len())
            .filter(|&i| tags[i] != tags[i - 1])
            .map(|i| vec![[x_breaks[i], y0], [x_breaks[i], y1]])
            .collect();
        Self::new(outer, regions, boundary, interfaces)
    }

    pub fn outer(&self) -> &[Point] {
        &self.outer
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn boundary(&self) -> &[BoundarySegment] {
        &self.boundary
    }

    /// Interface chains between Plus and Minus regions, each ordered by
    /// increasing x2.
    pub fn interfaces(&self) -> &[Vec<Point>] {
        &self.interfaces
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.outer)
    }

    /// Subdomain containing `p`, if any. Points on an interface report the
    /// first matching region.
    pub fn locate(&self, p: Point) -> Option<Subdomain> {
        self.regions.iter().find(|r| point_in_polygon(p, &r.polygon, GEOM_TOL)).map(|r| r.tag)
    }

    fn bounding_rectangle(&self) -> Result<[f64; 4], MeshError> {
        let xs = self.outer.iter().map(|p| p[0]);
        let ys = self.outer.iter().map(|p| p[1]);
        let x0 = xs.clone().fold(f64::INFINITY, f64::min);
        let x1 = xs.fold(f64::NEG_INFINITY, f64::max);
        let y0 = ys.clone().fold(f64::INFINITY, f64::min);
        let y1 = ys.fold(f64::NEG_INFINITY, f64::max);
        let bbox = (x1 - x0) * (y1 - y0);
        if (bbox - self.area()).abs() > 1e-12 * bbox {
            return Err(MeshError::InvalidDomain("outer boundary is not an axis-aligned rectangle".into()));
        }
        Ok([x0, x1, y0, y1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagonalPattern {
    /// Diagonal direction flips across every interface line, so the mesh is
    /// mirror-symmetric about each interface.
    MirroredDiagonals,
    /// The same diagonal direction in every cell.
    UniformDiagonals,
}

impl fmt::Display for DiagonalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagonalPattern::MirroredDiagonals => write!(f, "mirrored"),
            DiagonalPattern::UniformDiagonals => write!(f, "uniform"),
        }
    }
}

impl std::str::FromStr for DiagonalPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mirrored" | "symmetric" => Ok(DiagonalPattern::MirroredDiagonals),
            "uniform" | "nonsymmetric" => Ok(DiagonalPattern::UniformDiagonals),
            _ => Err(format!("unknown mesh pattern `{s}` (expected mirrored|uniform)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub tag: Subdomain,
    /// Global facet index of local facet `e` (edge `v[e] -> v[(e+1)%3]`).
    pub facets: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Endpoints with `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    /// `(triangle, local facet index)` for each owner.
    pub owners: Vec<(usize, usize)>,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.owners.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    facets: Vec<Facet>,
    diameters: Vec<f64>,
    h: f64,
}

impl Mesh {
    /// Builds facet adjacency from triangles. Facets are numbered by
    /// midpoint, lexicographically in (x1, x2).
    pub fn from_triangles(vertices: Vec<Point>, cells: Vec<([usize; 3], Subdomain)>) -> Result<Self, MeshError> {
        for (c, (v, _)) in cells.iter().enumerate() {
            let area = signed_area(vertices[v[0]], vertices[v[1]], vertices[v[2]]);
            if !(area > 0.0) {
                return Err(MeshError::DegenerateCell { cell: c, area });
            }
        }
        let mut edge_owners: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (c, (v, _)) in cells.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                edge_owners.entry((a.min(b), a.max(b))).or_default().push((c, e));
            }
        }
        let mut facets: Vec<Facet> =
            edge_owners.into_iter().map(|((a, b), owners)| Facet { vertices: [a, b], owners }).collect();
        if let Some(f) = facets.iter().find(|f| f.owners.len() > 2) {
            return Err(MeshError::InvalidDomain(format!(
                "edge {:?} shared by {} triangles",
                f.vertices,
                f.owners.len()
            )));
        }
        let mid = |f: &Facet| {
            let (p, q) = (vertices[f.vertices[0]], vertices[f.vertices[1]]);
            [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
        };
        facets.sort_by(|f, g| {
            let (m, n) = (mid(f), mid(g));
            m[0].total_cmp(&n[0]).then(m[1].total_cmp(&n[1]))
        });
        let mut triangles: Vec<Triangle> =
            cells.into_iter().map(|(v, tag)| Triangle { vertices: v, tag, facets: [usize::MAX; 3] }).collect();
        for (fi, f) in facets.iter().enumerate() {
            for &(c, e) in &f.owners {
                triangles[c].facets[e] = fi;
            }
        }
        let diameters: Vec<f64> = triangles
            .iter()
            .map(|t| {
                (0..3).map(|e| dist(vertices[t.vertices[e]], vertices[t.vertices[(e + 1) % 3]])).fold(0.0, f64::max)
            })
            .collect();
        let h = diameters.iter().copied().fold(0.0, f64::max);
        Ok(Self { vertices, triangles, facets, diameters, h })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let v = self.triangles[t].vertices;
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]]
    }

    pub fn facet_points(&self, f: usize) -> [Point; 2] {
        let v = self.facets[f].vertices;
        [self.vertices[v[0]], self.vertices[v[1]]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Index of a triangle containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        (0..self.triangles.len()).find(|&t| {
            let [a, b, c] = self.triangle_points(t);
            let scale = self.diameters[t] * self.diameters[t] * 1e-12;
            signed_area(a, b, p) >= -scale && signed_area(b, c, p) >= -scale && signed_area(c, a, p) >= -scale
        })
    }
}

/// Grid of `n` squares per unit length on a rectangular domain, each
/// square split into two triangles.
pub fn build_structured_mesh(domain: &DomainSpec, n: usize, pattern: DiagonalPattern) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidResolution(n));
    }
    let [x0, x1, y0, y1] = domain.bounding_rectangle()?;
    let nx = grid_count(x1 - x0, n, "domain width")?;
    let ny = grid_count(y1 - y0, n, "domain height")?;
    let mut lines = Vec::new();
    for chain in domain.interfaces() {
        let x = chain[0][0];
        if chain.iter().any(|p| (p[0] - x).abs() > GEOM_TOL) {
            return Err(MeshError::InterfaceNotAligned {
                n,
                detail: format!("interface through {:?} is not a vertical line", chain[0]),
            });
        }
        let i = grid_count(x - x0, n, "interface position")
            .map_err(|_| MeshError::InterfaceNotAligned { n, detail: format!("interface at x1 = {x} is off-grid") })?;
        lines.push(i);
    }
    let xs: Vec<Vec<f64>> =
        (0..=ny).map(|_| (0..=nx).map(|i| x0 + (x1 - x0) * i as f64 / nx as f64).collect()).collect();
    grid_mesh(domain, n, &xs, [y0, y1], &lines, pattern)
}

/// Grid whose vertical lines are sheared piecewise-affinely in x1 so that
/// every interface chain runs along a grid line. Chains are anchored at
/// their lowest vertex and must have grid-aligned breakpoints in x2.
pub fn build_mapped_mesh(domain: &DomainSpec, n: usize) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidResolution(n));
    }
    let [x0, x1, y0, y1] = domain.bounding_rectangle()?;
    let nx = grid_count(x1 - x0, n, "domain width")?;
    let ny = grid_count(y1 - y0, n, "domain height")?;
    let mut anchors: Vec<(usize, &Vec<Point>)> = Vec::new();
    for chain in domain.interfaces() {
        if chain.len() < 2 || chain.windows(2).any(|w| w[1][1] <= w[0][1]) {
            return Err(MeshError::InterfaceNotAligned {
                n,
                detail: "interface chain must be strictly monotone in x2".into(),
            });
        }
        if (chain[0][1] - y0).abs() > GEOM_TOL || (chain.last().unwrap()[1] - y1).abs() > GEOM_TOL {
            return Err(MeshError::InterfaceNotAligned { n, detail: "interface chain must span the domain".into() });
        }
        for p in chain {
            grid_count(p[1] - y0, n, "chain breakpoint").map_err(|_| MeshError::InterfaceNotAligned {
                n,
                detail: format!("chain breakpoint {p:?} is off-grid in x2"),
            })?;
        }
        let i = grid_count(chain[0][0] - x0, n, "chain anchor").map_err(|_| MeshError::InterfaceNotAligned {
            n,
            detail: format!("chain anchor {:?} is off-grid in x1", chain[0]),
        })?;
        anchors.push((i, chain));
    }
    anchors.sort_by_key(|a| a.0);
    let lines: Vec<usize> = anchors.iter().map(|a| a.0).collect();
    let xs: Vec<Vec<f64>> = (0..=ny)
        .map(|j| {
            let y = y0 + (y1 - y0) * j as f64 / ny as f64;
            let mut from = vec![0usize];
            let mut to = vec![x0];
            for (i, chain) in &anchors {
                from.push(*i);
                to.push(chain_x(chain, y));
            }
            from.push(nx);
            to.push(x1);
            (0..=nx)
                .map(|i| {
                    let s = from.windows(2).position(|w| i <= w[1]).unwrap();
                    let (ia, ib) = (from[s], from[s + 1]);
                    if ib == ia {
                        return to[s + 1];
                    }
                    let t = (i - ia) as f64 / (ib - ia) as f64;
                    to[s] + t * (to[s + 1] - to[s])
                })
                .collect()
        })
        .collect();
    grid_mesh(domain, n, &xs, [y0, y1], &lines, DiagonalPattern::MirroredDiagonals)
}

fn chain_x(chain: &[Point], y: f64) -> f64 {
    for w in chain.windows(2) {
        if y <= w[1][1] + GEOM_TOL {
            let t = ((y - w[0][1]) / (w[1][1] - w[0][1])).clamp(0.0, 1.0);
            return w[0][0] + t * (w[1][0] - w[0][0]);
        }
    }
    chain.last().unwrap()[0]
}

fn grid_count(length: f64, n: usize, what: &str) -> Result<usize, MeshError> {
    let c = length * n as f64;
    let r = c.round();
    if (c - r).abs() > 1e-8 || r < 0.0 {
        return Err(MeshError::InvalidDomain(format!("{what} {length} is not a multiple of 1/{n}")));
    }
    Ok(r as usize)
}

/// `xs[j][i]` is the x1 coordinate of grid vertex `(i, j)`; rows are equally
/// spaced in x2.
fn grid_mesh(
    domain: &DomainSpec,
    n: usize,
    xs: &[Vec<f64>],
    [y0, y1]: [f64; 2],
    interface_columns: &[usize],
    pattern: DiagonalPattern,
) -> Result<Mesh, MeshError> {
    let ny = xs.len() - 1;
    let nx = xs[0].len() - 1;
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for (j, row) in xs.iter().enumerate() {
        let y = y0 + (y1 - y0) * j as f64 / ny as f64;
        vertices.extend(row.iter().map(|&x| [x, y]));
    }
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let flip = match pattern {
                DiagonalPattern::UniformDiagonals => false,
                DiagonalPattern::MirroredDiagonals => interface_columns.iter().filter(|&&c| c <= i).count() % 2 == 1,
            };
            let (p00, p10, p01, p11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            let pair = if flip { [[p00, p10, p01], [p10, p11, p01]] } else { [[p00, p10, p11], [p00, p11, p01]] };
            for tri in pair {
                let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
                if !(area > 0.0) {
                    return Err(MeshError::DegenerateCell { cell: cells.len(), area });
                }
                cells.push(tri);
            }
        }
    }
    let mut tagged = Vec::with_capacity(cells.len());
    for (c, tri) in cells.into_iter().enumerate() {
        let pts = tri.map(|v| vertices[v]);
        let centroid = [(pts[0][0] + pts[1][0] + pts[2][0]) / 3.0, (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0];
        let region = domain
            .regions()
            .iter()
            .find(|r| point_in_polygon(centroid, &r.polygon, 0.0))
            .ok_or(MeshError::NonConforming(c))?;
        let tol = GEOM_TOL * (1.0 + n as f64);
        if !pts.iter().all(|&p| point_in_polygon(p, &region.polygon, tol)) {
            return Err(MeshError::InterfaceNotAligned {
                n,
                detail: format!("triangle {c} straddles a subdomain boundary"),
            });
        }
        tagged.push((tri, region.tag));
    }
    Mesh::from_triangles(vertices, tagged)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FacetLabel {
    InteriorPlus,
    InteriorMinus,
    Interface,
    Dirichlet,
    Neumann,
}

impl FacetLabel {
    pub const ALL: [FacetLabel; 5] = [
        FacetLabel::InteriorPlus,
        FacetLabel::InteriorMinus,
        FacetLabel::Interface,
        FacetLabel::Dirichlet,
        FacetLabel::Neumann,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FacetLabel::InteriorPlus => "interior+",
            FacetLabel::InteriorMinus => "interior-",
            FacetLabel::Interface => "interface",
            FacetLabel::Dirichlet => "dirichlet",
            FacetLabel::Neumann => "neumann",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetClassification {
    labels: Vec<FacetLabel>,
}

impl FacetClassification {
    pub fn label(&self, f: usize) -> FacetLabel {
        self.labels[f]
    }

    pub fn labels(&self) -> &[FacetLabel] {
        &self.labels
    }

    pub fn count(&self, label: FacetLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

pub fn classify_facets(mesh: &Mesh, domain: &DomainSpec) -> Result<FacetClassification, MeshError> {
    let mut labels = Vec::with_capacity(mesh.num_facets());
    for (fi, f) in mesh.facets().iter().enumerate() {
        let label = match f.owners.as_slice() {
            [(a, _), (b, _)] => match (mesh.triangles()[*a].tag, mesh.triangles()[*b].tag) {
                (Subdomain::Plus, Subdomain::Plus) => FacetLabel::InteriorPlus,
                (Subdomain::Minus, Subdomain::Minus) => FacetLabel::InteriorMinus,
                _ => FacetLabel::Interface,
            },
            _ => {
                let [a, b] = mesh.facet_points(fi);
                let scale = mesh.h().max(1.0) * GEOM_TOL;
                let seg = domain
                    .boundary()
                    .iter()
                    .find(|s| on_segment(a, s.a, s.b, scale) && on_segment(b, s.a, s.b, scale))
                    .ok_or(MeshError::UntaggedBoundary { facet: fi, a, b })?;
                match seg.kind {
                    BoundaryKind::Dirichlet => FacetLabel::Dirichlet,
                    BoundaryKind::Neumann => FacetLabel::Neumann,
                }
            }
        };
        labels.push(label);
    }
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if tri.facets.iter().all(|&f| labels[f] == FacetLabel::Interface) {
            return Err(MeshError::InterfaceOnlyTriangle(t));
        }
    }
    Ok(FacetClassification { labels })
}

/// Serializes a mesh and its facet labels in the plain-text exchange format.
pub fn write_mesh_text(mesh: &Mesh, classes: &FacetClassification) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    writeln!(s, "vertices {}", mesh.vertices.len()).unwrap();
    for p in &mesh.vertices {
        writeln!(s, "{:e} {:e}", p[0], p[1]).unwrap();
    }
    writeln!(s, "triangles {}", mesh.triangles.len()).unwrap();
    for t in &mesh.triangles {
        let v = t.vertices;
        writeln!(s, "{} {} {} {}", v[0], v[1], v[2], t.tag.symbol()).unwrap();
    }
    writeln!(s, "facets {}", mesh.facets.len()).unwrap();
    for (f, facet) in mesh.facets.iter().enumerate() {
        let v = facet.vertices;
        writeln!(s, "{} {} {}", v[0], v[1], classes.label(f).name()).unwrap();
    }
    s
}

pub fn read_mesh_text(text: &str) -> Result<(Mesh, FacetClassification), MeshError> {
    let err = MeshError::Parse;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut section = |name: &str| -> Result<Vec<Vec<&str>>, MeshError> {
        let line = lines.next().ok_or_else(|| err(format!("missing `{name}` header")))?;
        let mut w = line.split_whitespace();
        if w.next() != Some(name) {
            return Err(err(format!("expected `{name}`, got `{line}`")));
        }
        let count: usize =
            w.next().and_then(|c| c.parse().ok()).ok_or_else(|| err(format!("bad count in `{line}`")))?;
        (0..count)
            .map(|_| {
                lines
                    .next()
                    .map(|l| l.split_whitespace().collect())
                    .ok_or_else(|| err(format!("truncated `{name}` section")))
            })
            .collect()
    };
    let index = |s: &str, bound: usize| -> Result<usize, MeshError> {
        match s.parse::<usize>() {
            Ok(i) if i < bound => Ok(i),
            _ => Err(err(format!("bad vertex index `{s}`"))),
        }
    };

    let vertices = section("vertices")?
        .into_iter()
        .map(|w| match w.as_slice() {
            [x, y] => match (x.parse(), y.parse()) {
                (Ok(x), Ok(y)) => Ok([x, y]),
                _ => Err(err(format!("bad vertex `{x} {y}`"))),
            },
            _ => Err(err(format!("vertex line `{}`", w.join(" ")))),
        })
        .collect::<Result<Vec<Point>, _>>()?;
    let nv = vertices.len();
    let cells = section("triangles")?
        .into_iter()
        .map(|w| match w.as_slice() {
            [a, b, c, tag] => {
                let tag = match *tag {
                    "+" => Subdomain::Plus,
                    "-" => Subdomain::Minus,
                    t => return Err(err(format!("unknown tag `{t}`"))),
                };
                Ok(([index(a, nv)?, index(b, nv)?, index(c, nv)?], tag))
            }
            _ => Err(err(format!("triangle line `{}`", w.join(" ")))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let facet_lines = section("facets")?;
    let mesh = Mesh::from_triangles(vertices, cells)?;
    if facet_lines.len() != mesh.num_facets() {
        return Err(err(format!("{} facets listed, triangles define {}", facet_lines.len(), mesh.num_facets())));
    }
    let lookup: BTreeMap<[usize; 2], usize> = mesh.facets.iter().enumerate().map(|(i, f)| (f.vertices, i)).collect();
    let mut labels = vec![None; facet_lines.len()];
    for w in facet_lines {
        let [a, b, label] = w.as_slice() else {
            return Err(err(format!("facet line `{}`", w.join(" "))));
        };
        let (a, b) = (index(a, nv)?, index(b, nv)?);
        let f =
            *lookup.get(&[a.min(b), a.max(b)]).ok_or_else(|| err(format!("facet {a}-{b} is not a triangle edge")))?;
        labels[f] = Some(FacetLabel::parse(label).ok_or_else(|| err(format!("unknown label `{label}`")))?);
    }
    let labels = labels.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| err("facet listed twice".into()))?;
    Ok((mesh, FacetClassification { labels }))
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn on_segment(p: Point, a: Point, b: Point, tol: f64) -> bool {
    let len = dist(a, b);
    if len == 0.0 {
        return dist(p, a) <= tol;
    }
    let cross = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / len;
    let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / (len * len);
    cross.abs() <= tol && t >= -tol / len && t <= 1.0 + tol / len
}

/// Closed point-in-polygon test: points within `tol` of an edge count as
/// inside.
fn point_in_polygon(p: Point, poly: &[Point], tol: f64) -> bool {
    let n = poly.len();
    if tol > 0.0 && (0..n).any(|i| on_segment(p, poly[i], poly[(i + 1) % n], tol)) {
        return true;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}
