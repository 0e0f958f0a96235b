//! Single-level field output: per-element lattice samples and a slice
//! along a coordinate line.

use std::fs;
use std::path::PathBuf;

use signhdg::hdg::{dot, DiscreteSolution, Discretization};
use signhdg::mesh::{Mesh, Point};
use signhdg::postprocess::{postprocess, PostprocessedField};

use crate::config::{Axis, Method, RunConfig, Slice};
use crate::{discretize, fmt_num, mesh_and_classes, setup, solve, write_atomic, CliError};

/// Slice samples: the running coordinate and one column per method, plus
/// `u_exact` when the experiment has an exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceData {
    pub axis: Axis,
    pub coords: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SliceData {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_csv(&self) -> String {
        // the running coordinate is the one not fixed by the slice
        let coord = match self.axis {
            Axis::X1 => "x2",
            Axis::X2 => "x1",
        };
        let mut s = String::from(coord);
        for (name, _) in &self.columns {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for (i, c) in self.coords.iter().enumerate() {
            s.push_str(&fmt_num(*c));
            for (_, v) in &self.columns {
                s.push(',');
                s.push_str(&fmt_num(v[i]));
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldReport {
    pub slice: Option<SliceData>,
    pub files: Vec<PathBuf>,
}

fn eval(disc: &Discretization, sol: &DiscreteSolution, t: usize, p: Point) -> f64 {
    let xi = disc.geometry.elements[t].to_reference(p);
    dot(&sol.u[t], &disc.cell_basis.eval(xi))
}

fn field_csv(disc: &Discretization, sol: &DiscreteSolution, post: Option<&PostprocessedField>, order: usize) -> String {
    let star = post.map(|p| (p, p.basis()));
    let mut s = String::from("element,x1,x2,u_h,u_star\n");
    for t in 0..disc.mesh.num_triangles() {
        let map = &disc.geometry.elements[t];
        for j in 0..=order {
            for i in 0..=order - j {
                let xi = [i as f64 / order as f64, j as f64 / order as f64];
                let x = map.to_physical(xi);
                let u = dot(&sol.u[t], &disc.cell_basis.eval(xi));
                let us = star.as_ref().map(|(p, b)| fmt_num(dot(&p.coeffs[t], &b.eval(xi)))).unwrap_or_default();
                s.push_str(&format!("{t},{},{},{},{us}\n", fmt_num(x[0]), fmt_num(x[1]), fmt_num(u)));
            }
        }
    }
    s
}

/// Points of `slice` inside the bounding box of the mesh, or an error when
/// the line misses it.
fn slice_points(mesh: &Mesh, slice: &Slice) -> Result<Vec<Point>, CliError> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in mesh.vertices() {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let (fixed, run) = match slice.axis {
        Axis::X1 => (0, 1),
        Axis::X2 => (1, 0),
    };
    let name = if fixed == 0 { "x1" } else { "x2" };
    if !(slice.value >= lo[fixed] && slice.value <= hi[fixed]) {
        return Err(CliError::new(
            "cli",
            format!("slice {name}={} lies outside the domain [{}, {}]", slice.value, lo[fixed], hi[fixed]),
        ));
    }
    let m = slice.samples;
    let points: Vec<Point> = (0..m)
        .map(|i| {
            let mut p = [0.0; 2];
            p[fixed] = slice.value;
            p[run] = lo[run] + (hi[run] - lo[run]) * i as f64 / (m - 1) as f64;
            p
        })
        .collect();
    if let Some(p) = points.iter().find(|p| mesh.locate(**p).is_none()) {
        return Err(CliError::new("cli", format!("slice point {p:?} lies outside the domain")));
    }
    Ok(points)
}

/// Solves on the single configured level with every method and writes
/// `field_<method>.csv` and, when a slice is configured, `slice.csv`.
pub fn run_field_output(config: &RunConfig) -> Result<FieldReport, CliError> {
    config.validate()?;
    let &[n] = config.levels.as_slice() else {
        return Err(CliError::new("cli", format!("field output needs exactly one level, got {:?}", config.levels)));
    };
    let setup = setup(config)?;
    let (mesh, classes) = mesh_and_classes(&setup, n, config.pattern)?;
    let disc = discretize(config, &mesh, &classes)?;
    let points = config.slice.as_ref().map(|s| slice_points(&mesh, s)).transpose()?;
    let located: Option<Vec<(usize, Point)>> =
        points.map(|ps| ps.into_iter().map(|p| (mesh.locate(p).expect("checked above"), p)).collect());

    fs::create_dir_all(&config.out)?;
    let mut files = Vec::new();
    let mut columns = Vec::new();
    for &method in &config.methods {
        let sol = solve(config, method, &disc, &setup.problem)?;
        let post = match method {
            Method::Hdg => Some(
                postprocess(&disc, &sol, &setup.problem).map_err(|e| CliError::new("postprocess", e.to_string()))?,
            ),
            Method::Cg => None,
        };
        let path = config.out.join(format!("field_{method}.csv"));
        write_atomic(&path, &field_csv(&disc, &sol, post.as_ref(), config.lattice))?;
        files.push(path);
        if let Some(pts) = &located {
            columns.push((format!("u_{method}"), pts.iter().map(|&(t, p)| eval(&disc, &sol, t, p)).collect()));
        }
    }
    let slice = match (config.slice, located) {
        (Some(s), Some(pts)) => {
            if let Some(exact) = &setup.problem.exact {
                let tris = mesh.triangles();
                columns.push(("u_exact".into(), pts.iter().map(|&(t, p)| (exact.u)(p, tris[t].tag)).collect()));
            }
            let run = if s.axis == Axis::X1 { 1 } else { 0 };
            let data = SliceData { axis: s.axis, coords: pts.iter().map(|(_, p)| p[run]).collect(), columns };
            let path = config.out.join("slice.csv");
            write_atomic(&path, &data.to_csv())?;
            files.push(path);
            Some(data)
        }
        _ => None,
    };
    Ok(FieldReport { slice, files })
}
