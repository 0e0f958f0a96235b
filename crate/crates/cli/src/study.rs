//! Refinement studies: one convergence CSV and one diagnostics CSV per
//! method, plus a metadata sidecar.

use std::fs;
use std::path::PathBuf;

use signhdg::hdg::make_tau;
use signhdg::metrics::{compute_errors, compute_rates, flux_jump_residual, flux_norm, ConvergenceTable, ErrorReport};
use signhdg::postprocess::postprocess;

use crate::config::{Method, RunConfig};
use crate::{discretize, fmt_num, mesh_and_classes, setup, solve, write_atomic, CliError, Setup};

pub const CONVERGENCE_HEADER: &str =
    "cells,h,e_u,rate_u,e_q_l2,rate_q_l2,e_q_vh,rate_q_vh,e_ubar,rate_ubar,e_ustar,rate_ustar";
pub const DIAGNOSTICS_HEADER: &str = "cells,trace_dofs,relative_asymmetry,flux_jump_relative";
pub const METADATA_FILE: &str = "study.meta";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDiagnostics {
    pub cells: usize,
    pub trace_dofs: usize,
    pub relative_asymmetry: f64,
    /// Flux jump relative to the flux norm; HDG only.
    pub flux_jump_relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelFailure {
    pub n: usize,
    pub error: CliError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodStudy {
    pub method: Method,
    pub table: ConvergenceTable,
    pub diagnostics: Vec<LevelDiagnostics>,
    /// First failing level; later levels were skipped.
    pub failure: Option<LevelFailure>,
    pub csv: String,
    pub diagnostics_csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub methods: Vec<MethodStudy>,
    pub files: Vec<PathBuf>,
}

impl StudyReport {
    pub fn method(&self, method: Method) -> Option<&MethodStudy> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn failures(&self) -> impl Iterator<Item = (Method, &LevelFailure)> {
        self.methods.iter().filter_map(|m| m.failure.as_ref().map(|f| (m.method, f)))
    }
}

fn run_level(
    config: &RunConfig,
    setup: &Setup,
    method: Method,
    n: usize,
) -> Result<(ErrorReport, LevelDiagnostics), CliError> {
    let (mesh, classes) = mesh_and_classes(setup, n, config.pattern)?;
    let disc = discretize(config, &mesh, &classes)?;
    let sol = solve(config, method, &disc, &setup.problem)?;
    let (report, flux_jump) = match method {
        Method::Hdg => {
            let post =
                postprocess(&disc, &sol, &setup.problem).map_err(|e| CliError::new("postprocess", e.to_string()))?;
            let report = compute_errors(&disc, &sol, Some(&post), &setup.problem)?;
            let tau = make_tau(&mesh, &classes, config.gamma)?;
            let norm = flux_norm(&disc, &sol);
            let jump = flux_jump_residual(&disc, &sol, &tau);
            (report, Some(if norm > 0.0 { jump / norm } else { jump }))
        }
        Method::Cg => (compute_errors(&disc, &sol, None, &setup.problem)?, None),
    };
    let diagnostics = LevelDiagnostics {
        cells: mesh.num_triangles(),
        trace_dofs: sol.stats.trace_dofs,
        relative_asymmetry: sol.stats.relative_asymmetry,
        flux_jump_relative: flux_jump,
    };
    Ok((report, diagnostics))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut s = format!("{CONVERGENCE_HEADER}\n");
    for (r, rate) in table.rows.iter().zip(&table.rates) {
        let cols = [
            r.cells.to_string(),
            fmt_num(r.h),
            fmt_num(r.e_u),
            opt(rate.u),
            fmt_num(r.e_q_l2),
            opt(rate.q_l2),
            fmt_num(r.e_q_vh),
            opt(rate.q_vh),
            fmt_num(r.e_ubar),
            opt(rate.ubar),
            opt(r.e_ustar),
            opt(rate.ustar),
        ];
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

fn diagnostics_csv(rows: &[LevelDiagnostics]) -> String {
    let mut s = format!("{DIAGNOSTICS_HEADER}\n");
    for d in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            d.cells,
            d.trace_dofs,
            fmt_num(d.relative_asymmetry),
            opt(d.flux_jump_relative)
        ));
    }
    s
}

/// Config fields followed by fixed choices of the discretization as
/// comments; parses back with [`RunConfig::from_text`].
pub fn metadata_text(config: &RunConfig) -> String {
    let quad = config.quadrature.map_or(format!("{} (2k+2)", 2 * config.k + 2), |q| q.to_string());
    let mut s = config.to_text();
    s.push_str(&format!("# tau: +{g} on Plus facets, -{g} on Minus facets, 0 on the interface\n", g = config.gamma));
    s.push_str(&format!("# cell quadrature degree: {quad}\n"));
    s.push_str(&format!("# error quadrature degree: {}\n", 2 * config.k + 4));
    s.push_str("# sign convention: div(sigma grad u) = f, q = -sigma grad u\n");
    s.push_str("# e_q_vh weight: |sigma|^-1\n");
    s.push_str("# postprocessing degree: k+1\n");
    s
}

type LevelResult = Result<(ErrorReport, LevelDiagnostics), CliError>;

/// Runs `levels` in order, stopping at the first failure.
fn sweep(
    levels: &[usize],
    mut run: impl FnMut(usize) -> LevelResult,
) -> (ConvergenceTable, Vec<LevelDiagnostics>, Option<LevelFailure>) {
    let mut table = ConvergenceTable::default();
    let mut diagnostics = Vec::new();
    for &n in levels {
        match run(n).and_then(|(r, d)| {
            table.push(r)?;
            Ok(d)
        }) {
            Ok(d) => diagnostics.push(d),
            Err(e) => return (compute_rates(table), diagnostics, Some(LevelFailure { n, error: e.at_level(n) })),
        }
    }
    (compute_rates(table), diagnostics, None)
}

/// Runs every level for every method. A failing level stops that method
/// only and is recorded in [`MethodStudy::failure`].
pub fn run_convergence_study(config: &RunConfig) -> Result<StudyReport, CliError> {
    config.validate()?;
    let setup = setup(config)?;
    if setup.problem.exact.is_none() {
        return Err(CliError::new(
            "cli",
            format!("experiment `{}` has no exact solution; use field output", config.experiment),
        ));
    }
    fs::create_dir_all(&config.out)?;
    let mut methods = Vec::new();
    let mut files = Vec::new();
    for &method in &config.methods {
        let (table, diagnostics, failure) = sweep(&config.levels, |n| run_level(config, &setup, method, n));
        let csv = convergence_csv(&table);
        let diag = diagnostics_csv(&diagnostics);
        let path = config.out.join(format!("convergence_{method}.csv"));
        write_atomic(&path, &csv)?;
        files.push(path);
        let path = config.out.join(format!("diagnostics_{method}.csv"));
        write_atomic(&path, &diag)?;
        files.push(path);
        methods.push(MethodStudy { method, table, diagnostics, failure, csv, diagnostics_csv: diag });
    }
    let path = config.out.join(METADATA_FILE);
    write_atomic(&path, &metadata_text(config))?;
    files.push(path);
    Ok(StudyReport { methods, files })
}
