//! Output documents: JSON is the machine contract, text is a human summary.
//!
//! Reports are deterministic: fixed key order (struct order), no
//! timestamps, and byte-identical output for identical inputs and flags.

use std::fmt::Write as _;

use fredbvp::characteristic::FredholmReport;
use fredbvp::linalg::{CMatrix, C64};
use fredbvp::oracle::OracleReport;
use fredbvp::sobolev::NormBreakdown;
use fredbvp::solver::BvpSolution;
use serde::Serialize;

type Cx = [f64; 2];

fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

fn vector_doc(v: &[C64]) -> Vec<Cx> {
    v.iter().map(|&z| cx(z)).collect()
}

fn matrix_doc(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| cx(z)).collect())
        .collect()
}

/// `analyze` output: the characteristic matrix plus the flat Fredholm
/// report.
#[derive(Serialize)]
pub struct AnalyzeDoc {
    pub characteristic_matrix: Vec<Vec<Cx>>,
    pub rank: usize,
    pub dim_kernel: usize,
    pub dim_cokernel: usize,
    pub index: i64,
    pub invertible: bool,
    pub rank_uncertain: bool,
    pub rank_tolerance: f64,
    pub singular_values: Vec<f64>,
}

impl AnalyzeDoc {
    pub fn new(entries: &CMatrix, report: &FredholmReport) -> Self {
        AnalyzeDoc {
            characteristic_matrix: matrix_doc(entries),
            rank: report.rank,
            dim_kernel: report.dim_kernel,
            dim_cokernel: report.dim_cokernel,
            index: report.index,
            invertible: report.invertible,
            rank_uncertain: report.rank_uncertain,
            rank_tolerance: report.rank_tolerance,
            singular_values: report.singular_values.clone(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "characteristic matrix: {} x {}",
            self.characteristic_matrix.len(),
            self.characteristic_matrix
                .first()
                .map(|r| r.len())
                .unwrap_or(0)
        );
        let _ = writeln!(
            out,
            "rank:          {} (tolerance {:.3e})",
            self.rank, self.rank_tolerance
        );
        let _ = writeln!(out, "dim kernel:    {}", self.dim_kernel);
        let _ = writeln!(out, "dim cokernel:  {}", self.dim_cokernel);
        let _ = writeln!(out, "index:         {}", self.index);
        let _ = writeln!(out, "invertible:    {}", self.invertible);
        let _ = writeln!(out, "rank uncertain: {}", self.rank_uncertain);
        let _ = writeln!(
            out,
            "singular values: [{}]",
            self.singular_values
                .iter()
                .map(|s| format!("{s:.6e}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        out
    }
}

/// Flat Fredholm block embedded in solve documents.
#[derive(Serialize)]
pub struct ReportDoc {
    pub rank: usize,
    pub dim_kernel: usize,
    pub dim_cokernel: usize,
    pub index: i64,
    pub invertible: bool,
    pub rank_uncertain: bool,
    pub rank_tolerance: f64,
    pub singular_values: Vec<f64>,
}

impl ReportDoc {
    fn new(report: &FredholmReport) -> Self {
        ReportDoc {
            rank: report.rank,
            dim_kernel: report.dim_kernel,
            dim_cokernel: report.dim_cokernel,
            index: report.index,
            invertible: report.invertible,
            rank_uncertain: report.rank_uncertain,
            rank_tolerance: report.rank_tolerance,
            singular_values: report.singular_values.clone(),
        }
    }
}

/// `solve` output document.
#[derive(Serialize)]
pub struct SolveDoc {
    pub status: &'static str,
    pub report: ReportDoc,
    pub q_particular: Vec<Cx>,
    pub kernel_basis: Vec<Vec<Cx>>,
    pub reduced_residual: f64,
    pub ode_residual: Option<f64>,
    pub boundary_residual: Option<f64>,
    pub consistency_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<Cx>>>,
}

impl SolveDoc {
    pub fn new(solution: &BvpSolution, include_samples: bool) -> Self {
        let (grid, samples) = if include_samples {
            (
                Some(solution.grid_nodes().to_vec()),
                solution
                    .samples()
                    .map(|s| s.iter().map(|v| vector_doc(v)).collect()),
            )
        } else {
            (None, None)
        };
        SolveDoc {
            status: solution.status.as_str(),
            report: ReportDoc::new(&solution.report),
            q_particular: vector_doc(&solution.q_particular),
            kernel_basis: solution
                .kernel_basis
                .iter()
                .map(|v| vector_doc(v))
                .collect(),
            reduced_residual: solution.reduced_residual,
            ode_residual: solution.ode_residual,
            boundary_residual: solution.boundary_residual,
            consistency_tolerance: solution.consistency_tolerance,
            grid,
            samples,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "status:            {}", self.status);
        let _ = writeln!(out, "rank:              {}", self.report.rank);
        let _ = writeln!(out, "dim kernel:        {}", self.report.dim_kernel);
        let _ = writeln!(out, "dim cokernel:      {}", self.report.dim_cokernel);
        let _ = writeln!(out, "index:             {}", self.report.index);
        let _ = writeln!(out, "invertible:        {}", self.report.invertible);
        let _ = writeln!(out, "reduced residual:  {:.6e}", self.reduced_residual);
        if let Some(r) = self.ode_residual {
            let _ = writeln!(out, "ode residual:      {r:.6e}");
        }
        if let Some(r) = self.boundary_residual {
            let _ = writeln!(out, "boundary residual: {r:.6e}");
        }
        let _ = writeln!(out, "kernel basis size: {}", self.kernel_basis.len());
        out
    }
}

/// One oracle outcome inside a `verify` document.
#[derive(Serialize)]
pub struct OracleDoc {
    pub oracle: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub cases: Vec<OracleCaseDoc>,
}

#[derive(Serialize)]
pub struct OracleCaseDoc {
    pub label: String,
    pub error: f64,
}

impl OracleDoc {
    pub fn new(report: &OracleReport) -> Self {
        OracleDoc {
            oracle: report.oracle.clone(),
            max_abs_error: report.max_abs_error,
            tolerance: report.tolerance,
            pass: report.pass,
            cases: report
                .cases
                .iter()
                .map(|c| OracleCaseDoc {
                    label: c.label.clone(),
                    error: c.error,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct NormDoc {
    pub component: usize,
    pub integer_part_norm: f64,
    pub seminorm: f64,
    pub total: f64,
    pub grid_size: usize,
}

impl NormDoc {
    pub fn new(component: usize, n: &NormBreakdown) -> Self {
        NormDoc {
            component,
            integer_part_norm: n.integer_part_norm,
            seminorm: n.seminorm,
            total: n.total,
            grid_size: n.grid_size,
        }
    }
}

/// `verify` output document.
#[derive(Serialize)]
pub struct VerifyDoc {
    pub all_passed: bool,
    pub reports: Vec<OracleDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<Vec<NormDoc>>,
}

impl VerifyDoc {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{}: {} (max error {:.3e}, tolerance {:.3e})",
                r.oracle,
                if r.pass { "pass" } else { "FAIL" },
                r.max_abs_error,
                r.tolerance
            );
        }
        if let Some(norms) = &self.norms {
            for n in norms {
                let _ = writeln!(
                    out,
                    "norm[{}]: integer part {:.6e}, seminorm {:.6e}, total {:.6e}",
                    n.component, n.integer_part_norm, n.seminorm, n.total
                );
            }
        }
        let _ = writeln!(out, "all passed: {}", self.all_passed);
        out
    }
}
