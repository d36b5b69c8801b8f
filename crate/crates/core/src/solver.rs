//! Reduction of the full inhomogeneous problem to the finite linear system
//! `M q = c - B y_p` and classification of its solvability.
//!
//! The solution set is `y = Y q + y_p` over all `q` solving the reduced
//! system. One SVD-backed rank decision governs both the Fredholm report
//! and the classification, so the two can never contradict each other:
//!
//! - `Unique`: the reduced system is consistent and the kernel is trivial;
//! - `Family`: consistent with a nontrivial kernel, reported as the
//!   minimum-norm member plus an orthonormal kernel basis;
//! - `Inconsistent`: the reduced residual exceeds the consistency
//!   tolerance; no solution exists.

use alloc::vec::Vec;

use crate::characteristic::{
    characteristic_matrix, fredholm_analysis, CharacteristicMatrix, FredholmReport,
};
use crate::error::{Error, Result};
use crate::fundamental::{ode_residual, trajectory_derivatives, FundamentalMatrix, OdeCurve};
use crate::linalg::{vec_norm2, vec_sub, C64};
use crate::problem::ProblemSpec;

/// Default scale factor for the Family/Inconsistent decision.
pub const DEFAULT_CONSISTENCY_FACTOR: f64 = 1e-8;

/// Default integration grid.
pub const DEFAULT_GRID: usize = 1024;

/// Solver configuration.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Number of integration steps.
    pub grid_size: usize,
    /// Absolute singular-value cutoff; default is relative to the largest
    /// singular value.
    pub rank_tolerance: Option<f64>,
    /// Base factor for the consistency threshold
    /// `factor * (1 + ||c|| + ||B y_p||)`.
    pub consistency_tolerance: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid_size: DEFAULT_GRID,
            rank_tolerance: None,
            consistency_tolerance: None,
        }
    }
}

/// Solvability classification of a problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Exactly one solution.
    Unique,
    /// Infinitely many solutions; the kernel basis parameterizes them.
    Family,
    /// No solution: the boundary data is outside the range of the reduced
    /// system.
    Inconsistent,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Unique => "unique",
            SolveStatus::Family => "family",
            SolveStatus::Inconsistent => "inconsistent",
        }
    }
}

/// Outcome of a solve: classification, coordinates, samples, diagnostics.
pub struct BvpSolution {
    pub status: SolveStatus,
    pub report: FredholmReport,
    pub characteristic: CharacteristicMatrix,
    /// Minimum-norm solution of the reduced system (zero for Inconsistent).
    pub q_particular: Vec<C64>,
    /// Orthonormal kernel basis; nonempty only for Family.
    pub kernel_basis: Vec<Vec<C64>>,
    /// `||M q - (c - B y_p)||`.
    pub reduced_residual: f64,
    /// Central-difference ODE residual of the returned samples.
    pub ode_residual: Option<f64>,
    /// `||B y - c||` re-evaluated on the returned solution.
    pub boundary_residual: Option<f64>,
    /// The threshold the Family/Inconsistent decision used.
    pub consistency_tolerance: f64,
    grid_nodes: Vec<f64>,
    samples: Option<Vec<Vec<C64>>>,
    sample_derivs: Option<Vec<Vec<C64>>>,
}

impl BvpSolution {
    pub fn grid_nodes(&self) -> &[f64] {
        &self.grid_nodes
    }

    /// Solution samples on the grid; absent for Inconsistent.
    pub fn samples(&self) -> Option<&[Vec<C64>]> {
        self.samples.as_deref()
    }

    /// Dense evaluation of the solution, cubic Hermite between nodes.
    pub fn evaluate(&self, t: f64) -> Result<Vec<C64>> {
        let (samples, derivs) = match (&self.samples, &self.sample_derivs) {
            (Some(s), Some(d)) => (s, d),
            _ => return Err(Error::NoSolution),
        };
        let a = self.grid_nodes[0];
        let b = *self.grid_nodes.last().unwrap();
        let n = self.grid_nodes.len() - 1;
        let h = (b - a) / n as f64;
        let slack = 1e-12 * (b - a).max(1.0);
        if !t.is_finite() || t < a - slack || t > b + slack {
            return Err(Error::OutOfDomain { t, a, b });
        }
        let t = t.max(a).min(b);
        let pos = (t - a) / h;
        let nearest = libm::round(pos) as usize;
        if nearest <= n && libm::fabs(pos - nearest as f64) < 1e-9 {
            return Ok(samples[nearest].clone());
        }
        let seg = (pos as usize).min(n - 1);
        let theta = pos - seg as f64;
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let (w00, w10, w01, w11) = (
            2.0 * t3 - 3.0 * t2 + 1.0,
            t3 - 2.0 * t2 + theta,
            -2.0 * t3 + 3.0 * t2,
            t3 - t2,
        );
        Ok((0..samples[seg].len())
            .map(|i| {
                samples[seg][i] * w00
                    + derivs[seg][i] * (w10 * h)
                    + samples[seg + 1][i] * w01
                    + derivs[seg + 1][i] * (w11 * h)
            })
            .collect())
    }
}

/// Solves the boundary-value problem and classifies its solvability.
pub fn solve(problem: &ProblemSpec, options: &SolveOptions) -> Result<BvpSolution> {
    problem.validate()?;
    let grid = options.grid_size;
    let max_order = problem.boundary.max_integer_order();

    let y = FundamentalMatrix::compute(problem, grid)?;
    let matrix = characteristic_matrix(&y, problem, options.rank_tolerance)?;
    let report = fredholm_analysis(&matrix);

    let yp_curve = y.particular_curve(problem, max_order)?;
    let b_yp = problem.boundary.apply(&yp_curve, problem, grid)?;
    let c = &problem.boundary_rhs;
    let reduced_rhs = vec_sub(c, &b_yp);

    let scale = 1.0 + vec_norm2(c) + vec_norm2(&b_yp);
    let factor = options
        .consistency_tolerance
        .unwrap_or(DEFAULT_CONSISTENCY_FACTOR);
    let consistency_tolerance = factor * scale;
    if consistency_tolerance <= matrix.rank_tolerance {
        return Err(Error::ToleranceConflict {
            consistency: consistency_tolerance,
            floor: matrix.rank_tolerance,
        });
    }

    let q = matrix.min_norm_solve(&reduced_rhs);
    let image = matrix.entries.matvec(&q);
    let reduced_residual = vec_norm2(&vec_sub(&image, &reduced_rhs));

    let status = if reduced_residual <= consistency_tolerance {
        if report.dim_kernel == 0 {
            SolveStatus::Unique
        } else {
            SolveStatus::Family
        }
    } else {
        SolveStatus::Inconsistent
    };

    let grid_nodes = y.nodes();
    let (samples, sample_derivs, ode_res, boundary_res, kernel, q_out) =
        if status == SolveStatus::Inconsistent {
            (None, None, None, None, Vec::new(), Vec::new())
        } else {
            let yp_samples = yp_curve.samples();
            let samples: Vec<Vec<C64>> = (0..=y.grid_size())
                .map(|i| {
                    let mut v = y.value(i).matvec(&q);
                    for (slot, w) in v.iter_mut().zip(&yp_samples[i]) {
                        *slot += w;
                    }
                    v
                })
                .collect();
            let derivs = trajectory_derivatives(problem, &grid_nodes, &samples, true)?;
            let res = ode_residual(problem, &grid_nodes, &samples, true)?;
            let curve = OdeCurve::new(problem, samples.clone(), derivs.clone(), true, max_order)?;
            let b_y = problem.boundary.apply(&curve, problem, grid)?;
            let boundary_res = vec_norm2(&vec_sub(&b_y, c));
            let kernel = if status == SolveStatus::Family {
                matrix.kernel_basis()
            } else {
                Vec::new()
            };
            (
                Some(samples),
                Some(derivs),
                Some(res),
                Some(boundary_res),
                kernel,
                q,
            )
        };

    Ok(BvpSolution {
        status,
        report,
        characteristic: matrix,
        q_particular: q_out,
        kernel_basis: kernel,
        reduced_residual,
        ode_residual: ode_res,
        boundary_residual: boundary_res,
        consistency_tolerance,
        grid_nodes,
        samples,
        sample_derivs,
    })
}
