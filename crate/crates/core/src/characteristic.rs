//! Characteristic matrix and Fredholm data of a boundary-value problem.
//!
//! The `r x m` characteristic matrix has as its j-th column the boundary
//! operator applied to the j-th column of the fundamental matrix. Its
//! numerical rank — singular values above an explicit, reported tolerance —
//! drives every integer output:
//!
//! - kernel dimension `m - rank`,
//! - cokernel dimension `r - rank`,
//! - index `m - r`, independent of the data,
//! - invertibility exactly when `r = m` and the rank is full.
//!
//! Rank decisions are discontinuous in the entries, so the report carries a
//! `rank_uncertain` flag whenever a singular value sits within a factor 100
//! of the tolerance.

use alloc::vec::Vec;

use crate::error::Result;
use crate::fundamental::FundamentalMatrix;
use crate::linalg::{default_rank_tolerance, CMatrix, Svd, C64};
use crate::problem::ProblemSpec;

/// Characteristic matrix with its singular-value decomposition and the rank
/// decision metadata.
pub struct CharacteristicMatrix {
    /// `r x m` entries.
    pub entries: CMatrix,
    /// Nonincreasing singular values, `min(r, m)` of them.
    pub singular_values: Vec<f64>,
    /// Count of singular values above `rank_tolerance`.
    pub rank: usize,
    /// The tolerance the rank decision used.
    pub rank_tolerance: f64,
    /// Some singular value lies within a factor 100 of the tolerance.
    pub rank_uncertain: bool,
    svd: Svd,
}

impl CharacteristicMatrix {
    /// Builds the matrix from explicit entries, deciding rank at
    /// `rank_tolerance` (or the default `max(r, m) * sigma_max * 2^-40`).
    pub fn from_entries(entries: CMatrix, rank_tolerance: Option<f64>) -> Self {
        let svd = entries.svd();
        let tol = rank_tolerance.unwrap_or_else(|| {
            default_rank_tolerance(entries.rows(), entries.cols(), svd.sigma_max())
        });
        let rank = svd.rank(tol);
        let uncertain = svd
            .singular_values()
            .iter()
            .any(|&s| s > 0.0 && tol > 0.0 && s >= tol / 100.0 && s <= tol * 100.0);
        CharacteristicMatrix {
            singular_values: svd.singular_values().to_vec(),
            rank,
            rank_tolerance: tol,
            rank_uncertain: uncertain,
            svd,
            entries,
        }
    }

    /// Orthonormal basis of the null space at the decided rank; empty when
    /// the rank is full.
    pub fn kernel_basis(&self) -> Vec<Vec<C64>> {
        self.svd.null_space(self.rank_tolerance)
    }

    /// Minimum-norm least-squares solution of `M q = rhs` truncated at the
    /// decided rank.
    pub fn min_norm_solve(&self, rhs: &[C64]) -> Vec<C64> {
        self.svd.min_norm_solve(rhs, self.rank)
    }

    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn cols(&self) -> usize {
        self.entries.cols()
    }
}

/// Builds the characteristic matrix of a problem: the boundary operator
/// applied column-by-column to the fundamental matrix.
pub fn characteristic_matrix(
    y: &FundamentalMatrix,
    problem: &ProblemSpec,
    rank_tolerance: Option<f64>,
) -> Result<CharacteristicMatrix> {
    let m = problem.dimension;
    let r = problem.boundary.rows;
    let grid = y.grid_size();
    let max_order = problem.boundary.max_integer_order();
    let mut entries = CMatrix::zeros(r, m);
    for j in 0..m {
        let column = y.column_curve(problem, j, max_order)?;
        let action = problem.boundary.apply(&column, problem, grid)?;
        for (i, v) in action.into_iter().enumerate() {
            entries[(i, j)] = v;
        }
    }
    Ok(CharacteristicMatrix::from_entries(entries, rank_tolerance))
}

/// Integer solvability data derived from the characteristic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FredholmReport {
    pub rank: usize,
    /// `m - rank`.
    pub dim_kernel: usize,
    /// `r - rank`.
    pub dim_cokernel: usize,
    /// `m - r`, independent of the data.
    pub index: i64,
    /// `r == m` and full rank.
    pub invertible: bool,
    pub rank_uncertain: bool,
    pub rank_tolerance: f64,
    pub singular_values: Vec<f64>,
}

/// Reads the Fredholm numbers off a characteristic matrix.
pub fn fredholm_analysis(matrix: &CharacteristicMatrix) -> FredholmReport {
    let r = matrix.rows();
    let m = matrix.cols();
    let rank = matrix.rank;
    FredholmReport {
        rank,
        dim_kernel: m - rank,
        dim_cokernel: r - rank,
        index: m as i64 - r as i64,
        invertible: r == m && rank == m,
        rank_uncertain: matrix.rank_uncertain,
        rank_tolerance: matrix.rank_tolerance,
        singular_values: matrix.singular_values.clone(),
    }
}

/// Orthonormal kernel basis of the characteristic matrix.
pub fn kernel_basis(matrix: &CharacteristicMatrix) -> Vec<Vec<C64>> {
    matrix.kernel_basis()
}
