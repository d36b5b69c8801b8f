//! Dense complex linear algebra for small systems.
//!
//! Row-major heap-backed matrices over `Complex64` with the three
//! factorizations the solver needs: LU with partial pivoting (node
//! inverses), a one-sided Jacobi SVD (rank decisions, kernel bases,
//! minimum-norm least squares), and plain arithmetic. Matrices here are
//! desk-scale (a handful of rows); no blocking or pivot-growth heroics.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Condition-number cap beyond which a node inverse is rejected.
pub const CONDITION_CAP: f64 = 1e14;

/// Default numerical-rank tolerance: `max(rows, cols) * sigma_max * 2^-40`.
pub fn default_rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    let dim = if rows > cols { rows } else { cols };
    dim as f64 * sigma_max * libm::exp2(-40.0)
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        if rows.is_empty() {
            return Ok(CMatrix::zeros(0, 0));
        }
        let cols = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(CMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += *y;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= *y;
        }
        out
    }

    pub fn neg(&self) -> CMatrix {
        self.scale(-C64::ONE)
    }

    pub fn scale(&self, k: C64) -> CMatrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= k;
        }
        out
    }

    pub fn scale_re(&self, k: f64) -> CMatrix {
        self.scale(C64::new(k, 0.0))
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == C64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C64::ZERO, |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// Matrix power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, k: usize) -> CMatrix {
        assert!(self.is_square());
        let mut out = CMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| {
            let n = x.norm();
            if n > acc {
                n
            } else {
                acc
            }
        })
    }

    /// Induced 1-norm: maximum column absolute sum.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols {
            let mut sum = 0.0;
            for i in 0..self.rows {
                sum += self[(i, j)].norm();
            }
            if sum > best {
                best = sum;
            }
        }
        best
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x.norm_sqr()).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == C64::ZERO)
    }

    /// LU factorization with partial pivoting; fails on an exactly-vanishing
    /// pivot column.
    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        Ok(self.lu()?.inverse())
    }

    /// Determinant via LU; zero pivots are tolerated and yield zero.
    pub fn determinant(&self) -> C64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut lu = self.clone();
        let mut det = C64::ONE;
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let cand = lu[(i, k)].norm();
                if cand > best {
                    best = cand;
                    pivot = i;
                }
            }
            if best == 0.0 {
                return C64::ZERO;
            }
            if pivot != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
                det = -det;
            }
            det *= lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / lu[(k, k)];
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        det
    }

    /// Singular value decomposition by one-sided Jacobi rotations.
    ///
    /// The right factor is the full `cols x cols` unitary, so null spaces of
    /// wide matrices come out complete.
    pub fn svd(&self) -> Svd {
        Svd::compute(self)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors of a square matrix with the pivot permutation.
pub struct Lu {
    lu: CMatrix,
    pivots: Vec<usize>,
}

impl Lu {
    fn factor(a: &CMatrix) -> Result<Lu> {
        assert!(a.is_square());
        let n = a.rows;
        let mut lu = a.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let cand = lu[(i, k)].norm();
                if cand > best {
                    best = cand;
                    pivot = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularFundamental(alloc::format!(
                    "LU pivot vanished in column {k}"
                )));
            }
            pivots.push(pivot);
            if pivot != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
            }
            for i in k + 1..n {
                let factor = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(Lu { lu, pivots })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        // Forward substitution must walk row-wise: row i of the stored L is
        // final only after the interchange of step i has been applied, so
        // each step swaps first and then consumes rows 0..i, which are
        // already settled.
        for i in 0..n {
            x.swap(i, self.pivots[i]);
            let mut sum = x[i];
            for j in 0..i {
                sum -= self.lu[(i, j)] * x[j];
            }
            x[i] = sum;
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let sub = self.lu[(k, j)] * x[j];
                x[k] -= sub;
            }
            x[k] /= self.lu[(k, k)];
        }
        x
    }

    pub fn solve_matrix(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rhs.rows(), rhs.cols());
        for j in 0..rhs.cols() {
            let col = self.solve(&rhs.column(j));
            for i in 0..rhs.rows() {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve_matrix(&CMatrix::identity(self.lu.rows))
    }
}

/// Thin-U / full-V singular value decomposition.
pub struct Svd {
    /// Singular values, nonincreasing, `min(rows, cols)` of them.
    sigma: Vec<f64>,
    /// All `cols` column norms of the rotated matrix, nonincreasing.
    col_norms: Vec<f64>,
    /// Left vectors, `rows x cols`; columns beyond the rank are zero.
    u: CMatrix,
    /// Right vectors, `cols x cols`, unitary.
    v: CMatrix,
}

impl Svd {
    fn compute(a: &CMatrix) -> Svd {
        let rows = a.rows();
        let cols = a.cols();
        let mut w = a.clone();
        let mut v = CMatrix::identity(cols);

        // One-sided Jacobi: orthogonalize column pairs of `w`, accumulating
        // the rotations into `v`, until every pair's normalized inner
        // product falls below threshold.
        if cols > 1 && rows > 0 {
            let mut sweeps = 0;
            loop {
                let mut off = 0.0f64;
                for p in 0..cols - 1 {
                    for q in p + 1..cols {
                        let mut alpha = 0.0f64;
                        let mut beta = 0.0f64;
                        let mut gamma = C64::ZERO;
                        for i in 0..rows {
                            let xp = w[(i, p)];
                            let xq = w[(i, q)];
                            alpha += xp.norm_sqr();
                            beta += xq.norm_sqr();
                            gamma += xp.conj() * xq;
                        }
                        let g = gamma.norm();
                        // Gate on absolute significance relative to the
                        // larger column: a transfer below eps * sigma_max
                        // cannot move any rank decision.
                        let scale = if alpha > beta { alpha } else { beta };
                        if scale <= f64::MIN_POSITIVE || g <= 1e-15 * scale {
                            continue;
                        }
                        let cosine = g / (libm::sqrt(alpha) * libm::sqrt(beta));
                        if cosine > off {
                            off = cosine;
                        }
                        // Absorb the phase of gamma, then apply the real
                        // Jacobi rotation that zeroes the 2x2 Gram
                        // off-diagonal. Scalar division avoids underflow in
                        // the complex-division denominator.
                        let phase = C64::new(gamma.re / g, gamma.im / g);
                        let tau = (beta - alpha) / (2.0 * g);
                        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                        let t = sign / (fabs(tau) + libm::sqrt(1.0 + tau * tau));
                        let c = 1.0 / libm::sqrt(1.0 + t * t);
                        let s = t * c;
                        let sp = phase * s;
                        let spc = phase.conj() * s;
                        for i in 0..rows {
                            let xp = w[(i, p)];
                            let xq = w[(i, q)];
                            w[(i, p)] = xp * c - xq * spc;
                            w[(i, q)] = xp * sp + xq * c;
                        }
                        for i in 0..cols {
                            let vp = v[(i, p)];
                            let vq = v[(i, q)];
                            v[(i, p)] = vp * c - vq * spc;
                            v[(i, q)] = vp * sp + vq * c;
                        }
                    }
                }
                sweeps += 1;
                if off < 1e-14 || sweeps >= 64 {
                    break;
                }
            }
        }

        let norms: Vec<f64> = (0..cols)
            .map(|j| {
                let mut acc = 0.0;
                for i in 0..rows {
                    acc += w[(i, j)].norm_sqr();
                }
                libm::sqrt(acc)
            })
            .collect();
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

        let mut u = CMatrix::zeros(rows, cols);
        let mut v_sorted = CMatrix::zeros(cols, cols);
        let mut col_norms = Vec::with_capacity(cols);
        for (k, &src) in order.iter().enumerate() {
            let norm = norms[src];
            col_norms.push(norm);
            if norm > 0.0 {
                for i in 0..rows {
                    u[(i, k)] = w[(i, src)] / norm;
                }
            }
            for i in 0..cols {
                v_sorted[(i, k)] = v[(i, src)];
            }
        }
        let k = rows.min(cols);
        let sigma = col_norms[..k].to_vec();

        Svd {
            sigma,
            col_norms,
            u,
            v: v_sorted,
        }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Count of singular values strictly above `tol`, capped at
    /// `min(rows, cols)`.
    pub fn rank(&self, tol: f64) -> usize {
        let all = self.col_norms.iter().filter(|&&s| s > tol).count();
        all.min(self.sigma.len())
    }

    /// Orthonormal basis of the null space at tolerance `tol`: the right
    /// singular vectors whose singular values do not exceed it.
    pub fn null_space(&self, tol: f64) -> Vec<Vec<C64>> {
        let rank = self.rank(tol);
        (rank..self.v.rows()).map(|k| self.v.column(k)).collect()
    }

    /// Minimum-norm least-squares solution truncated at `rank` singular
    /// values.
    pub fn min_norm_solve(&self, rhs: &[C64], rank: usize) -> Vec<C64> {
        let n = self.v.rows();
        let mut x = vec![C64::ZERO; n];
        for k in 0..rank.min(self.sigma.len()) {
            if self.col_norms[k] == 0.0 {
                break;
            }
            let coeff = dot(&self.u.column(k), rhs) / self.col_norms[k];
            for (i, slot) in x.iter_mut().enumerate() {
                *slot += coeff * self.v[(i, k)];
            }
        }
        x
    }

    pub fn right_vector(&self, k: usize) -> Vec<C64> {
        self.v.column(k)
    }
}

fn fabs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// Conjugated dot product `sum conj(x_i) y_i`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(C64::ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn vec_norm2(x: &[C64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v.norm_sqr()).sum())
}

pub fn vec_norm_inf(x: &[C64]) -> f64 {
    x.iter().fold(0.0, |acc, v| {
        let n = v.norm();
        if n > acc {
            n
        } else {
            acc
        }
    })
}

pub fn vec_add(x: &[C64], y: &[C64]) -> Vec<C64> {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn vec_sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn vec_scale(x: &[C64], k: C64) -> Vec<C64> {
    x.iter().map(|a| a * k).collect()
}

/// `x += k * y` in place.
pub fn axpy(x: &mut [C64], k: C64, y: &[C64]) {
    assert_eq!(x.len(), y.len());
    for (a, b) in x.iter_mut().zip(y) {
        *a += k * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn near(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn identity_roundtrip() {
        let i3 = CMatrix::identity(3);
        let inv = i3.inverse().unwrap();
        assert_eq!(inv, i3);
        assert_eq!(i3.determinant(), C64::ONE);
    }

    #[test]
    fn lu_solves_known_system() {
        // [[2, 1], [1, 3]] x = [5, 10] -> x = [1, 3]
        let a = CMatrix::from_rows(&[
            vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0)],
        ])
        .unwrap();
        let x = a
            .lu()
            .unwrap()
            .solve(&[C64::new(5.0, 0.0), C64::new(10.0, 0.0)]);
        assert!(near(x[0], C64::new(1.0, 0.0), 1e-14));
        assert!(near(x[1], C64::new(3.0, 0.0), 1e-14));
    }

    #[test]
    fn lu_complex_inverse() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)],
            vec![C64::new(-1.0, 0.0), C64::new(3.0, -1.0)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { C64::ONE } else { C64::ZERO };
                assert!(near(prod[(i, j)], expect, 1e-13));
            }
        }
    }

    #[test]
    fn lu_rejects_singular() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            vec![C64::new(2.0, 0.0), C64::new(4.0, 0.0)],
        ])
        .unwrap();
        assert!(a.lu().is_err());
        assert_eq!(a.determinant(), C64::ZERO);
    }

    #[test]
    fn svd_identity() {
        let svd = CMatrix::identity(3).svd();
        assert_eq!(svd.singular_values().len(), 3);
        for &s in svd.singular_values() {
            assert!((s - 1.0).abs() < 1e-14);
        }
        assert_eq!(svd.rank(1e-10), 3);
        assert!(svd.null_space(1e-10).is_empty());
    }

    #[test]
    fn svd_zero_matrix() {
        let svd = CMatrix::zeros(2, 3).svd();
        assert_eq!(svd.rank(0.0), 0);
        let null = svd.null_space(0.0);
        assert_eq!(null.len(), 3);
        // basis stays orthonormal
        for (i, x) in null.iter().enumerate() {
            for (j, y) in null.iter().enumerate() {
                let d = dot(x, y);
                let expect = if i == j { C64::ONE } else { C64::ZERO };
                assert!(near(d, expect, 1e-14));
            }
        }
    }

    #[test]
    fn svd_empty_rows() {
        let svd = CMatrix::zeros(0, 2).svd();
        assert!(svd.singular_values().is_empty());
        assert_eq!(svd.rank(0.0), 0);
        assert_eq!(svd.null_space(0.0).len(), 2);
    }

    #[test]
    fn svd_known_rank_one() {
        // rows (1, 0) kernel is e2 up to phase
        let a = CMatrix::from_rows(&[vec![C64::ONE, C64::ZERO]]).unwrap();
        let svd = a.svd();
        assert_eq!(svd.rank(1e-12), 1);
        let null = svd.null_space(1e-12);
        assert_eq!(null.len(), 1);
        assert!((null[0][1].norm() - 1.0).abs() < 1e-14);
        assert!(null[0][0].norm() < 1e-14);
    }

    #[test]
    fn min_norm_solution_underdetermined() {
        // x1 + x2 = 2 -> min-norm (1, 1)
        let a = CMatrix::from_rows(&[vec![C64::ONE, C64::ONE]]).unwrap();
        let svd = a.svd();
        let x = svd.min_norm_solve(&[C64::new(2.0, 0.0)], 1);
        assert!(near(x[0], C64::ONE, 1e-14));
        assert!(near(x[1], C64::ONE, 1e-14));
    }

    fn reconstruct(svd: &Svd, rows: usize, cols: usize) -> CMatrix {
        // U diag(sigma) V^H over all retained directions
        let mut out = CMatrix::zeros(rows, cols);
        for k in 0..cols {
            let s = if k < svd.col_norms.len() {
                svd.col_norms[k]
            } else {
                0.0
            };
            if s == 0.0 {
                continue;
            }
            for i in 0..rows {
                for j in 0..cols {
                    out[(i, j)] += svd.u[(i, k)] * C64::new(s, 0.0) * svd.v[(j, k)].conj();
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn svd_reconstructs_random_matrices(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in proptest::array::uniform32(0u8..),
        ) {
            let mut vals = seed.iter().map(|&b| (b as f64 - 127.5) / 127.5);
            let mut next = || C64::new(vals.next().unwrap_or(0.3), vals.next().unwrap_or(-0.2));
            let a = CMatrix::from_fn(rows, cols, |_, _| next());
            let svd = a.svd();
            let back = reconstruct(&svd, rows, cols);
            let scale = a.frobenius_norm().max(1.0);
            prop_assert!(back.sub(&a).frobenius_norm() <= 1e-12 * scale);
            // singular values sorted nonincreasing
            for w in svd.singular_values().windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            // V unitary
            let vtv = svd.v.adjoint().matmul(&svd.v);
            let eye = CMatrix::identity(cols);
            prop_assert!(vtv.sub(&eye).frobenius_norm() <= 1e-12 * cols as f64);
        }

        #[test]
        fn lu_solve_random_systems(seed in proptest::array::uniform32(0u8..)) {
            let mut vals = seed.iter().map(|&b| (b as f64 - 127.5) / 127.5);
            let mut next = || C64::new(vals.next().unwrap_or(0.4), vals.next().unwrap_or(0.1));
            let mut a = CMatrix::from_fn(3, 3, |_, _| next());
            // diagonal boost keeps the test matrix comfortably invertible
            for i in 0..3 {
                a[(i, i)] += C64::new(4.0, 0.0);
            }
            let x_true: Vec<C64> = (0..3).map(|_| next()).collect();
            let b = a.matvec(&x_true);
            let x = a.lu().unwrap().solve(&b);
            for i in 0..3 {
                prop_assert!((x[i] - x_true[i]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn lu_inverse_on_general_random_matrices() {
        // unstructured matrices exercise every pivot interchange pattern
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for trial in 0..2000 {
            let n = 2 + trial % 4;
            let a = CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
            let inv = match a.inverse() {
                Ok(inv) => inv,
                Err(_) => continue,
            };
            let cond = a.one_norm() * inv.one_norm();
            if cond > 1e8 {
                continue; // too ill-conditioned for a clean assertion
            }
            let err = a.matmul(&inv).sub(&CMatrix::identity(n)).max_abs();
            assert!(
                err <= 1e-12 * cond.max(1.0),
                "trial {trial}: error {err} at condition {cond}"
            );
        }
    }

    #[test]
    fn rank_respects_tolerance() {
        let mut a = CMatrix::identity(3);
        a[(2, 2)] = C64::new(1e-9, 0.0);
        let svd = a.svd();
        assert_eq!(svd.rank(1e-12), 3);
        assert_eq!(svd.rank(1e-6), 2);
    }

    #[test]
    fn default_tolerance_scales_with_sigma() {
        let tol = default_rank_tolerance(3, 2, 10.0);
        assert!((tol - 3.0 * 10.0 * libm::exp2(-40.0)).abs() < 1e-25);
    }
}
