//! Independent closed-form oracles and property probes used by the `verify`
//! command and the acceptance suite.
//!
//! Two problem classes have fully closed-form characteristic matrices:
//!
//! - constant coefficient with integer-order conditions at the left
//!   endpoint: the matrix is the weight-weighted sum of powers of the
//!   negated coefficient;
//! - zero coefficient with point conditions anywhere: all derivative terms
//!   vanish on the constant fundamental matrix and the matrix is the plain
//!   sum of the zero-order weights.
//!
//! [`cross_check`] classifies a problem into one of these classes and
//! compares the full pipeline against the closed form — entries within a
//! class tolerance, the four Fredholm integers exactly. The oracle side
//! always decides rank with the default tolerance rule, so a misconfigured
//! pipeline override is detected rather than mirrored.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::boundary::BoundaryOperator;
use crate::characteristic::{characteristic_matrix, fredholm_analysis};
use crate::error::{Error, Result};
use crate::fundamental::{FundamentalMatrix, OdeCurve};
use crate::linalg::{default_rank_tolerance, vec_norm2, vec_sub, CMatrix, C64};
use crate::problem::{Interval, MatrixFunction, ProblemSpec, SpaceParams, VectorFunction};

/// Outcome of one oracle run.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub oracle: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub cases: Vec<OracleCase>,
}

/// One row of an oracle's error table.
#[derive(Clone, Debug)]
pub struct OracleCase {
    pub label: String,
    pub error: f64,
}

impl OracleReport {
    fn from_cases(oracle: &str, tolerance: f64, cases: Vec<OracleCase>) -> Self {
        let max_abs_error = cases.iter().fold(0.0f64, |acc, c| acc.max(c.error));
        OracleReport {
            oracle: String::from(oracle),
            max_abs_error,
            tolerance,
            pass: max_abs_error <= tolerance,
            cases,
        }
    }
}

// ---------------------------------------------------------------------------
// Closed forms

/// Characteristic matrix of a constant-coefficient problem with conditions
/// `sum_k weights[k] y^(k)(a) = c`: the sum of `weights[k] (-A)^k`.
pub fn one_point_constant_characteristic(
    coefficient: &CMatrix,
    weights: &[CMatrix],
) -> Result<CMatrix> {
    if !coefficient.is_square() {
        return Err(Error::DimensionMismatch(String::from(
            "coefficient must be square",
        )));
    }
    let m = coefficient.rows();
    let first = weights.first().ok_or_else(|| {
        Error::DimensionMismatch(String::from("at least one weight matrix is required"))
    })?;
    let r = first.rows();
    let mut sum = CMatrix::zeros(r, m);
    let neg = coefficient.neg();
    let mut power = CMatrix::identity(m);
    for (k, w) in weights.iter().enumerate() {
        if w.rows() != r || w.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "weight {k} is {}x{}, expected {r}x{m}",
                w.rows(),
                w.cols()
            )));
        }
        if k > 0 {
            power = power.matmul(&neg);
        }
        sum = sum.add(&w.matmul(&power));
    }
    Ok(sum)
}

/// Kernel and cokernel dimensions of the one-point constant-coefficient
/// closed form, decided with the default rank rule.
pub fn one_point_constant_fredholm_numbers(
    coefficient: &CMatrix,
    weights: &[CMatrix],
) -> Result<(usize, usize)> {
    let matrix = one_point_constant_characteristic(coefficient, weights)?;
    let svd = matrix.svd();
    let tol = default_rank_tolerance(matrix.rows(), matrix.cols(), svd.sigma_max());
    let rank = svd.rank(tol);
    Ok((matrix.cols() - rank, matrix.rows() - rank))
}

/// Characteristic matrix of a zero-coefficient two-point problem: the sum
/// of the zero-order weights; points and higher-order terms drop out.
pub fn two_point_zero_characteristic(w0: &CMatrix, w1: &CMatrix) -> Result<CMatrix> {
    if w0.rows() != w1.rows() || w0.cols() != w1.cols() {
        return Err(Error::DimensionMismatch(format!(
            "weights are {}x{} and {}x{}",
            w0.rows(),
            w0.cols(),
            w1.rows(),
            w1.cols()
        )));
    }
    Ok(w0.add(w1))
}

// ---------------------------------------------------------------------------
// Pipeline cross-check

/// Compares the pipeline's characteristic matrix and Fredholm integers
/// against the applicable closed form.
///
/// Entry errors are bounded by 1e-8, relaxed to 1e-4 when fractional terms
/// participate (the fractional quadrature floor). Integer mismatches count
/// as unit errors, so any mismatch fails the report.
pub fn cross_check(
    problem: &ProblemSpec,
    grid_size: usize,
    rank_tolerance: Option<f64>,
) -> Result<OracleReport> {
    let oracle_matrix = closed_form_characteristic(problem)?;
    let y = FundamentalMatrix::compute(problem, grid_size)?;
    let pipeline = characteristic_matrix(&y, problem, rank_tolerance)?;
    let report = fredholm_analysis(&pipeline);

    let svd = oracle_matrix.svd();
    let tol_rank =
        default_rank_tolerance(oracle_matrix.rows(), oracle_matrix.cols(), svd.sigma_max());
    let oracle_rank = svd.rank(tol_rank);
    let m = oracle_matrix.cols();
    let r = oracle_matrix.rows();

    let tolerance = if problem.boundary.has_fractional_terms() {
        1e-4
    } else {
        1e-8
    };

    let mut cases = Vec::new();
    cases.push(OracleCase {
        label: String::from("characteristic matrix entries"),
        error: pipeline.entries.sub(&oracle_matrix).max_abs(),
    });
    let integer_cases = [
        ("rank", report.rank, oracle_rank),
        ("dim kernel", report.dim_kernel, m - oracle_rank),
        ("dim cokernel", report.dim_cokernel, r - oracle_rank),
    ];
    for (label, got, expect) in integer_cases {
        cases.push(OracleCase {
            label: format!("{label}: {got} vs {expect}"),
            error: if got == expect { 0.0 } else { 1.0 },
        });
    }
    let expect_index = m as i64 - r as i64;
    cases.push(OracleCase {
        label: format!("index: {} vs {}", report.index, expect_index),
        error: if report.index == expect_index {
            0.0
        } else {
            1.0
        },
    });
    Ok(OracleReport::from_cases("cross_check", tolerance, cases))
}

/// Picks the closed form covering the problem, if any.
fn closed_form_characteristic(problem: &ProblemSpec) -> Result<CMatrix> {
    if !problem.integral_free() {
        return Err(Error::NoApplicableOracle(String::from(
            "integral terms have no closed-form characteristic matrix",
        )));
    }
    let r = problem.boundary.rows;
    let m = problem.dimension;
    if problem.coefficient.is_zero() {
        // identity fundamental matrix: all derivative terms vanish and only
        // the zero-order weights survive, wherever the points sit
        let mut sum = CMatrix::zeros(r, m);
        for term in &problem.boundary.point_terms {
            if term.order == 0.0 {
                sum = sum.add(&term.weight);
            }
        }
        return Ok(sum);
    }
    if let MatrixFunction::Constant(a) = &problem.coefficient {
        let at_left = problem
            .boundary
            .point_terms
            .iter()
            .all(|t| (t.point - problem.interval.a).abs() < 1e-12 * problem.interval.length());
        let integer_orders = problem
            .boundary
            .point_terms
            .iter()
            .all(|t| t.has_integer_order());
        if at_left && integer_orders {
            let max_order = problem.boundary.max_integer_order();
            let mut weights = alloc::vec![CMatrix::zeros(r, m); max_order + 1];
            for term in &problem.boundary.point_terms {
                let k = term.order as usize;
                weights[k] = weights[k].add(&term.weight);
            }
            return one_point_constant_characteristic(a, &weights);
        }
    }
    Err(Error::NoApplicableOracle(String::from(
        "problem is neither constant-coefficient one-point nor zero-coefficient multi-point",
    )))
}

impl ProblemSpec {
    fn integral_free(&self) -> bool {
        self.boundary.integral_terms.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Property probes

/// Checks `B(Y(.) q) = M q` on random coefficient vectors.
pub fn boundary_action_probe(
    problem: &ProblemSpec,
    grid_size: usize,
    trials: usize,
    seed: u64,
) -> Result<OracleReport> {
    let y = FundamentalMatrix::compute(problem, grid_size)?;
    let matrix = characteristic_matrix(&y, problem, None)?;
    let max_order = problem.boundary.max_integer_order();
    let mut rng = SplitMix64::new(seed);
    let mut cases = Vec::with_capacity(trials);
    for trial in 0..trials {
        let q: Vec<C64> = (0..problem.dimension).map(|_| rng.unit_disk()).collect();
        let samples: Vec<Vec<C64>> = (0..=y.grid_size()).map(|i| y.value(i).matvec(&q)).collect();
        let derivs: Vec<Vec<C64>> = (0..=y.grid_size())
            .map(|i| y.node_derivative(i).matvec(&q))
            .collect();
        let curve = OdeCurve::new(problem, samples, derivs, false, max_order)?;
        let lhs = problem.boundary.apply(&curve, problem, y.grid_size())?;
        let rhs = matrix.entries.matvec(&q);
        let scale = 1.0 + matrix.entries.frobenius_norm() * vec_norm2(&q);
        cases.push(OracleCase {
            label: format!("trial {trial}"),
            error: vec_norm2(&vec_sub(&lhs, &rhs)) / scale,
        });
    }
    Ok(OracleReport::from_cases(
        "boundary_action_identity",
        1e-8,
        cases,
    ))
}

/// Probes continuity of the coefficient-to-fundamental-matrix map: for a
/// fixed unit direction, the max-node difference must decrease with the
/// perturbation scale while `delta/eps` stays within a factor 10.
pub fn continuity_probe(
    problem: &ProblemSpec,
    direction: &CMatrix,
    scales: &[f64],
    grid_size: usize,
) -> Result<OracleReport> {
    if scales.len() < 2 || scales.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidGrid(String::from(
            "perturbation scales must be strictly decreasing",
        )));
    }
    let base = FundamentalMatrix::compute(problem, grid_size)?;
    let mut deltas = Vec::with_capacity(scales.len());
    for &eps in scales {
        let perturbed = ProblemSpec {
            coefficient: problem.coefficient.perturbed(direction, eps),
            ..problem.clone()
        };
        let shifted = FundamentalMatrix::compute(&perturbed, grid_size)?;
        let mut worst = 0.0f64;
        for i in 0..=base.grid_size() {
            let diff = shifted.value(i).sub(base.value(i)).frobenius_norm();
            if diff > worst {
                worst = diff;
            }
        }
        deltas.push(worst);
    }

    let monotone = deltas.windows(2).all(|w| w[0] > w[1]);
    let ratios: Vec<f64> = deltas.iter().zip(scales).map(|(d, e)| d / e).collect();
    let ratio_max = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
    let ratio_min = ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let spread = if monotone && ratio_min > 0.0 {
        ratio_max / ratio_min - 1.0
    } else {
        f64::INFINITY
    };
    let mut cases: Vec<OracleCase> = scales
        .iter()
        .zip(&deltas)
        .map(|(e, d)| OracleCase {
            label: format!("eps = {e:e}: delta = {d:e}"),
            error: 0.0,
        })
        .collect();
    cases.push(OracleCase {
        label: String::from("ratio spread"),
        error: spread,
    });
    Ok(OracleReport::from_cases(
        "coefficient_continuity",
        9.0,
        cases,
    ))
}

/// Random direction with unit Frobenius norm.
pub fn random_direction(m: usize, rng: &mut SplitMix64) -> CMatrix {
    let raw = CMatrix::from_fn(m, m, |_, _| rng.unit_disk());
    let norm = raw.frobenius_norm();
    if norm > 0.0 {
        raw.scale_re(1.0 / norm)
    } else {
        CMatrix::identity(m).scale_re(1.0 / libm::sqrt(m as f64))
    }
}

// ---------------------------------------------------------------------------
// Deterministic corpus

/// SplitMix64 generator; deterministic corpora keep verification runs
/// byte-reproducible.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() as usize) % (hi - lo + 1)
    }

    /// Uniform on the complex unit disk.
    pub fn unit_disk(&mut self) -> C64 {
        loop {
            let re = self.range(-1.0, 1.0);
            let im = self.range(-1.0, 1.0);
            if re * re + im * im <= 1.0 {
                return C64::new(re, im);
            }
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.unit_disk())
    }
}

/// Random constant-coefficient problem with integer-order conditions at the
/// left endpoint (`m <= 4`, `r <= 5`, orders below `n_orders <= 3`).
///
/// Instances whose closed-form singular values sit within a factor 100 of
/// the rank tolerance are rejected, so integer comparisons stay well-posed.
pub fn random_one_point_problem(rng: &mut SplitMix64, b: f64) -> ProblemSpec {
    loop {
        let m = rng.usize_in(1, 4);
        let r = rng.usize_in(1, 5);
        let n_orders = rng.usize_in(1, 3);
        let a = rng.matrix(m, m);
        let weights: Vec<CMatrix> = (0..n_orders).map(|_| rng.matrix(r, m)).collect();
        let oracle = one_point_constant_characteristic(&a, &weights).unwrap();
        if !rank_is_well_separated(&oracle) {
            continue;
        }
        let point_terms = weights
            .iter()
            .enumerate()
            .map(|(k, w)| crate::boundary::PointTerm {
                point: 0.0,
                order: k as f64,
                weight: w.clone(),
            })
            .collect();
        let c: Vec<C64> = (0..r).map(|_| rng.unit_disk()).collect();
        return ProblemSpec {
            dimension: m,
            interval: Interval { a: 0.0, b },
            // orders up to 2 fit below s - 1/p = 3
            space: SpaceParams { s: 3.5, p: 2.0 },
            coefficient: MatrixFunction::Constant(a),
            rhs: VectorFunction::zero(m),
            boundary: BoundaryOperator {
                rows: r,
                point_terms,
                integral_terms: Vec::new(),
            },
            boundary_rhs: c,
        };
    }
}

/// Random zero-coefficient two-point problem with zero-order weights at two
/// points plus fractional-order extras (`beta` in {0.3, 0.5, 0.7}).
pub fn random_two_point_problem(rng: &mut SplitMix64) -> ProblemSpec {
    loop {
        let m = rng.usize_in(1, 4);
        let r = rng.usize_in(1, 4);
        let w0 = rng.matrix(r, m);
        let w1 = rng.matrix(r, m);
        let oracle = two_point_zero_characteristic(&w0, &w1).unwrap();
        if !rank_is_well_separated(&oracle) {
            continue;
        }
        let t0 = rng.range(0.0, 0.45);
        let t1 = rng.range(0.55, 1.0);
        let mut point_terms = alloc::vec![
            crate::boundary::PointTerm {
                point: t0,
                order: 0.0,
                weight: w0,
            },
            crate::boundary::PointTerm {
                point: t1,
                order: 0.0,
                weight: w1,
            },
        ];
        let fractional_orders = [0.3, 0.5, 0.7];
        for _ in 0..rng.usize_in(1, 2) {
            let beta = fractional_orders[rng.usize_in(0, 2)];
            let at = if rng.next_f64() < 0.5 { t0 } else { t1 };
            point_terms.push(crate::boundary::PointTerm {
                point: at,
                order: beta,
                weight: rng.matrix(r, m),
            });
        }
        let c: Vec<C64> = (0..r).map(|_| rng.unit_disk()).collect();
        return ProblemSpec {
            dimension: m,
            interval: Interval { a: 0.0, b: 1.0 },
            space: SpaceParams { s: 1.5, p: 2.0 },
            coefficient: MatrixFunction::constant_zero(m, m),
            rhs: VectorFunction::zero(m),
            boundary: BoundaryOperator {
                rows: r,
                point_terms,
                integral_terms: Vec::new(),
            },
            boundary_rhs: c,
        };
    }
}

/// True when every singular value keeps a factor-100 margin from the
/// default rank tolerance.
fn rank_is_well_separated(matrix: &CMatrix) -> bool {
    let svd = matrix.svd();
    let tol = default_rank_tolerance(matrix.rows(), matrix.cols(), svd.sigma_max());
    if tol == 0.0 {
        return true;
    }
    svd.singular_values()
        .iter()
        .all(|&s| s < tol / 100.0 || s > tol * 100.0)
}

/// The built-in verification corpus: a deterministic mix of both closed-form
/// classes.
pub fn builtin_corpus(seed: u64, one_point: usize, two_point: usize) -> Vec<ProblemSpec> {
    let mut rng = SplitMix64::new(seed);
    let mut corpus = Vec::with_capacity(one_point + two_point);
    for _ in 0..one_point {
        corpus.push(random_one_point_problem(&mut rng, 1.0));
    }
    for _ in 0..two_point {
        corpus.push(random_two_point_problem(&mut rng));
    }
    corpus
}
