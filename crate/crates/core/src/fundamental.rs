//! Fundamental matrix of the homogeneous system and trajectories built on
//! its grid.
//!
//! `Y(t)` solves `Y' + A(t) Y = 0` with `Y(a) = I`. Constant coefficients
//! take the scaling-and-squaring matrix-exponential fast path; everything
//! else is integrated with fixed-step classical fourth-order Runge-Kutta.
//! Dense output is cubic Hermite from the stored node values and node
//! derivatives, which matches the integrator's order. Node inverses are LU
//! factorizations cached for the variation-of-constants quadrature.
//!
//! [`OdeCurve`] wraps any trajectory tied to the system (columns of `Y`,
//! the particular solution, full solutions) as a boundary operand:
//! derivatives of every order come from the recursion
//! `y^(k+1) = (P_k' - P_k A) y + (P_k f + R_k')` seeded with `P_1 = -A`,
//! `R_1 = f`, evaluated exactly for constant and polynomial data and by
//! finite differences (order at most two) for sampled data.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::linalg::{CMatrix, C64, CONDITION_CAP};
use crate::problem::{MatrixFunction, ProblemSpec, VectorFunction};
use crate::quad::cumulative_integral;

/// Smallest admissible integration grid.
pub const MIN_GRID: usize = 16;

/// Grid-sampled fundamental matrix with cached node inverses.
pub struct FundamentalMatrix {
    a: f64,
    b: f64,
    h: f64,
    values: Vec<CMatrix>,
    derivs: Vec<CMatrix>,
    inverses: Vec<CMatrix>,
}

impl FundamentalMatrix {
    /// Integrates the homogeneous matrix system on a uniform grid with
    /// `grid_size` steps.
    pub fn compute(problem: &ProblemSpec, grid_size: usize) -> Result<Self> {
        if grid_size < MIN_GRID {
            return Err(Error::InvalidGrid(format!(
                "grid size {grid_size} is below the minimum {MIN_GRID}"
            )));
        }
        let m = problem.dimension;
        let iv = &problem.interval;
        let n = grid_size;
        let h = iv.length() / n as f64;
        let node = |i: usize| if i == n { iv.b } else { iv.a + i as f64 * h };

        let mut values = Vec::with_capacity(n + 1);
        if let MatrixFunction::Constant(a_mat) = &problem.coefficient {
            values.push(CMatrix::identity(m));
            for i in 1..=n {
                let e = expm(&a_mat.scale_re(-(node(i) - iv.a)))?;
                if !e.is_finite() {
                    return Err(Error::NonFiniteValue(format!(
                        "fundamental matrix overflowed at node {i}"
                    )));
                }
                values.push(e);
            }
        } else {
            let mut y = CMatrix::identity(m);
            values.push(y.clone());
            for i in 0..n {
                let t = node(i);
                let neg_a0 = problem.coefficient.evaluate(iv, t)?.neg();
                let neg_ah = problem.coefficient.evaluate(iv, t + 0.5 * h)?.neg();
                let neg_a1 = problem.coefficient.evaluate(iv, node(i + 1))?.neg();
                let k1 = neg_a0.matmul(&y);
                let k2 = neg_ah.matmul(&y.add(&k1.scale_re(0.5 * h)));
                let k3 = neg_ah.matmul(&y.add(&k2.scale_re(0.5 * h)));
                let k4 = neg_a1.matmul(&y.add(&k3.scale_re(h)));
                let incr = k1
                    .add(&k2.scale_re(2.0))
                    .add(&k3.scale_re(2.0))
                    .add(&k4)
                    .scale_re(h / 6.0);
                y = y.add(&incr);
                if !y.is_finite() {
                    return Err(Error::NonFiniteValue(format!(
                        "integration overflowed between nodes {i} and {}",
                        i + 1
                    )));
                }
                values.push(y.clone());
            }
        }

        let mut derivs = Vec::with_capacity(n + 1);
        for (i, y) in values.iter().enumerate() {
            let neg_a = problem.coefficient.evaluate(iv, node(i))?.neg();
            derivs.push(neg_a.matmul(y));
        }

        let mut inverses = Vec::with_capacity(n + 1);
        for (i, y) in values.iter().enumerate() {
            let lu = y.lu().map_err(|_| {
                Error::SingularFundamental(format!(
                    "node {i} (t = {}) is not invertible; refine the grid",
                    node(i)
                ))
            })?;
            let inv = lu.inverse();
            let cond = y.one_norm() * inv.one_norm();
            if !cond.is_finite() || cond > CONDITION_CAP {
                return Err(Error::SingularFundamental(format!(
                    "node {i} (t = {}) has condition estimate {cond:.3e}",
                    node(i)
                )));
            }
            inverses.push(inv);
        }

        Ok(FundamentalMatrix {
            a: iv.a,
            b: iv.b,
            h,
            values,
            derivs,
            inverses,
        })
    }

    pub fn dimension(&self) -> usize {
        self.values[0].rows()
    }

    /// Number of grid intervals.
    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.grid_size() {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.grid_size()).map(|i| self.node(i)).collect()
    }

    pub fn value(&self, i: usize) -> &CMatrix {
        &self.values[i]
    }

    pub fn inverse(&self, i: usize) -> &CMatrix {
        &self.inverses[i]
    }

    pub fn node_derivative(&self, i: usize) -> &CMatrix {
        &self.derivs[i]
    }

    /// Dense evaluation: exact at nodes, cubic Hermite between them.
    pub fn evaluate(&self, t: f64) -> Result<CMatrix> {
        let (seg, theta, hit) = locate(self.a, self.b, self.h, self.grid_size(), t)?;
        if let Some(i) = hit {
            return Ok(self.values[i].clone());
        }
        Ok(hermite_matrix(
            &self.values[seg],
            &self.derivs[seg],
            &self.values[seg + 1],
            &self.derivs[seg + 1],
            theta,
            self.h,
        ))
    }

    /// The `j`-th column as a boundary operand supporting derivatives up to
    /// `max_order`.
    pub fn column_curve<'a>(
        &self,
        problem: &'a ProblemSpec,
        j: usize,
        max_order: usize,
    ) -> Result<OdeCurve<'a>> {
        let samples: Vec<Vec<C64>> = self.values.iter().map(|m| m.column(j)).collect();
        let derivs: Vec<Vec<C64>> = self.derivs.iter().map(|m| m.column(j)).collect();
        OdeCurve::new(problem, samples, derivs, false, max_order)
    }

    /// `k`-th derivative of column `j` at `t` via the derivative recursion.
    pub fn column_derivative(
        &self,
        problem: &ProblemSpec,
        j: usize,
        order: usize,
        t: f64,
    ) -> Result<Vec<C64>> {
        let curve = self.column_curve(problem, j, order)?;
        curve.derivative(order, t)
    }

    /// Variation-of-constants particular solution sampled on the grid:
    /// `y_p(t) = Y(t) * integral_a^t Y(tau)^-1 f(tau) dtau`, with
    /// `y_p(a) = 0`.
    pub fn particular_samples(&self, problem: &ProblemSpec) -> Result<Vec<Vec<C64>>> {
        let iv = &problem.interval;
        let mut integrand = Vec::with_capacity(self.values.len());
        for i in 0..self.values.len() {
            let f = problem.rhs.evaluate(iv, self.node(i))?;
            integrand.push(self.inverses[i].matvec(&f));
        }
        let prefix = cumulative_integral(&integrand, self.h);
        Ok(self
            .values
            .iter()
            .zip(prefix)
            .map(|(y, q)| y.matvec(&q))
            .collect())
    }

    /// Particular solution as a trajectory operand (inhomogeneous
    /// derivative recursion).
    pub fn particular_curve<'a>(
        &self,
        problem: &'a ProblemSpec,
        max_order: usize,
    ) -> Result<OdeCurve<'a>> {
        let samples = self.particular_samples(problem)?;
        let derivs = trajectory_derivatives(problem, &self.nodes(), &samples, true)?;
        OdeCurve::new(problem, samples, derivs, true, max_order)
    }
}

/// Particular solution as a sampled [`VectorFunction`] on the grid of `y`.
pub fn particular_solution(y: &FundamentalMatrix, problem: &ProblemSpec) -> Result<VectorFunction> {
    let samples = y.particular_samples(problem)?;
    Ok(VectorFunction::sampled(
        y.nodes(),
        samples,
        crate::problem::Interpolation::Cubic,
    ))
}

/// Node derivatives `y' = -A y (+ f)` for a sampled trajectory.
pub fn trajectory_derivatives(
    problem: &ProblemSpec,
    nodes: &[f64],
    samples: &[Vec<C64>],
    with_rhs: bool,
) -> Result<Vec<Vec<C64>>> {
    let iv = &problem.interval;
    let mut out = Vec::with_capacity(samples.len());
    for (t, y) in nodes.iter().zip(samples) {
        let mut d = problem.coefficient.evaluate(iv, *t)?.neg().matvec(y);
        if with_rhs {
            let f = problem.rhs.evaluate(iv, *t)?;
            for (slot, value) in d.iter_mut().zip(f) {
                *slot += value;
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Maximum central-difference residual `max ||y' + A y - f||_inf` over
/// interior nodes of a sampled trajectory.
pub fn ode_residual(
    problem: &ProblemSpec,
    nodes: &[f64],
    samples: &[Vec<C64>],
    with_rhs: bool,
) -> Result<f64> {
    let iv = &problem.interval;
    let mut worst = 0.0f64;
    for i in 1..samples.len().saturating_sub(1) {
        let h2 = nodes[i + 1] - nodes[i - 1];
        let ay = problem
            .coefficient
            .evaluate(iv, nodes[i])?
            .matvec(&samples[i]);
        let f = if with_rhs {
            problem.rhs.evaluate(iv, nodes[i])?
        } else {
            vec![C64::ZERO; samples[i].len()]
        };
        for d in 0..samples[i].len() {
            let slope = (samples[i + 1][d] - samples[i - 1][d]) / h2;
            let res = (slope + ay[d] - f[d]).norm();
            if res > worst {
                worst = res;
            }
        }
    }
    Ok(worst)
}

/// A trajectory of the system as a boundary operand: Hermite dense output
/// over stored samples, classical derivatives via the operator recursion.
pub struct OdeCurve<'a> {
    problem: &'a ProblemSpec,
    h: f64,
    samples: Vec<Vec<C64>>,
    derivs: Vec<Vec<C64>>,
    with_rhs: bool,
    tables: DerivativeTables,
}

impl<'a> OdeCurve<'a> {
    /// Wraps samples plus their node derivatives; `max_order` fixes how far
    /// the derivative recursion is prepared.
    pub fn new(
        problem: &'a ProblemSpec,
        samples: Vec<Vec<C64>>,
        derivs: Vec<Vec<C64>>,
        with_rhs: bool,
        max_order: usize,
    ) -> Result<Self> {
        assert!(samples.len() >= 2 && samples.len() == derivs.len());
        let tables = DerivativeTables::build(problem, with_rhs, max_order)?;
        let h = problem.interval.length() / (samples.len() - 1) as f64;
        Ok(OdeCurve {
            problem,
            h,
            samples,
            derivs,
            with_rhs,
            tables,
        })
    }

    /// Full solution trajectory `y = Y q + y_p` from its samples.
    pub fn from_solution_samples(
        problem: &'a ProblemSpec,
        nodes: &[f64],
        samples: Vec<Vec<C64>>,
        max_order: usize,
    ) -> Result<Self> {
        let derivs = trajectory_derivatives(problem, nodes, &samples, true)?;
        OdeCurve::new(problem, samples, derivs, true, max_order)
    }

    pub fn samples(&self) -> &[Vec<C64>] {
        &self.samples
    }
}

impl BoundaryFunction for OdeCurve<'_> {
    fn dim(&self) -> usize {
        self.samples[0].len()
    }

    fn eval(&self, t: f64) -> Result<Vec<C64>> {
        let iv = &self.problem.interval;
        let (seg, theta, hit) = locate(iv.a, iv.b, self.h, self.samples.len() - 1, t)?;
        if let Some(i) = hit {
            return Ok(self.samples[i].clone());
        }
        Ok(hermite_vector(
            &self.samples[seg],
            &self.derivs[seg],
            &self.samples[seg + 1],
            &self.derivs[seg + 1],
            theta,
            self.h,
        ))
    }

    fn derivative(&self, order: usize, t: f64) -> Result<Vec<C64>> {
        if order == 0 {
            return self.eval(t);
        }
        let y = self.eval(t)?;
        self.tables.apply(self.problem, order, t, &y, self.with_rhs)
    }
}

// ---------------------------------------------------------------------------
// Derivative recursion

/// Matrix polynomial in `dt = t - a` with matrix coefficients, lowest power
/// first.
#[derive(Clone)]
struct MatrixPoly {
    coeffs: Vec<CMatrix>,
}

impl MatrixPoly {
    fn from_function(f: &MatrixFunction) -> Option<Self> {
        match f {
            MatrixFunction::Constant(m) => Some(MatrixPoly {
                coeffs: vec![m.clone()],
            }),
            MatrixFunction::Polynomial(coeffs) => Some(MatrixPoly {
                coeffs: coeffs.clone(),
            }),
            MatrixFunction::Sampled(_) => None,
        }
    }

    fn shape(&self) -> (usize, usize) {
        (self.coeffs[0].rows(), self.coeffs[0].cols())
    }

    fn eval(&self, dt: f64) -> CMatrix {
        let mut value = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            value = value.scale_re(dt).add(c);
        }
        value
    }

    fn derivative(&self) -> MatrixPoly {
        if self.coeffs.len() <= 1 {
            let (r, c) = self.shape();
            return MatrixPoly {
                coeffs: vec![CMatrix::zeros(r, c)],
            };
        }
        MatrixPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, m)| m.scale_re(k as f64))
                .collect(),
        }
    }

    /// Order-preserving product (matrix coefficients do not commute).
    fn mul(&self, rhs: &MatrixPoly) -> MatrixPoly {
        let (r, _) = self.shape();
        let (_, c) = rhs.shape();
        let deg = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut coeffs = vec![CMatrix::zeros(r, c); deg];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.matmul(b));
            }
        }
        MatrixPoly { coeffs }
    }

    fn add(&self, rhs: &MatrixPoly) -> MatrixPoly {
        let (longer, shorter) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = longer.coeffs.clone();
        for (slot, c) in coeffs.iter_mut().zip(&shorter.coeffs) {
            *slot = slot.add(c);
        }
        MatrixPoly { coeffs }
    }
}

/// Prepared `P_k`, `R_k` operators for `y^(k) = P_k y + R_k`.
enum DerivativeTables {
    /// Exact polynomial tables; `p[k-1]` is `P_k`, `r[k-1]` is `R_k`
    /// (columns).
    Exact {
        p: Vec<MatrixPoly>,
        r: Vec<MatrixPoly>,
    },
    /// Sampled data: first derivatives of the coefficient and right-hand
    /// side, good for orders up to two.
    FiniteDifference {
        a_prime: MatrixFunction,
        f_prime: VectorFunction,
        max_order: usize,
    },
}

impl DerivativeTables {
    fn build(problem: &ProblemSpec, with_rhs: bool, max_order: usize) -> Result<Self> {
        let a_poly = MatrixPoly::from_function(&problem.coefficient);
        let f_poly = if with_rhs {
            MatrixPoly::from_function(problem.rhs.inner())
        } else {
            let m = problem.dimension;
            Some(MatrixPoly {
                coeffs: vec![CMatrix::zeros(m, 1)],
            })
        };
        match (a_poly, f_poly) {
            (Some(a), Some(f)) => {
                // P_1 = -A, R_1 = f; P_{k+1} = P_k' - P_k A, R_{k+1} = P_k f + R_k'
                let neg_a = MatrixPoly {
                    coeffs: a.coeffs.iter().map(CMatrix::neg).collect(),
                };
                let mut p = Vec::with_capacity(max_order);
                let mut r = Vec::with_capacity(max_order);
                if max_order >= 1 {
                    p.push(neg_a.clone());
                    r.push(f.clone());
                    for k in 1..max_order {
                        let pk = p[k - 1].clone();
                        p.push(pk.derivative().add(&pk.mul(&neg_a)));
                        r.push(pk.mul(&f).add(&r[k - 1].derivative()));
                    }
                }
                Ok(DerivativeTables::Exact { p, r })
            }
            _ => {
                // higher finite differences of sampled data are noise
                if max_order > 2 {
                    return Err(Error::UnsupportedOrder {
                        order: max_order,
                        reason: String::from(
                            "sampled coefficient data supports derivatives up to order 2",
                        ),
                    });
                }
                Ok(DerivativeTables::FiniteDifference {
                    a_prime: problem.coefficient.derivative(),
                    f_prime: problem.rhs.derivative(),
                    max_order,
                })
            }
        }
    }

    fn apply(
        &self,
        problem: &ProblemSpec,
        order: usize,
        t: f64,
        y: &[C64],
        with_rhs: bool,
    ) -> Result<Vec<C64>> {
        let iv = &problem.interval;
        match self {
            DerivativeTables::Exact { p, r } => {
                if order > p.len() {
                    return Err(Error::UnsupportedOrder {
                        order,
                        reason: format!(
                            "trajectory prepared for derivatives up to order {}",
                            p.len()
                        ),
                    });
                }
                let dt = iv.clamp(t)? - iv.a;
                let mut out = p[order - 1].eval(dt).matvec(y);
                if with_rhs {
                    let extra = r[order - 1].eval(dt).column(0);
                    for (slot, v) in out.iter_mut().zip(extra) {
                        *slot += v;
                    }
                }
                Ok(out)
            }
            DerivativeTables::FiniteDifference {
                a_prime,
                f_prime,
                max_order,
            } => {
                if order > *max_order {
                    return Err(Error::UnsupportedOrder {
                        order,
                        reason: String::from(
                            "sampled coefficient data supports derivatives up to order 2",
                        ),
                    });
                }
                let a_t = problem.coefficient.evaluate(iv, t)?;
                match order {
                    1 => {
                        let mut out = a_t.neg().matvec(y);
                        if with_rhs {
                            let f = problem.rhs.evaluate(iv, t)?;
                            for (slot, v) in out.iter_mut().zip(f) {
                                *slot += v;
                            }
                        }
                        Ok(out)
                    }
                    2 => {
                        // y'' = (A^2 - A') y + (f' - A f)
                        let p2 = a_t.matmul(&a_t).sub(&a_prime.evaluate(iv, t)?);
                        let mut out = p2.matvec(y);
                        if with_rhs {
                            let f = problem.rhs.evaluate(iv, t)?;
                            let fp = f_prime.evaluate(iv, t)?;
                            let af = a_t.matvec(&f);
                            for (d, slot) in out.iter_mut().enumerate() {
                                *slot += fp[d] - af[d];
                            }
                        }
                        Ok(out)
                    }
                    _ => unreachable!("order 0 handled by eval, higher orders rejected"),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Dense output helpers

/// Locates `t` on the uniform grid; returns the segment, the normalized
/// offset, and the node index on an exact hit.
fn locate(a: f64, b: f64, h: f64, n: usize, t: f64) -> Result<(usize, f64, Option<usize>)> {
    let slack = 1e-12 * (b - a).max(1.0);
    if !t.is_finite() || t < a - slack || t > b + slack {
        return Err(Error::OutOfDomain { t, a, b });
    }
    let t = t.max(a).min(b);
    let pos = (t - a) / h;
    let nearest = libm::round(pos) as usize;
    if nearest <= n && libm::fabs(pos - nearest as f64) < 1e-9 {
        return Ok((nearest.min(n - 1), 0.0, Some(nearest)));
    }
    let seg = (pos as usize).min(n - 1);
    let theta = pos - seg as f64;
    Ok((seg, theta, None))
}

fn hermite_weights(theta: f64) -> (f64, f64, f64, f64) {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + theta,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

fn hermite_matrix(
    y0: &CMatrix,
    d0: &CMatrix,
    y1: &CMatrix,
    d1: &CMatrix,
    theta: f64,
    h: f64,
) -> CMatrix {
    let (w00, w10, w01, w11) = hermite_weights(theta);
    y0.scale_re(w00)
        .add(&d0.scale_re(w10 * h))
        .add(&y1.scale_re(w01))
        .add(&d1.scale_re(w11 * h))
}

fn hermite_vector(y0: &[C64], d0: &[C64], y1: &[C64], d1: &[C64], theta: f64, h: f64) -> Vec<C64> {
    let (w00, w10, w01, w11) = hermite_weights(theta);
    (0..y0.len())
        .map(|i| y0[i] * w00 + d0[i] * (w10 * h) + y1[i] * w01 + d1[i] * (w11 * h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryOperator;
    use crate::problem::{Interval, SpaceParams};

    fn problem_with(m: usize, coefficient: MatrixFunction, rhs: VectorFunction) -> ProblemSpec {
        ProblemSpec {
            dimension: m,
            interval: Interval::new(0.0, 1.0).unwrap(),
            space: SpaceParams { s: 1.5, p: 2.0 },
            coefficient,
            rhs,
            boundary: BoundaryOperator::point_evaluation(m, 0.0),
            boundary_rhs: alloc::vec![C64::ZERO; m],
        }
    }

    #[test]
    fn zero_coefficient_gives_identity_everywhere() {
        let p = problem_with(
            2,
            MatrixFunction::constant_zero(2, 2),
            VectorFunction::zero(2),
        );
        let y = FundamentalMatrix::compute(&p, 32).unwrap();
        for i in 0..=y.grid_size() {
            assert_eq!(y.value(i), &CMatrix::identity(2));
        }
        assert_eq!(y.evaluate(0.37).unwrap(), CMatrix::identity(2));
    }

    #[test]
    fn scalar_constant_decay_matches_exponential() {
        // frozen: Y(1) = e^-1 for A = 1 on [0, 1]
        let p = problem_with(
            1,
            MatrixFunction::Constant(CMatrix::identity(1)),
            VectorFunction::zero(1),
        );
        let y = FundamentalMatrix::compute(&p, 64).unwrap();
        let end = y.value(y.grid_size())[(0, 0)];
        assert!((end.re - 0.36787944117144233).abs() < 1e-8);
        assert!(end.im.abs() < 1e-15);
    }

    #[test]
    fn variable_coefficient_matches_separable_closed_form() {
        // A(t) = t on [0, 1]: frozen oracle value e^{-1/2}, confirmed by an
        // independent high-resolution integrator.
        let p = problem_with(
            1,
            MatrixFunction::Polynomial(alloc::vec![CMatrix::zeros(1, 1), CMatrix::identity(1)]),
            VectorFunction::zero(1),
        );
        let y = FundamentalMatrix::compute(&p, 1024).unwrap();
        let end = y.value(y.grid_size())[(0, 0)];
        assert!((end.re - 0.6065306597126334).abs() < 1e-6);
    }

    #[test]
    fn fourth_order_convergence_on_smooth_coefficient() {
        let p = problem_with(
            1,
            MatrixFunction::Polynomial(alloc::vec![CMatrix::zeros(1, 1), CMatrix::identity(1)]),
            VectorFunction::zero(1),
        );
        let err = |n: usize| {
            let y = FundamentalMatrix::compute(&p, n).unwrap();
            (y.value(y.grid_size())[(0, 0)].re - 0.6065306597126334).abs()
        };
        let e16 = err(16);
        let e32 = err(32);
        let e64 = err(64);
        assert!(e16 / e32 >= 8.0, "ratio {}", e16 / e32);
        assert!(e32 / e64 >= 8.0, "ratio {}", e32 / e64);
    }

    #[test]
    fn halving_the_step_shrinks_the_max_node_deviation_by_eight() {
        // max deviation over shared nodes against the doubled-resolution run
        let p = problem_with(
            2,
            MatrixFunction::Polynomial(alloc::vec![
                CMatrix::from_fn(2, 2, |i, j| C64::new(0.4 * (i + 1) as f64, -0.3 * j as f64)),
                CMatrix::identity(2).scale_re(0.5),
            ]),
            VectorFunction::zero(2),
        );
        let deviation = |n: usize| {
            let coarse = FundamentalMatrix::compute(&p, n).unwrap();
            let fine = FundamentalMatrix::compute(&p, 2 * n).unwrap();
            (0..=n)
                .map(|i| coarse.value(i).sub(fine.value(2 * i)).max_abs())
                .fold(0.0f64, f64::max)
        };
        let d16 = deviation(16);
        let d32 = deviation(32);
        assert!(d16 / d32 >= 8.0, "ratio {}", d16 / d32);
    }

    #[test]
    fn dense_output_matches_exponential_between_nodes() {
        let p = problem_with(
            1,
            MatrixFunction::Constant(CMatrix::identity(1)),
            VectorFunction::zero(1),
        );
        let y = FundamentalMatrix::compute(&p, 64).unwrap();
        // midpoint between nodes
        let t = y.node(10) + 0.5 * y.step();
        let got = y.evaluate(t).unwrap()[(0, 0)];
        assert!((got.re - libm::exp(-t)).abs() < 1e-7);
    }

    #[test]
    fn node_evaluation_returns_stored_values() {
        let p = problem_with(
            1,
            MatrixFunction::Constant(CMatrix::identity(1).scale_re(0.5)),
            VectorFunction::zero(1),
        );
        let y = FundamentalMatrix::compute(&p, 32).unwrap();
        assert_eq!(y.evaluate(0.0).unwrap(), CMatrix::identity(1));
        let i = 7;
        assert_eq!(&y.evaluate(y.node(i)).unwrap(), y.value(i));
    }

    #[test]
    fn column_derivatives_follow_coefficient_powers() {
        // constant A: k-th derivative of Y at a is (-A)^k
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64 * 0.25, 0.1));
        let p = problem_with(
            2,
            MatrixFunction::Constant(a.clone()),
            VectorFunction::zero(2),
        );
        let y = FundamentalMatrix::compute(&p, 32).unwrap();
        for k in 1..=3usize {
            let expect = a.neg().pow(k);
            for j in 0..2 {
                let got = y.column_derivative(&p, j, k, 0.0).unwrap();
                for i in 0..2 {
                    assert!(
                        (got[i] - expect[(i, j)]).norm() < 1e-12,
                        "k = {k}, column {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_coefficient_derivatives_vanish() {
        let p = problem_with(
            2,
            MatrixFunction::constant_zero(2, 2),
            VectorFunction::zero(2),
        );
        let y = FundamentalMatrix::compute(&p, 32).unwrap();
        for k in 1..=4usize {
            let got = y.column_derivative(&p, 0, k, 0.5).unwrap();
            assert!(got.iter().all(|v| *v == C64::ZERO), "k = {k}");
        }
    }

    #[test]
    fn particular_solution_of_pure_integration_is_a_ramp() {
        // A = 0, f = 1: y_p(t) = t
        let p = problem_with(
            1,
            MatrixFunction::constant_zero(1, 1),
            VectorFunction::constant(alloc::vec![C64::ONE]),
        );
        let y = FundamentalMatrix::compute(&p, 64).unwrap();
        let samples = y.particular_samples(&p).unwrap();
        for (i, s) in samples.iter().enumerate() {
            assert!((s[0] - C64::new(y.node(i), 0.0)).norm() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn particular_solution_matches_relaxation_closed_form() {
        // A = 1, f = 1 on [0,1]: frozen oracle value 1 - e^-1 at t = 1
        let p = problem_with(
            1,
            MatrixFunction::Constant(CMatrix::identity(1)),
            VectorFunction::constant(alloc::vec![C64::ONE]),
        );
        let y = FundamentalMatrix::compute(&p, 1024).unwrap();
        let samples = y.particular_samples(&p).unwrap();
        let end = samples.last().unwrap()[0];
        assert!((end.re - 0.6321205588285577).abs() < 1e-6);
        // y_p(a) = 0 exactly
        assert_eq!(samples[0][0], C64::ZERO);
    }

    #[test]
    fn particular_solution_round_trips_as_a_sampled_function() {
        let p = problem_with(
            1,
            MatrixFunction::constant_zero(1, 1),
            VectorFunction::constant(alloc::vec![C64::ONE]),
        );
        let y = FundamentalMatrix::compute(&p, 64).unwrap();
        let yp = particular_solution(&y, &p).unwrap();
        // y_p(t) = t, evaluable anywhere through the sampled representation
        for &t in &[0.0, 0.31, 0.5, 0.97, 1.0] {
            let v = yp.evaluate(&p.interval, t).unwrap();
            assert!((v[0] - C64::new(t, 0.0)).norm() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn zero_rhs_gives_zero_particular_solution() {
        let p = problem_with(
            2,
            MatrixFunction::Constant(CMatrix::identity(2).scale_re(0.3)),
            VectorFunction::zero(2),
        );
        let y = FundamentalMatrix::compute(&p, 32).unwrap();
        for s in y.particular_samples(&p).unwrap() {
            assert!(s.iter().all(|v| *v == C64::ZERO));
        }
    }

    #[test]
    fn particular_residual_is_small_on_smooth_data() {
        let p = problem_with(
            1,
            MatrixFunction::Polynomial(alloc::vec![
                CMatrix::identity(1).scale_re(0.5),
                CMatrix::identity(1),
            ]),
            VectorFunction::polynomial(alloc::vec![
                alloc::vec![C64::ONE],
                alloc::vec![C64::new(-0.5, 0.2)],
            ]),
        );
        let y = FundamentalMatrix::compute(&p, 1024).unwrap();
        let samples = y.particular_samples(&p).unwrap();
        let res = ode_residual(&p, &y.nodes(), &samples, true).unwrap();
        assert!(res < 1e-4 * 2.0, "residual {res}");
    }

    #[test]
    fn semigroup_property_for_constant_coefficients() {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(0.4 * (i as f64 - j as f64), 0.2));
        let p = problem_with(
            2,
            MatrixFunction::Constant(a.clone()),
            VectorFunction::zero(2),
        );
        let y = FundamentalMatrix::compute(&p, 64).unwrap();
        let t1 = 0.375;
        let t2 = 0.875;
        // restart the system at t1 and integrate to t2
        let shifted = ProblemSpec {
            interval: Interval::new(t1, t2).unwrap(),
            ..p.clone()
        };
        let y_shift = FundamentalMatrix::compute(&shifted, 64).unwrap();
        let lhs = y.evaluate(t2).unwrap();
        let rhs = y_shift
            .evaluate(t2)
            .unwrap()
            .matmul(&y.evaluate(t1).unwrap());
        assert!(lhs.sub(&rhs).max_abs() < 1e-6);
    }

    #[test]
    fn determinant_stays_bounded_away_from_zero() {
        let p = problem_with(
            2,
            MatrixFunction::Polynomial(alloc::vec![
                CMatrix::from_fn(2, 2, |i, j| C64::new(0.5 * (i + j) as f64, -0.2)),
                CMatrix::identity(2).scale_re(0.3),
            ]),
            VectorFunction::zero(2),
        );
        let y = FundamentalMatrix::compute(&p, 128).unwrap();
        for i in 0..=y.grid_size() {
            let det = y.value(i).determinant();
            assert!(det.norm() > 1e-30, "node {i}");
        }
    }

    #[test]
    fn inverses_multiply_back_to_identity() {
        let p = problem_with(
            3,
            MatrixFunction::Constant(CMatrix::from_fn(3, 3, |i, j| {
                C64::new(0.3 * (1 + i + j) as f64, 0.15 * (i as f64 - j as f64))
            })),
            VectorFunction::zero(3),
        );
        let y = FundamentalMatrix::compute(&p, 32).unwrap();
        for i in 0..=y.grid_size() {
            let prod = y.value(i).matmul(y.inverse(i));
            let cond = y.value(i).one_norm() * y.inverse(i).one_norm();
            let err = prod.sub(&CMatrix::identity(3)).max_abs();
            assert!(err <= 1e-10 * cond, "node {i}: {err} vs cond {cond}");
        }
    }

    #[test]
    fn severe_decay_reports_singular_fundamental() {
        let p = problem_with(
            1,
            MatrixFunction::Constant(CMatrix::identity(1).scale_re(1e8)),
            VectorFunction::zero(1),
        );
        assert!(matches!(
            FundamentalMatrix::compute(&p, 64),
            Err(Error::SingularFundamental(_))
        ));
    }

    #[test]
    fn unstable_integration_reports_non_finite() {
        // RK4 on a polynomial coefficient far outside its stability region
        let p = problem_with(
            1,
            MatrixFunction::Polynomial(alloc::vec![
                CMatrix::identity(1).scale_re(1e8),
                CMatrix::identity(1).scale_re(1e8),
            ]),
            VectorFunction::zero(1),
        );
        assert!(matches!(
            FundamentalMatrix::compute(&p, 16),
            Err(Error::NonFiniteValue(_))
        ));
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let p = problem_with(
            1,
            MatrixFunction::constant_zero(1, 1),
            VectorFunction::zero(1),
        );
        assert!(matches!(
            FundamentalMatrix::compute(&p, 8),
            Err(Error::InvalidGrid(_))
        ));
    }
}
