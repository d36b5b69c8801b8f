//! Boundary operators: finite sums of point-derivative terms (integer or
//! fractional Caputo order) and integral terms.
//!
//! A boundary operator maps an `m`-vector function to `r` complex numbers.
//! Point terms contribute `weight * D^order y(point)`; integral terms
//! contribute `integral of K(t) y(t) dt` over the whole interval. Fractional
//! orders use the Caputo derivative with lower terminal at the interval's
//! left endpoint; integer orders route to classical derivatives.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::problem::{Interval, MatrixFunction, ProblemSpec, SpaceParams, VectorFunction};
use crate::quad::simpson_c64;

/// One `weight * D^order y(point)` contribution.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTerm {
    /// Evaluation point in `[a, b]`.
    pub point: f64,
    /// Derivative order, integer or fractional, `0 <= order < s - 1/p`.
    pub order: f64,
    /// `r x m` weight matrix.
    pub weight: CMatrix,
}

impl PointTerm {
    /// True when the order is a whole number (routed to classical
    /// derivatives).
    pub fn has_integer_order(&self) -> bool {
        self.order == libm::floor(self.order)
    }
}

/// One `integral K(t) y(t) dt` contribution with an `r x m` kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralTerm {
    pub kernel: MatrixFunction,
}

/// Linear boundary operator `B` with `r` scalar rows.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct BoundaryOperator {
    pub rows: usize,
    pub point_terms: Vec<PointTerm>,
    pub integral_terms: Vec<IntegralTerm>,
}

/// Anything the boundary operator can act on: point evaluation plus
/// classical derivatives up to the orders the operator demands.
pub trait BoundaryFunction {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64) -> Result<Vec<C64>>;

    /// `order`-th classical derivative at `t`; `order = 0` is evaluation.
    fn derivative(&self, order: usize, t: f64) -> Result<Vec<C64>>;
}

impl BoundaryOperator {
    /// Single condition `y(point) = c` with an identity weight.
    pub fn point_evaluation(dim: usize, point: f64) -> Self {
        BoundaryOperator {
            rows: dim,
            point_terms: vec![PointTerm {
                point,
                order: 0.0,
                weight: CMatrix::identity(dim),
            }],
            integral_terms: Vec::new(),
        }
    }

    /// Highest classical derivative order any term needs (the ceiling of
    /// fractional orders).
    pub fn max_integer_order(&self) -> usize {
        self.point_terms
            .iter()
            .map(|t| libm::ceil(t.order) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn has_fractional_terms(&self) -> bool {
        self.point_terms.iter().any(|t| !t.has_integer_order())
    }

    pub fn validate(&self, interval: &Interval, space: &SpaceParams, dim: usize) -> Result<()> {
        let bound = space.order_bound();
        for (i, term) in self.point_terms.iter().enumerate() {
            let field = format!("boundary.point_terms[{i}]");
            if term.weight.rows() != self.rows || term.weight.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "{field}: weight is {}x{}, expected {}x{dim}",
                    term.weight.rows(),
                    term.weight.cols(),
                    self.rows
                )));
            }
            if !term.weight.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "{field}: non-finite weight entry"
                )));
            }
            interval.clamp(term.point)?;
            if !term.order.is_finite() || term.order < 0.0 || term.order >= bound {
                return Err(Error::InvalidOrder {
                    order: term.order,
                    bound,
                });
            }
        }
        for (i, term) in self.integral_terms.iter().enumerate() {
            let field = format!("boundary.integral_terms[{i}]");
            term.kernel.validate(interval, self.rows, dim, &field)?;
        }
        Ok(())
    }

    /// Applies the operator to `y`: point terms through classical or Caputo
    /// derivatives, integral terms through composite Simpson on a
    /// `grid_size`-interval grid.
    pub fn apply(
        &self,
        y: &dyn BoundaryFunction,
        problem: &ProblemSpec,
        grid_size: usize,
    ) -> Result<Vec<C64>> {
        let interval = &problem.interval;
        if y.dim() != problem.dimension {
            return Err(Error::DimensionMismatch(format!(
                "boundary operand has dimension {}, problem has {}",
                y.dim(),
                problem.dimension
            )));
        }
        let mut acc = vec![C64::ZERO; self.rows];
        for term in &self.point_terms {
            let t0 = interval.clamp(term.point)?;
            let value = if term.has_integer_order() {
                let k = term.order as usize;
                if k == 0 {
                    y.eval(t0)?
                } else {
                    y.derivative(k, t0)?
                }
            } else {
                // share the solver grid density over [a, t0]
                let frac = (t0 - interval.a) / interval.length();
                let steps = ((grid_size as f64 * frac) as usize).max(4);
                caputo_derivative(y, term.order, t0, interval.a, steps)?
            };
            for (row, slot) in acc.iter_mut().enumerate() {
                for (j, v) in value.iter().enumerate() {
                    *slot += term.weight[(row, j)] * v;
                }
            }
        }
        if !self.integral_terms.is_empty() {
            let n = grid_size.max(2);
            let h = interval.length() / n as f64;
            for term in &self.integral_terms {
                let mut rows: Vec<Vec<C64>> = vec![Vec::with_capacity(n + 1); self.rows];
                for i in 0..=n {
                    let t = if i == n {
                        interval.b
                    } else {
                        interval.a + i as f64 * h
                    };
                    let k = term.kernel.evaluate(interval, t)?;
                    let yv = y.eval(t)?;
                    let w = k.matvec(&yv);
                    for (row, value) in w.into_iter().enumerate() {
                        rows[row].push(value);
                    }
                }
                for (row, samples) in rows.iter().enumerate() {
                    acc[row] += simpson_c64(samples, h);
                }
            }
        }
        Ok(acc)
    }
}

/// Caputo fractional derivative of order `beta` at `t`, lower terminal `a`:
/// `(1/Gamma(n - beta)) * integral_a^t (t - tau)^(n - beta - 1) y^(n)(tau) dtau`
/// with `n = ceil(beta)`.
///
/// Product integration on a uniform `grid_size`-interval mesh over `[a, t]`:
/// the singular weight is integrated exactly against the piecewise-linear
/// interpolant of `y^(n)`, so a vanishing `y^(n)` yields a literal zero.
/// At `t = a` the integral is empty and the result is exactly zero.
pub fn caputo_derivative(
    y: &dyn BoundaryFunction,
    beta: f64,
    t: f64,
    a: f64,
    grid_size: usize,
) -> Result<Vec<C64>> {
    if !beta.is_finite() || beta <= 0.0 || beta == libm::floor(beta) {
        return Err(Error::IntegerOrder { order: beta });
    }
    if !t.is_finite() || t < a {
        return Err(Error::OutOfDomain {
            t,
            a,
            b: f64::INFINITY,
        });
    }
    let dim = y.dim();
    if t == a {
        return Ok(vec![C64::ZERO; dim]);
    }
    let n = libm::ceil(beta) as usize;
    let mu = n as f64 - beta; // in (0, 1)
    let steps = grid_size.max(2);
    let h = (t - a) / steps as f64;

    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let tau = if i == steps { t } else { a + i as f64 * h };
        samples.push(y.derivative(n, tau)?);
    }

    let mut acc = vec![C64::ZERO; dim];
    for i in 0..steps {
        // distances to t, computed from the far end to avoid cancellation
        let s0 = (steps - i) as f64 * h;
        let s1 = (steps - i - 1) as f64 * h;
        let pow0 = libm::pow(s0, mu);
        let pow1 = libm::pow(s1, mu);
        let c0 = (pow0 - pow1) / mu;
        let c1 = s0 * c0 - (s0 * pow0 - s1 * pow1) / (mu + 1.0);
        let w_left = c0 - c1 / h;
        let w_right = c1 / h;
        for d in 0..dim {
            acc[d] += samples[i][d] * w_left + samples[i + 1][d] * w_right;
        }
    }
    let gamma = libm::tgamma(mu);
    Ok(acc.into_iter().map(|v| v / gamma).collect())
}

/// A [`VectorFunction`] viewed as a boundary operand on its interval.
///
/// Derivatives are exact for constant and polynomial kinds; sampled data
/// supports finite-difference derivatives up to order two.
pub struct FunctionOnInterval {
    interval: Interval,
    // k-th derivative representations, precomputed through order two
    stages: Vec<VectorFunction>,
    sampled: bool,
}

impl FunctionOnInterval {
    pub fn new(f: &VectorFunction, interval: Interval) -> Self {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        let sampled = matches!(f.inner(), MatrixFunction::Sampled(_));
        FunctionOnInterval {
            interval,
            stages: vec![f.clone(), d1, d2],
            sampled,
        }
    }
}

impl BoundaryFunction for FunctionOnInterval {
    fn dim(&self) -> usize {
        self.stages[0].dim()
    }

    fn eval(&self, t: f64) -> Result<Vec<C64>> {
        self.stages[0].evaluate(&self.interval, t)
    }

    fn derivative(&self, order: usize, t: f64) -> Result<Vec<C64>> {
        if order < self.stages.len() {
            return self.stages[order].evaluate(&self.interval, t);
        }
        if self.sampled {
            return Err(Error::UnsupportedOrder {
                order,
                reason: String::from(
                    "sampled data supports finite-difference derivatives up to order 2",
                ),
            });
        }
        let mut g = self.stages.last().unwrap().clone();
        for _ in self.stages.len()..=order {
            g = g.derivative();
        }
        g.evaluate(&self.interval, t)
    }
}
