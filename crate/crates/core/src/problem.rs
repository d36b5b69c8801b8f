//! Problem data model and the external problem-file format.
//!
//! A problem couples `y' + A(t) y = f(t)` on `[a, b]` with `r` scalar
//! boundary conditions `B y = c`. Coefficients and right-hand sides come in
//! three representable kinds: constant, polynomial in `(t - a)`, and sampled
//! on a grid with declared interpolation order. Files are JSON documents;
//! complex scalars encode as `[re, im]` pairs and matrices row-major as
//! nested lists.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryOperator, IntegralTerm, PointTerm};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Finite interval `(a, b)` the problem lives on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let iv = Interval { a, b };
        iv.validate()?;
        Ok(iv)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() || self.a >= self.b {
            return Err(Error::EmptyInterval {
                a: self.a,
                b: self.b,
            });
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Checks `t` against the interval, forgiving roundoff-level excursions,
    /// and returns it clamped to `[a, b]`.
    pub fn clamp(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.length().max(1.0);
        if !t.is_finite() || t < self.a - slack || t > self.b + slack {
            return Err(Error::OutOfDomain {
                t,
                a: self.a,
                b: self.b,
            });
        }
        Ok(t.max(self.a).min(self.b))
    }
}

/// Fractional smoothness order `s` and integrability exponent `p` of the
/// solution space.
///
/// Carried for validation and diagnostics only: the solvability outputs do
/// not depend on them beyond the boundary-order bound `beta < s - 1/p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceParams {
    pub s: f64,
    pub p: f64,
}

impl SpaceParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        let sp = SpaceParams { s, p };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() || self.s <= 1.0 {
            return Err(Error::InvalidSpace(format!(
                "s = {} must be a non-integer greater than 1",
                self.s
            )));
        }
        if self.s == libm::floor(self.s) {
            return Err(Error::InvalidSpace(format!(
                "s = {} must not be an integer",
                self.s
            )));
        }
        if !self.p.is_finite() || self.p < 1.0 {
            return Err(Error::InvalidSpace(format!(
                "p = {} must be finite and at least 1",
                self.p
            )));
        }
        Ok(())
    }

    /// Integer part of `s`: the highest whole derivative order in the space.
    pub fn integer_order(&self) -> usize {
        libm::floor(self.s) as usize
    }

    /// Supremum of admissible boundary derivative orders, `s - 1/p`.
    pub fn order_bound(&self) -> f64 {
        self.s - 1.0 / self.p
    }
}

/// Interpolation order for sampled data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Linear,
    #[default]
    Cubic,
}

/// Matrix-valued function of `t` in one of the three representable kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixFunction {
    Constant(CMatrix),
    /// Coefficients of powers of `(t - a)`, lowest first.
    Polynomial(Vec<CMatrix>),
    Sampled(SampledMatrix),
}

/// Grid-sampled matrix values with an interpolation order.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMatrix {
    pub nodes: Vec<f64>,
    pub values: Vec<CMatrix>,
    pub interpolation: Interpolation,
}

impl MatrixFunction {
    pub fn constant_zero(rows: usize, cols: usize) -> Self {
        MatrixFunction::Constant(CMatrix::zeros(rows, cols))
    }

    /// Shape of the matrix values, `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixFunction::Constant(m) => (m.rows(), m.cols()),
            MatrixFunction::Polynomial(coeffs) => coeffs
                .first()
                .map(|m| (m.rows(), m.cols()))
                .unwrap_or((0, 0)),
            MatrixFunction::Sampled(s) => s
                .values
                .first()
                .map(|m| (m.rows(), m.cols()))
                .unwrap_or((0, 0)),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MatrixFunction::Constant(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MatrixFunction::Constant(m) => m.is_zero(),
            MatrixFunction::Polynomial(coeffs) => coeffs.iter().all(CMatrix::is_zero),
            MatrixFunction::Sampled(s) => s.values.iter().all(CMatrix::is_zero),
        }
    }

    /// Shape and grid consistency against an expected value shape.
    pub fn validate(
        &self,
        interval: &Interval,
        rows: usize,
        cols: usize,
        field: &str,
    ) -> Result<()> {
        let check_shape = |m: &CMatrix, what: &str| -> Result<()> {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "{field}: {what} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "{field}: {what} has non-finite entries"
                )));
            }
            Ok(())
        };
        match self {
            MatrixFunction::Constant(m) => check_shape(m, "constant value"),
            MatrixFunction::Polynomial(coeffs) => {
                if coeffs.is_empty() {
                    return Err(Error::DimensionMismatch(format!(
                        "{field}: polynomial needs at least one coefficient"
                    )));
                }
                for (k, m) in coeffs.iter().enumerate() {
                    check_shape(m, &format!("coefficient {k}"))?;
                }
                Ok(())
            }
            MatrixFunction::Sampled(s) => {
                if s.nodes.len() < 2 {
                    return Err(Error::InvalidGrid(format!(
                        "{field}: sampled grid needs at least two nodes"
                    )));
                }
                if s.nodes.len() != s.values.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{field}: {} nodes but {} values",
                        s.nodes.len(),
                        s.values.len()
                    )));
                }
                for w in s.nodes.windows(2) {
                    if !w[0].is_finite() || !w[1].is_finite() || w[0] >= w[1] {
                        return Err(Error::InvalidGrid(format!(
                            "{field}: sampled nodes must be finite and strictly increasing"
                        )));
                    }
                }
                let slack = 1e-12 * interval.length().max(1.0);
                if s.nodes[0] > interval.a + slack || *s.nodes.last().unwrap() < interval.b - slack
                {
                    return Err(Error::InvalidGrid(format!(
                        "{field}: sampled grid [{}, {}] does not cover [{}, {}]",
                        s.nodes[0],
                        s.nodes.last().unwrap(),
                        interval.a,
                        interval.b
                    )));
                }
                for (k, m) in s.values.iter().enumerate() {
                    check_shape(m, &format!("sample {k}"))?;
                }
                Ok(())
            }
        }
    }

    /// Evaluates the function at `t in [a, b]`.
    pub fn evaluate(&self, interval: &Interval, t: f64) -> Result<CMatrix> {
        let t = interval.clamp(t)?;
        Ok(match self {
            MatrixFunction::Constant(m) => m.clone(),
            MatrixFunction::Polynomial(coeffs) => {
                let dt = t - interval.a;
                let mut value = coeffs.last().unwrap().clone();
                for c in coeffs.iter().rev().skip(1) {
                    value = value.scale_re(dt).add(c);
                }
                value
            }
            MatrixFunction::Sampled(s) => s.interpolate(t),
        })
    }

    /// Exact derivative for constant and polynomial kinds; finite-difference
    /// samples for the sampled kind.
    pub fn derivative(&self) -> MatrixFunction {
        match self {
            MatrixFunction::Constant(m) => {
                MatrixFunction::Constant(CMatrix::zeros(m.rows(), m.cols()))
            }
            MatrixFunction::Polynomial(coeffs) => {
                if coeffs.len() <= 1 {
                    let (r, c) = self.shape();
                    MatrixFunction::Constant(CMatrix::zeros(r, c))
                } else {
                    MatrixFunction::Polynomial(
                        coeffs
                            .iter()
                            .enumerate()
                            .skip(1)
                            .map(|(k, m)| m.scale_re(k as f64))
                            .collect(),
                    )
                }
            }
            MatrixFunction::Sampled(s) => MatrixFunction::Sampled(s.finite_difference()),
        }
    }

    /// Adds `eps * delta` to the function value everywhere.
    pub fn perturbed(&self, delta: &CMatrix, eps: f64) -> MatrixFunction {
        let shift = delta.scale_re(eps);
        match self {
            MatrixFunction::Constant(m) => MatrixFunction::Constant(m.add(&shift)),
            MatrixFunction::Polynomial(coeffs) => {
                let mut out = coeffs.clone();
                out[0] = out[0].add(&shift);
                MatrixFunction::Polynomial(out)
            }
            MatrixFunction::Sampled(s) => MatrixFunction::Sampled(SampledMatrix {
                nodes: s.nodes.clone(),
                values: s.values.iter().map(|m| m.add(&shift)).collect(),
                interpolation: s.interpolation,
            }),
        }
    }
}

impl SampledMatrix {
    /// Interpolates at `t` (already clamped into the node range).
    fn interpolate(&self, t: f64) -> CMatrix {
        let n = self.nodes.len();
        let t = t.max(self.nodes[0]).min(self.nodes[n - 1]);
        let seg = self
            .nodes
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(n - 2);
        let width = match self.interpolation {
            Interpolation::Linear => 2,
            Interpolation::Cubic => 4.min(n),
        };
        let start = if width == 2 {
            seg
        } else {
            seg.saturating_sub(1).min(n - width)
        };
        lagrange_combination(
            &self.nodes[start..start + width],
            &self.values[start..start + width],
            t,
        )
    }

    /// Finite-difference first derivative on the same nodes: three-point
    /// formulas, nonuniform-aware, second order inside.
    fn finite_difference(&self) -> SampledMatrix {
        let n = self.nodes.len();
        let x = &self.nodes;
        let v = &self.values;
        let mut values = Vec::with_capacity(n);
        if n == 2 {
            let d = v[1].sub(&v[0]).scale_re(1.0 / (x[1] - x[0]));
            values.push(d.clone());
            values.push(d);
        } else {
            for i in 0..n {
                let (i0, t) = if i == 0 {
                    (0, x[0])
                } else if i == n - 1 {
                    (n - 3, x[n - 1])
                } else {
                    (i - 1, x[i])
                };
                values.push(lagrange_derivative_combination(
                    &x[i0..i0 + 3],
                    &v[i0..i0 + 3],
                    t,
                ));
            }
        }
        SampledMatrix {
            nodes: self.nodes.clone(),
            values,
            interpolation: self.interpolation,
        }
    }
}

/// Lagrange interpolant through `(nodes[i], values[i])` evaluated at `t`.
fn lagrange_combination(nodes: &[f64], values: &[CMatrix], t: f64) -> CMatrix {
    let (r, c) = (values[0].rows(), values[0].cols());
    let mut out = CMatrix::zeros(r, c);
    for (i, vi) in values.iter().enumerate() {
        let mut w = 1.0;
        for (k, &xk) in nodes.iter().enumerate() {
            if k != i {
                w *= (t - xk) / (nodes[i] - xk);
            }
        }
        out = out.add(&vi.scale_re(w));
    }
    out
}

/// Derivative of the Lagrange interpolant at `t`.
fn lagrange_derivative_combination(nodes: &[f64], values: &[CMatrix], t: f64) -> CMatrix {
    let (r, c) = (values[0].rows(), values[0].cols());
    let mut out = CMatrix::zeros(r, c);
    for (i, vi) in values.iter().enumerate() {
        let mut dw = 0.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut term = 1.0 / (nodes[i] - xj);
            for (k, &xk) in nodes.iter().enumerate() {
                if k != i && k != j {
                    term *= (t - xk) / (nodes[i] - xk);
                }
            }
            dw += term;
        }
        out = out.add(&vi.scale_re(dw));
    }
    out
}

/// Vector-valued function of `t`; same kinds as [`MatrixFunction`], stored
/// as column matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFunction(MatrixFunction);

impl VectorFunction {
    pub fn constant(v: Vec<C64>) -> Self {
        VectorFunction(MatrixFunction::Constant(column(&v)))
    }

    pub fn zero(dim: usize) -> Self {
        VectorFunction(MatrixFunction::Constant(CMatrix::zeros(dim, 1)))
    }

    /// Coefficients of powers of `(t - a)`, lowest first.
    pub fn polynomial(coeffs: Vec<Vec<C64>>) -> Self {
        VectorFunction(MatrixFunction::Polynomial(
            coeffs.iter().map(|v| column(v)).collect(),
        ))
    }

    pub fn sampled(nodes: Vec<f64>, values: Vec<Vec<C64>>, interpolation: Interpolation) -> Self {
        VectorFunction(MatrixFunction::Sampled(SampledMatrix {
            nodes,
            values: values.iter().map(|v| column(v)).collect(),
            interpolation,
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.shape().0
    }

    pub fn inner(&self) -> &MatrixFunction {
        &self.0
    }

    pub fn from_inner(inner: MatrixFunction) -> Self {
        VectorFunction(inner)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn validate(&self, interval: &Interval, dim: usize, field: &str) -> Result<()> {
        self.0.validate(interval, dim, 1, field)
    }

    pub fn evaluate(&self, interval: &Interval, t: f64) -> Result<Vec<C64>> {
        Ok(self.0.evaluate(interval, t)?.column(0))
    }

    pub fn derivative(&self) -> VectorFunction {
        VectorFunction(self.0.derivative())
    }
}

fn column(v: &[C64]) -> CMatrix {
    CMatrix::from_fn(v.len(), 1, |i, _| v[i])
}

/// Full description of a boundary-value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    /// System dimension `m`.
    pub dimension: usize,
    pub interval: Interval,
    pub space: SpaceParams,
    /// Coefficient `A(t)`, `m x m`.
    pub coefficient: MatrixFunction,
    /// Right-hand side `f(t)`, `m`-vector.
    pub rhs: VectorFunction,
    /// Boundary operator `B` with `r` rows.
    pub boundary: BoundaryOperator,
    /// Boundary data `c`, `r`-vector.
    pub boundary_rhs: Vec<C64>,
}

impl ProblemSpec {
    /// Number of scalar boundary conditions `r`.
    pub fn conditions(&self) -> usize {
        self.boundary_rhs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.dimension;
        if m == 0 {
            return Err(Error::DimensionMismatch(String::from(
                "dimension: must be at least 1",
            )));
        }
        self.interval.validate()?;
        self.space.validate()?;
        self.coefficient
            .validate(&self.interval, m, m, "coefficient")?;
        self.rhs.validate(&self.interval, m, "rhs")?;
        let r = self.boundary_rhs.len();
        if self.boundary.rows != r {
            return Err(Error::DimensionMismatch(format!(
                "boundary_rhs: {} entries but the boundary operator has {} rows",
                r, self.boundary.rows
            )));
        }
        if self
            .boundary_rhs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFiniteValue(String::from(
                "boundary_rhs: non-finite entry",
            )));
        }
        self.boundary.validate(&self.interval, &self.space, m)?;
        Ok(())
    }

    pub fn from_json(document: &str) -> Result<Self> {
        parse_problem(document)
    }

    pub fn to_json(&self) -> String {
        let dto = ProblemDto::from_spec(self);
        serde_json::to_string_pretty(&dto).expect("problem serialization cannot fail")
    }
}

/// Parses and fully validates a problem document.
pub fn parse_problem(document: &str) -> Result<ProblemSpec> {
    let dto: ProblemDto =
        serde_json::from_str(document).map_err(|e| Error::Syntax(format!("{e}")))?;
    let spec = dto.into_spec()?;
    spec.validate()?;
    Ok(spec)
}

// ---------------------------------------------------------------------------
// Wire format

type Cx = [f64; 2];
type MatrixData = Vec<Vec<Cx>>;
type VectorData = Vec<Cx>;

fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

fn from_cx(p: Cx) -> C64 {
    C64::new(p[0], p[1])
}

fn matrix_to_data(m: &CMatrix) -> MatrixData {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| cx(z)).collect())
        .collect()
}

fn matrix_from_data(data: &MatrixData, field: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = data
        .iter()
        .map(|row| row.iter().map(|&p| from_cx(p)).collect())
        .collect();
    CMatrix::from_rows(&rows)
        .map_err(|_| Error::DimensionMismatch(format!("{field}: ragged matrix rows")))
}

fn vector_from_data(data: &VectorData) -> Vec<C64> {
    data.iter().map(|&p| from_cx(p)).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
enum MatrixFnDto {
    Constant(MatrixData),
    Polynomial(Vec<MatrixData>),
    Sampled(SampledMatrixDto),
}

#[derive(Serialize, Deserialize)]
struct SampledMatrixDto {
    nodes: Vec<f64>,
    values: Vec<MatrixData>,
    #[serde(default)]
    interpolation: Interpolation,
}

impl MatrixFnDto {
    fn from_fn(f: &MatrixFunction) -> Self {
        match f {
            MatrixFunction::Constant(m) => MatrixFnDto::Constant(matrix_to_data(m)),
            MatrixFunction::Polynomial(coeffs) => {
                MatrixFnDto::Polynomial(coeffs.iter().map(matrix_to_data).collect())
            }
            MatrixFunction::Sampled(s) => MatrixFnDto::Sampled(SampledMatrixDto {
                nodes: s.nodes.clone(),
                values: s.values.iter().map(matrix_to_data).collect(),
                interpolation: s.interpolation,
            }),
        }
    }

    fn into_fn(self, field: &str) -> Result<MatrixFunction> {
        Ok(match self {
            MatrixFnDto::Constant(data) => {
                MatrixFunction::Constant(matrix_from_data(&data, field)?)
            }
            MatrixFnDto::Polynomial(coeffs) => MatrixFunction::Polynomial(
                coeffs
                    .iter()
                    .map(|d| matrix_from_data(d, field))
                    .collect::<Result<_>>()?,
            ),
            MatrixFnDto::Sampled(s) => MatrixFunction::Sampled(SampledMatrix {
                nodes: s.nodes,
                values: s
                    .values
                    .iter()
                    .map(|d| matrix_from_data(d, field))
                    .collect::<Result<_>>()?,
                interpolation: s.interpolation,
            }),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
enum VectorFnDto {
    Constant(VectorData),
    Polynomial(Vec<VectorData>),
    Sampled(SampledVectorDto),
}

#[derive(Serialize, Deserialize)]
struct SampledVectorDto {
    nodes: Vec<f64>,
    values: Vec<VectorData>,
    #[serde(default)]
    interpolation: Interpolation,
}

impl VectorFnDto {
    fn from_fn(f: &VectorFunction) -> Self {
        match f.inner() {
            MatrixFunction::Constant(m) => {
                VectorFnDto::Constant(m.column(0).iter().map(|&z| cx(z)).collect())
            }
            MatrixFunction::Polynomial(coeffs) => VectorFnDto::Polynomial(
                coeffs
                    .iter()
                    .map(|m| m.column(0).iter().map(|&z| cx(z)).collect())
                    .collect(),
            ),
            MatrixFunction::Sampled(s) => VectorFnDto::Sampled(SampledVectorDto {
                nodes: s.nodes.clone(),
                values: s
                    .values
                    .iter()
                    .map(|m| m.column(0).iter().map(|&z| cx(z)).collect())
                    .collect(),
                interpolation: s.interpolation,
            }),
        }
    }

    fn into_fn(self) -> VectorFunction {
        match self {
            VectorFnDto::Constant(data) => VectorFunction::constant(vector_from_data(&data)),
            VectorFnDto::Polynomial(coeffs) => {
                VectorFunction::polynomial(coeffs.iter().map(vector_from_data).collect())
            }
            VectorFnDto::Sampled(s) => VectorFunction::sampled(
                s.nodes,
                s.values.iter().map(vector_from_data).collect(),
                s.interpolation,
            ),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointTermDto {
    t: f64,
    order: f64,
    matrix: MatrixData,
}

#[derive(Serialize, Deserialize)]
#[serde(
    tag = "kernel_kind",
    content = "kernel_data",
    rename_all = "snake_case"
)]
enum IntegralTermDto {
    Constant(MatrixData),
    Polynomial(Vec<MatrixData>),
    Sampled(SampledMatrixDto),
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BoundaryDto {
    #[serde(default)]
    point_terms: Vec<PointTermDto>,
    #[serde(default)]
    integral_terms: Vec<IntegralTermDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalDto {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDto {
    s: f64,
    p: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDto {
    dimension: usize,
    interval: IntervalDto,
    space: SpaceDto,
    coefficient: MatrixFnDto,
    rhs: VectorFnDto,
    #[serde(default)]
    boundary: BoundaryDto,
    boundary_rhs: Vec<Cx>,
}

impl ProblemDto {
    fn from_spec(spec: &ProblemSpec) -> Self {
        ProblemDto {
            dimension: spec.dimension,
            interval: IntervalDto {
                a: spec.interval.a,
                b: spec.interval.b,
            },
            space: SpaceDto {
                s: spec.space.s,
                p: spec.space.p,
            },
            coefficient: MatrixFnDto::from_fn(&spec.coefficient),
            rhs: VectorFnDto::from_fn(&spec.rhs),
            boundary: BoundaryDto {
                point_terms: spec
                    .boundary
                    .point_terms
                    .iter()
                    .map(|term| PointTermDto {
                        t: term.point,
                        order: term.order,
                        matrix: matrix_to_data(&term.weight),
                    })
                    .collect(),
                integral_terms: spec
                    .boundary
                    .integral_terms
                    .iter()
                    .map(|term| match MatrixFnDto::from_fn(&term.kernel) {
                        MatrixFnDto::Constant(d) => IntegralTermDto::Constant(d),
                        MatrixFnDto::Polynomial(d) => IntegralTermDto::Polynomial(d),
                        MatrixFnDto::Sampled(d) => IntegralTermDto::Sampled(d),
                    })
                    .collect(),
            },
            boundary_rhs: spec.boundary_rhs.iter().map(|&z| cx(z)).collect(),
        }
    }

    fn into_spec(self) -> Result<ProblemSpec> {
        let point_terms: Vec<PointTerm> = self
            .boundary
            .point_terms
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                Ok(PointTerm {
                    point: t.t,
                    order: t.order,
                    weight: matrix_from_data(&t.matrix, &format!("boundary.point_terms[{i}]"))?,
                })
            })
            .collect::<Result<_>>()?;
        let integral_terms: Vec<IntegralTerm> = self
            .boundary
            .integral_terms
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let field = format!("boundary.integral_terms[{i}]");
                let kernel = match t {
                    IntegralTermDto::Constant(d) => MatrixFnDto::Constant(d),
                    IntegralTermDto::Polynomial(d) => MatrixFnDto::Polynomial(d),
                    IntegralTermDto::Sampled(d) => MatrixFnDto::Sampled(d),
                }
                .into_fn(&field)?;
                Ok(IntegralTerm { kernel })
            })
            .collect::<Result<_>>()?;
        let rows = point_terms
            .first()
            .map(|t| t.weight.rows())
            .or_else(|| integral_terms.first().map(|t| t.kernel.shape().0))
            .unwrap_or(self.boundary_rhs.len());
        Ok(ProblemSpec {
            dimension: self.dimension,
            interval: Interval {
                a: self.interval.a,
                b: self.interval.b,
            },
            space: SpaceParams {
                s: self.space.s,
                p: self.space.p,
            },
            coefficient: self.coefficient.into_fn("coefficient")?,
            rhs: self.rhs.into_fn(),
            boundary: BoundaryOperator {
                rows,
                point_terms,
                integral_terms,
            },
            boundary_rhs: vector_from_data(&self.boundary_rhs),
        })
    }
}
