//! Discrete fractional Sobolev norm diagnostic.
//!
//! For a scalar function with derivatives up to `floor(s)` sampled on a
//! uniform grid, the norm splits into the whole-order part (the sum of the
//! Lp norms of the derivatives of orders `0..=floor(s)`, each by composite
//! Simpson) and the fractional seminorm of the top derivative: the double
//! integral of `|g(x) - g(y)|^p / |x - y|^(1 + frac(s) p)` approximated by
//! a trapezoidal double sum with the diagonal excluded.
//!
//! Diagnostic-grade accuracy only: the omitted diagonal band biases the
//! seminorm by `O(h^(1 - frac(s) p))` for rough data.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::problem::{Interval, SpaceParams, VectorFunction};
use crate::quad::simpson_f64;

/// Norm components: `total = integer_part_norm + seminorm`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBreakdown {
    pub integer_part_norm: f64,
    pub seminorm: f64,
    pub total: f64,
    pub grid_size: usize,
}

/// A scalar function and its derivatives sampled on a uniform grid over
/// `[a, b]`; `rows[k]` holds the k-th derivative.
#[derive(Clone, Debug)]
pub struct DerivativeSamples {
    pub a: f64,
    pub b: f64,
    pub rows: Vec<Vec<C64>>,
}

impl DerivativeSamples {
    /// Samples one component of a vector-valued function together with its
    /// derivatives up to `max_order`.
    pub fn from_component(
        f: &VectorFunction,
        interval: &Interval,
        component: usize,
        grid_size: usize,
        max_order: usize,
    ) -> Result<Self> {
        let n = grid_size.max(2);
        let h = interval.length() / n as f64;
        let mut rows = Vec::with_capacity(max_order + 1);
        let mut stage = f.clone();
        for order in 0..=max_order {
            if order > 0 {
                if matches!(stage.inner(), crate::problem::MatrixFunction::Sampled(_)) && order > 2
                {
                    return Err(Error::MissingDerivatives {
                        needed: max_order,
                        available: order - 1,
                    });
                }
                stage = stage.derivative();
            }
            let mut samples = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let t = if i == n {
                    interval.b
                } else {
                    interval.a + i as f64 * h
                };
                samples.push(stage.evaluate(interval, t)?[component]);
            }
            rows.push(samples);
        }
        Ok(DerivativeSamples {
            a: interval.a,
            b: interval.b,
            rows,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.rows.first().map(|r| r.len() - 1).unwrap_or(0)
    }
}

/// Computes the fractional Sobolev norm of the sampled function.
pub fn sobolev_slobodetsky_norm(f: &DerivativeSamples, s: f64, p: f64) -> Result<NormBreakdown> {
    SpaceParams { s, p }.validate()?;
    let whole = libm::floor(s) as usize;
    let frac = s - libm::floor(s);
    if f.rows.len() <= whole {
        return Err(Error::MissingDerivatives {
            needed: whole,
            available: f.rows.len().saturating_sub(1),
        });
    }
    let n = f.grid_size();
    if n < 2 {
        return Err(Error::InvalidGrid(alloc::string::String::from(
            "norm needs at least two grid intervals",
        )));
    }
    for (k, row) in f.rows.iter().enumerate() {
        if row.len() != n + 1 {
            return Err(Error::DimensionMismatch(alloc::format!(
                "derivative row {k} has {} samples, expected {}",
                row.len(),
                n + 1
            )));
        }
    }
    let h = (f.b - f.a) / n as f64;

    let mut integer_part_norm = 0.0;
    for row in f.rows.iter().take(whole + 1) {
        let powered: Vec<f64> = row.iter().map(|z| libm::pow(z.norm(), p)).collect();
        integer_part_norm += libm::pow(simpson_f64(&powered, h), 1.0 / p);
    }

    // trapezoidal double sum over off-diagonal node pairs
    let top = &f.rows[whole];
    let exponent = 1.0 + frac * p;
    let weight = |i: usize| if i == 0 || i == n { 0.5 * h } else { h };
    let mut double_sum = 0.0;
    for i in 0..=n {
        let wi = weight(i);
        for j in 0..=n {
            if i == j {
                continue;
            }
            let dist = libm::fabs((i as f64 - j as f64) * h);
            let diff = (top[i] - top[j]).norm();
            if diff > 0.0 {
                double_sum += wi * weight(j) * libm::pow(diff, p) / libm::pow(dist, exponent);
            }
        }
    }
    let seminorm = libm::pow(double_sum, 1.0 / p);

    Ok(NormBreakdown {
        integer_part_norm,
        seminorm,
        total: integer_part_norm + seminorm,
        grid_size: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_samples(f: impl Fn(f64) -> f64, n: usize) -> Vec<C64> {
        (0..=n)
            .map(|i| C64::new(f(i as f64 / n as f64), 0.0))
            .collect()
    }

    #[test]
    fn constant_function_has_exactly_unit_norm() {
        // f = 1 on [0, 1], s = 1.5, p = 2: the L2 norm is exactly 1 and
        // both the derivative norm and the seminorm vanish
        let f = DerivativeSamples {
            a: 0.0,
            b: 1.0,
            rows: alloc::vec![
                uniform_samples(|_| 1.0, 1024),
                uniform_samples(|_| 0.0, 1024),
            ],
        };
        let norm = sobolev_slobodetsky_norm(&f, 1.5, 2.0).unwrap();
        assert_eq!(norm.integer_part_norm, 1.0);
        assert_eq!(norm.seminorm, 0.0);
        assert_eq!(norm.total, 1.0);
    }

    #[test]
    fn ramp_norm_matches_closed_form() {
        // f = t on [0, 1]: ||t||_L2 = sqrt(1/3), ||1||_L2 = 1, seminorm 0;
        // frozen total sqrt(1/3) + 1
        let f = DerivativeSamples {
            a: 0.0,
            b: 1.0,
            rows: alloc::vec![uniform_samples(|t| t, 1024), uniform_samples(|_| 1.0, 1024),],
        };
        let norm = sobolev_slobodetsky_norm(&f, 1.5, 2.0).unwrap();
        assert_eq!(norm.seminorm, 0.0);
        assert!((norm.total - 1.5773502691896257).abs() < 1e-6);
    }

    #[test]
    fn ramp_norm_is_grid_stable() {
        let at = |n: usize| {
            let f = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: alloc::vec![uniform_samples(|t| t, n), uniform_samples(|_| 1.0, n)],
            };
            sobolev_slobodetsky_norm(&f, 1.5, 2.0).unwrap().total
        };
        assert!((at(512) - at(1024)).abs() < 1e-6);
    }

    #[test]
    fn missing_derivative_rows_are_rejected() {
        let f = DerivativeSamples {
            a: 0.0,
            b: 1.0,
            rows: alloc::vec![uniform_samples(|t| t, 64)],
        };
        assert!(matches!(
            sobolev_slobodetsky_norm(&f, 1.5, 2.0),
            Err(Error::MissingDerivatives {
                needed: 1,
                available: 0
            })
        ));
    }

    #[test]
    fn invalid_space_is_rejected() {
        let f = DerivativeSamples {
            a: 0.0,
            b: 1.0,
            rows: alloc::vec![uniform_samples(|t| t, 64), uniform_samples(|_| 1.0, 64)],
        };
        assert!(matches!(
            sobolev_slobodetsky_norm(&f, 2.0, 2.0),
            Err(Error::InvalidSpace(_))
        ));
        assert!(matches!(
            sobolev_slobodetsky_norm(&f, 1.5, 0.5),
            Err(Error::InvalidSpace(_))
        ));
    }

    #[test]
    fn smooth_function_converges_with_the_grid() {
        let at = |n: usize| {
            let f = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: alloc::vec![
                    uniform_samples(|t| (2.0 * t).sin(), n),
                    uniform_samples(|t| 2.0 * (2.0 * t).cos(), n),
                ],
            };
            sobolev_slobodetsky_norm(&f, 1.5, 2.0).unwrap().total
        };
        let d1 = (at(128) - at(256)).abs();
        let d2 = (at(256) - at(512)).abs();
        assert!(d2 < d1, "norm not converging: {d1} then {d2}");
    }

    #[test]
    fn component_sampling_respects_the_derivative_cap() {
        // sampled data offers at most two finite-difference derivatives
        let nodes: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let vals: Vec<Vec<C64>> = nodes
            .iter()
            .map(|&t| alloc::vec![C64::new(t, 0.0)])
            .collect();
        let f = VectorFunction::sampled(nodes, vals, crate::problem::Interpolation::Cubic);
        let iv = Interval::new(0.0, 1.0).unwrap();
        assert!(DerivativeSamples::from_component(&f, &iv, 0, 64, 2).is_ok());
        assert!(matches!(
            DerivativeSamples::from_component(&f, &iv, 0, 64, 3),
            Err(Error::MissingDerivatives { .. })
        ));
    }

    proptest! {
        #[test]
        fn norm_is_absolutely_homogeneous(lambda in -4.0f64..4.0) {
            prop_assume!(lambda.abs() > 1e-3);
            let n = 128;
            let base = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: alloc::vec![
                    uniform_samples(|t| t * t - 0.3, n),
                    uniform_samples(|t| 2.0 * t, n),
                ],
            };
            let scaled = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: base
                    .rows
                    .iter()
                    .map(|row| row.iter().map(|z| z * lambda).collect())
                    .collect(),
            };
            let n1 = sobolev_slobodetsky_norm(&base, 1.5, 2.0).unwrap();
            let n2 = sobolev_slobodetsky_norm(&scaled, 1.5, 2.0).unwrap();
            let s = lambda.abs();
            prop_assert!((n2.integer_part_norm - s * n1.integer_part_norm).abs() <= 1e-10 * (1.0 + s * n1.integer_part_norm));
            prop_assert!((n2.seminorm - s * n1.seminorm).abs() <= 1e-10 * (1.0 + s * n1.seminorm));
            prop_assert!((n2.total - s * n1.total).abs() <= 1e-10 * (1.0 + s * n1.total));
        }

        #[test]
        fn triangle_inequality_on_sampled_pairs(
            c1 in -2.0f64..2.0,
            c2 in -2.0f64..2.0,
        ) {
            let n = 64;
            let f = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: alloc::vec![
                    uniform_samples(|t| c1 * t + 0.2, n),
                    uniform_samples(|_| c1, n),
                ],
            };
            let g = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: alloc::vec![
                    uniform_samples(|t| c2 * t * t, n),
                    uniform_samples(|t| 2.0 * c2 * t, n),
                ],
            };
            let sum = DerivativeSamples {
                a: 0.0,
                b: 1.0,
                rows: f
                    .rows
                    .iter()
                    .zip(&g.rows)
                    .map(|(r1, r2)| r1.iter().zip(r2).map(|(x, y)| x + y).collect())
                    .collect(),
            };
            let nf = sobolev_slobodetsky_norm(&f, 1.5, 2.0).unwrap().total;
            let ng = sobolev_slobodetsky_norm(&g, 1.5, 2.0).unwrap().total;
            let nsum = sobolev_slobodetsky_norm(&sum, 1.5, 2.0).unwrap().total;
            prop_assert!(nsum <= nf + ng + 1e-9);
        }
    }
}
