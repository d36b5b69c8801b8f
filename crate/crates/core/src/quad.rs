//! Composite quadrature on uniform grids.
//!
//! Simpson's rule over the sample vector; an odd interval count gets a
//! 3/8 tail over the last three intervals so the composite order stays
//! four. Cumulative prefix integrals use the half-parabola weights of the
//! same stencil.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::C64;

/// Composite Simpson over `values` sampled with spacing `h`.
pub fn simpson_f64(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let n = values.len() - 1;
            let (simpson_end, mut total) = if n.is_multiple_of(2) {
                (n, 0.0)
            } else {
                // 3/8 rule over the last three intervals
                let tail = &values[n - 3..];
                (
                    n - 3,
                    0.375 * h * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]),
                )
            };
            if simpson_end > 0 {
                let mut acc = values[0] + values[simpson_end];
                for (i, v) in values[1..simpson_end].iter().enumerate() {
                    acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
                }
                total += acc * h / 3.0;
            }
            total
        }
    }
}

/// Composite Simpson for complex samples.
pub fn simpson_c64(values: &[C64], h: f64) -> C64 {
    match values.len() {
        0 | 1 => C64::ZERO,
        2 => (values[0] + values[1]) * 0.5 * h,
        _ => {
            let n = values.len() - 1;
            let (simpson_end, mut total) = if n.is_multiple_of(2) {
                (n, C64::ZERO)
            } else {
                let tail = &values[n - 3..];
                (
                    n - 3,
                    (tail[0] + tail[1] * 3.0 + tail[2] * 3.0 + tail[3]) * (0.375 * h),
                )
            };
            if simpson_end > 0 {
                let mut acc = values[0] + values[simpson_end];
                for (i, v) in values[1..simpson_end].iter().enumerate() {
                    acc += *v * if i % 2 == 0 { 4.0 } else { 2.0 };
                }
                total += acc * h / 3.0;
            }
            total
        }
    }
}

/// Cumulative integral of vector-valued samples: entry `i` approximates the
/// integral from the first node to node `i` to fourth order.
pub fn cumulative_integral(values: &[Vec<C64>], h: f64) -> Vec<Vec<C64>> {
    let count = values.len();
    if count == 0 {
        return Vec::new();
    }
    let dim = values[0].len();
    let mut out = vec![vec![C64::ZERO; dim]; count];
    let mut i = 0;
    while i + 2 < count {
        // quadratic through nodes i, i+1, i+2 split at the midpoint
        for d in 0..dim {
            let g0 = values[i][d];
            let g1 = values[i + 1][d];
            let g2 = values[i + 2][d];
            let left = (g0 * 5.0 + g1 * 8.0 - g2) * (h / 12.0);
            let right = (-g0 + g1 * 8.0 + g2 * 5.0) * (h / 12.0);
            out[i + 1][d] = out[i][d] + left;
            out[i + 2][d] = out[i + 1][d] + right;
        }
        i += 2;
    }
    if i + 1 < count {
        // one interval left: quadratic through the last three nodes
        for d in 0..dim {
            let (g0, g1, g2) = if count >= 3 {
                (values[i - 1][d], values[i][d], values[i + 1][d])
            } else {
                (values[i][d], values[i][d], values[i + 1][d])
            };
            let right = if count >= 3 {
                (-g0 + g1 * 8.0 + g2 * 5.0) * (h / 12.0)
            } else {
                (g1 + g2) * (0.5 * h)
            };
            out[i + 1][d] = out[i][d] + right;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics() {
        // int_0^1 t^3 dt = 1/4 on an even grid
        let n = 64;
        let h = 1.0 / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson_f64(&vals, h) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simpson_odd_interval_count_stays_exact_for_cubics() {
        let n = 65;
        let h = 1.0 / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson_f64(&vals, h) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn simpson_of_ones_is_exact_length() {
        let n = 1024;
        let h = 1.0 / n as f64;
        let vals = vec![1.0; n + 1];
        assert_eq!(simpson_f64(&vals, h), 1.0);
    }

    #[test]
    fn simpson_complex_linear() {
        // int_0^1 (t + i t) dt = 0.5 + 0.5 i
        let n = 16;
        let h = 1.0 / n as f64;
        let vals: Vec<C64> = (0..=n)
            .map(|i| {
                let t = i as f64 * h;
                C64::new(t, t)
            })
            .collect();
        let got = simpson_c64(&vals, h);
        assert!((got - C64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn cumulative_matches_linear_integrand() {
        // integral of g(t) = 1 is t at every node
        let n = 17; // odd interval count exercises the tail
        let h = 0.5;
        let vals = vec![vec![C64::ONE]; n + 1];
        let cum = cumulative_integral(&vals, h);
        for (i, v) in cum.iter().enumerate() {
            assert!((v[0] - C64::new(i as f64 * h, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn cumulative_fourth_order_on_smooth_integrand() {
        // integral of cos from 0: sin(t)
        let err = |n: usize| -> f64 {
            let h = 1.0 / n as f64;
            let vals: Vec<Vec<C64>> = (0..=n)
                .map(|i| vec![C64::new((i as f64 * h).cos(), 0.0)])
                .collect();
            let cum = cumulative_integral(&vals, h);
            cum.iter()
                .enumerate()
                .map(|(i, v)| (v[0].re - (i as f64 * h).sin()).abs())
                .fold(0.0f64, f64::max)
        };
        let e1 = err(32);
        let e2 = err(64);
        assert!(
            e1 / e2 > 8.0,
            "cumulative rule below fourth order: {e1} vs {e2}"
        );
    }
}
