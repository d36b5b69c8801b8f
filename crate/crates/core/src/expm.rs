//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant.
//!
//! Fixed top-degree approximant: the argument is halved until its 1-norm
//! falls below the degree-13 threshold, the rational approximant is
//! evaluated, and the result is squared back up. Good to roughly 1e-13
//! relative on well-scaled inputs, comfortably inside the 1e-12 accuracy
//! target of the constant-coefficient fast path.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

// Padé-13 numerator/denominator coefficients.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm threshold for the degree-13 approximant.
const THETA_13: f64 = 5.371920351148152;

/// Computes `exp(a)` for a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    assert!(a.is_square());
    if !a.is_finite() {
        return Err(Error::NonFiniteValue(alloc::format!(
            "matrix exponential of a non-finite {n}x{n} matrix",
            n = a.rows()
        )));
    }
    let norm = a.one_norm();
    let squarings = if norm > THETA_13 {
        libm::ceil(libm::log2(norm / THETA_13)) as u32
    } else {
        0
    };
    let scaled = a.scale_re(libm::exp2(-(squarings as f64)));

    let n = a.rows();
    let eye = CMatrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let u_inner = a6
        .matmul(
            &a6.scale_re(B[13])
                .add(&a4.scale_re(B[11]))
                .add(&a2.scale_re(B[9])),
        )
        .add(&a6.scale_re(B[7]))
        .add(&a4.scale_re(B[5]))
        .add(&a2.scale_re(B[3]))
        .add(&eye.scale_re(B[1]));
    let u = scaled.matmul(&u_inner);
    let v = a6
        .matmul(
            &a6.scale_re(B[12])
                .add(&a4.scale_re(B[10]))
                .add(&a2.scale_re(B[8])),
        )
        .add(&a6.scale_re(B[6]))
        .add(&a4.scale_re(B[4]))
        .add(&a2.scale_re(B[2]))
        .add(&eye.scale_re(B[0]));

    let mut r = v.sub(&u).lu()?.solve_matrix(&v.add(&u));
    for _ in 0..squarings {
        r = r.matmul(&r);
        if !r.is_finite() {
            return Err(Error::NonFiniteValue(alloc::string::String::from(
                "overflow while squaring the matrix exponential",
            )));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = expm(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e, CMatrix::identity(3));
    }

    #[test]
    fn scalar_decay() {
        let a = CMatrix::from_rows(&[vec![C64::new(-1.0, 0.0)]]).unwrap();
        let e = expm(&a).unwrap();
        // frozen: e^-1
        assert!((e[(0, 0)].re - 0.36787944117144233).abs() < 1e-14);
        assert!(e[(0, 0)].im.abs() < 1e-16);
    }

    #[test]
    fn nilpotent_is_exact() {
        let a =
            CMatrix::from_rows(&[vec![C64::ZERO, C64::ONE], vec![C64::ZERO, C64::ZERO]]).unwrap();
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - C64::ONE).norm() < 1e-15);
        assert!((e[(0, 1)] - C64::ONE).norm() < 1e-15);
        assert!(e[(1, 0)].norm() < 1e-15);
        assert!((e[(1, 1)] - C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn imaginary_rotation() {
        // exp(i*pi) = -1 on the diagonal
        let a = CMatrix::from_rows(&[vec![C64::new(0.0, core::f64::consts::PI)]]).unwrap();
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-13);
    }

    /// Independent oracle: plain Taylor series, valid for small norms.
    fn taylor_expm(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.rows();
        let mut sum = CMatrix::identity(n);
        let mut term = CMatrix::identity(n);
        for k in 1..=terms {
            term = term.matmul(a).scale_re(1.0 / k as f64);
            sum = sum.add(&term);
        }
        sum
    }

    #[test]
    fn matches_taylor_series() {
        let a = CMatrix::from_fn(3, 3, |i, j| {
            C64::new(
                0.1 * ((i * 3 + j) as f64 - 4.0),
                0.05 * ((i + 2 * j) as f64 - 2.0),
            )
        });
        let pade = expm(&a).unwrap();
        let taylor = taylor_expm(&a, 40);
        assert!(pade.sub(&taylor).frobenius_norm() < 1e-13);
    }

    #[test]
    fn large_norm_uses_squaring() {
        // exp(-30) for a scalar, forces several squarings
        let a = CMatrix::from_rows(&[vec![C64::new(-30.0, 0.0)]]).unwrap();
        let e = expm(&a).unwrap();
        let expect = libm::exp(-30.0);
        assert!((e[(0, 0)].re - expect).abs() < 1e-12 * expect.max(1e-300));
    }

    #[test]
    fn inverse_pairing() {
        let a = CMatrix::from_fn(2, 2, |i, j| {
            C64::new(0.3 * (i as f64 + 1.0), 0.2 * j as f64)
        });
        let e1 = expm(&a).unwrap();
        let e2 = expm(&a.neg()).unwrap();
        let prod = e1.matmul(&e2);
        assert!(prod.sub(&CMatrix::identity(2)).frobenius_norm() < 1e-12);
    }
}
