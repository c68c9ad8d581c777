//! Matrix exponential via scaling-and-squaring with a Padé(13) kernel.
//!
//! Follows Higham, "The Scaling and Squaring Method for the Matrix
//! Exponential Revisited", SIAM J. Matrix Anal. Appl. 26(4), 2005. The
//! degree-13 approximant is used unconditionally; for the small dense
//! matrices handled here the extra multiplications at low norm are cheap.

use num_complex::Complex64;

use super::matrix::{c64, ComplexMatrix};
use crate::{Error, Result};

/// Padé(13,13) numerator coefficients (Higham 2005, eq. 10.33).
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Scaling threshold theta_13 for double precision.
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential exp(m).
///
/// Errors on non-square or non-finite input.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expm requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.all_finite() {
        return Err(Error::Numerical("expm input contains NaN/Inf".into()));
    }

    let norm = m.one_norm();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };

    let scaled = m.scale(c64(1.0 / f64::powi(2.0, squarings as i32), 0.0));
    let mut result = pade13(&scaled)?;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Degree-13 diagonal Padé approximant of exp(a) for ||a||_1 <= theta_13.
fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let eye = ComplexMatrix::identity(n);
    let b: Vec<Complex64> = PADE13.iter().map(|&x| c64(x, 0.0)).collect();

    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    // u = A [A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I]
    let w1 = &(&a6.scale(b[13]) + &a4.scale(b[11])) + &a2.scale(b[9]);
    let w2 = &(&(&a6.matmul(&w1) + &a6.scale(b[7])) + &a4.scale(b[5]))
        + &(&a2.scale(b[3]) + &eye.scale(b[1]));
    let u = a.matmul(&w2);

    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let z1 = &(&a6.scale(b[12]) + &a4.scale(b[10])) + &a2.scale(b[8]);
    let v = &(&(&a6.matmul(&z1) + &a6.scale(b[6])) + &a4.scale(b[4]))
        + &(&a2.scale(b[2]) + &eye.scale(b[0]));

    // exp(A) ~= (v - u)^{-1} (v + u)
    solve_linear(&(&v - &u), &(&v + &u))
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert!(a.is_square(), "solve_linear requires a square system");
    assert_eq!(a.rows(), b.rows(), "right-hand side row mismatch");
    let n = a.rows();
    let m = b.cols();

    let mut lhs = a.clone();
    let mut rhs = b.clone();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lhs.get(col, col).norm();
        for row in (col + 1)..n {
            let mag = lhs.get(row, col).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::Numerical("singular system in solve_linear".into()));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lhs.get(col, j);
                lhs.set(col, j, lhs.get(pivot_row, j));
                lhs.set(pivot_row, j, tmp);
            }
            for j in 0..m {
                let tmp = rhs.get(col, j);
                rhs.set(col, j, rhs.get(pivot_row, j));
                rhs.set(pivot_row, j, tmp);
            }
        }

        let pivot = lhs.get(col, col);
        for row in (col + 1)..n {
            let factor = lhs.get(row, col) / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for j in col..n {
                let v = lhs.get(row, j) - factor * lhs.get(col, j);
                lhs.set(row, j, v);
            }
            for j in 0..m {
                let v = rhs.get(row, j) - factor * rhs.get(col, j);
                rhs.set(row, j, v);
            }
        }
    }

    let mut x = ComplexMatrix::zeros(n, m);
    for col in (0..n).rev() {
        let pivot = lhs.get(col, col);
        for j in 0..m {
            let mut sum = rhs.get(col, j);
            for k in (col + 1)..n {
                sum -= lhs.get(col, k) * x.get(k, j);
            }
            x.set(col, j, sum / pivot);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, PI};

    use super::*;

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let d = (a.get(i, j) - b.get(i, j)).norm();
                assert!(d < tol, "entry ({i},{j}) differs by {d}");
            }
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_close(&expm(&z).unwrap(), &ComplexMatrix::identity(3), 1e-15);
    }

    #[test]
    fn expm_diagonal_i_pi() {
        let m = ComplexMatrix::diag(&[c64(0.0, PI), c64(0.0, 0.0)]);
        let e = expm(&m).unwrap();
        let expect = ComplexMatrix::diag(&[c64(-1.0, 0.0), c64(1.0, 0.0)]);
        assert_close(&e, &expect, 1e-13);
    }

    #[test]
    fn expm_nilpotent_truncates() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let e = expm(&m).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert_close(&e, &expect, 1e-14);
    }

    #[test]
    fn expm_identity_scales_by_e() {
        let e = expm(&ComplexMatrix::identity(2)).unwrap();
        assert_close(&e, &ComplexMatrix::identity(2).scale(c64(E, 0.0)), 1e-13);
    }

    #[test]
    fn expm_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(expm(&m).is_err());
    }

    #[test]
    fn expm_large_norm_uses_scaling() {
        let m = ComplexMatrix::diag(&[c64(50.0, 0.0), c64(-50.0, 0.0)]);
        let e = expm(&m).unwrap();
        let rel = (e.get(0, 0).re - 50.0f64.exp()).abs() / 50.0f64.exp();
        assert!(rel < 1e-12);
        assert!((e.get(1, 1).re - (-50.0f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn solve_linear_recovers_known_solution() {
        let a = ComplexMatrix::from_rows(&[
            vec![c64(2.0, 0.0), c64(1.0, 1.0)],
            vec![c64(0.0, -1.0), c64(3.0, 0.0)],
        ]);
        let x = ComplexMatrix::from_rows(&[
            vec![c64(1.0, 0.0), c64(0.0, 2.0)],
            vec![c64(-1.0, 1.0), c64(0.5, 0.0)],
        ]);
        let b = a.matmul(&x);
        let solved = solve_linear(&a, &b).unwrap();
        assert_close(&solved, &x, 1e-13);
    }
}
