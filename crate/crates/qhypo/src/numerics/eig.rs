//! Dense complex eigensolvers.
//!
//! `eig_general` reduces to upper Hessenberg form by Householder similarity
//! and runs a shifted QR iteration with Givens rotations (Wilkinson shift,
//! eigenvalues only). `eig_hermitian` is a cyclic complex Jacobi iteration
//! returning eigenvalues in ascending order with orthonormal eigenvectors.
//! Both target the small dense matrices used throughout this crate.

use num_complex::Complex64;

use super::matrix::{c64, ComplexMatrix};
use crate::{Error, Result};

/// All eigenvalues (with multiplicity) of a general complex square matrix,
/// sorted by real part, then imaginary part.
pub fn eig_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eig_general requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.all_finite() {
        return Err(Error::Numerical("eig_general input contains NaN/Inf".into()));
    }
    let n = m.rows();
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }

    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    let mut values = qr_eigenvalues(&mut h)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Real eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: ComplexMatrix,
}

/// Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues and orthonormal eigenvectors of a Hermitian matrix via
/// cyclic complex Jacobi rotations.
///
/// Rejects inputs whose Hermiticity defect exceeds [`HERMITICITY_TOL`].
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eig_hermitian requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: defect {defect:.3e} exceeds {HERMITICITY_TOL:.1e}"
        )));
    }

    let n = m.rows();
    // Symmetrize exactly so rounding in the input cannot accumulate.
    let mut a = m.clone();
    for i in 0..n {
        a.set(i, i, c64(m.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let v = (m.get(i, j) + m.get(j, i).conj()).scale(0.5);
            a.set(i, j, v);
            a.set(j, i, v.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = 1e-14 * scale;
    let max_sweeps = 60;
    let mut converged = false;
    for _ in 0..max_sweeps {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::Numerical(
            "Jacobi eigensolver did not converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));

    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a.get(p, q).norm_sqr();
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing a[p][q] (and a[q][p]).
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let abs_apq = apq.norm();
    if abs_apq == 0.0 {
        return;
    }
    let phase = apq / abs_apq;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * abs_apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    // Row update: rows p and q of J^dagger A.
    for j in 0..n {
        let xp = a.get(p, j);
        let xq = a.get(q, j);
        a.set(p, j, xp.scale(c) - xq * phase.scale(s));
        a.set(q, j, xp * phase.conj().scale(s) + xq.scale(c));
    }
    // Column update: columns p and q of (J^dagger A) J.
    for i in 0..n {
        let xp = a.get(i, p);
        let xq = a.get(i, q);
        a.set(i, p, xp.scale(c) - xq * phase.conj().scale(s));
        a.set(i, q, xp * phase.scale(s) + xq.scale(c));
    }
    // Accumulate eigenvectors: V <- V J.
    for i in 0..v.rows() {
        let xp = v.get(i, p);
        let xq = v.get(i, q);
        v.set(i, p, xp.scale(c) - xq * phase.conj().scale(s));
        v.set(i, q, xp * phase.scale(s) + xq.scale(c));
    }
    // Clean the eliminated pair against rounding residue.
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, c64(dp, 0.0));
    a.set(q, q, c64(dq, 0.0));
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg_in_place(h: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n.
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h.get(i, k)).collect();
        let norm_x = x.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::ONE
        };
        let alpha = -phase.scale(norm_x);
        x[0] -= alpha;
        let vnorm = x.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for e in x.iter_mut() {
            *e = e.scale(1.0 / vnorm);
        }

        // Left: rows k+1..n across all columns.
        for j in 0..n {
            let mut s = Complex64::ZERO;
            for (idx, vi) in x.iter().enumerate() {
                s += vi.conj() * h.get(k + 1 + idx, j);
            }
            let s2 = s.scale(2.0);
            for (idx, vi) in x.iter().enumerate() {
                let val = h.get(k + 1 + idx, j) - vi * s2;
                h.set(k + 1 + idx, j, val);
            }
        }
        // Right: columns k+1..n across all rows.
        for i in 0..n {
            let mut s = Complex64::ZERO;
            for (idx, vi) in x.iter().enumerate() {
                s += h.get(i, k + 1 + idx) * vi;
            }
            let s2 = s.scale(2.0);
            for (idx, vi) in x.iter().enumerate() {
                let val = h.get(i, k + 1 + idx) - s2 * vi.conj();
                h.set(i, k + 1 + idx, val);
            }
        }
        // Entries below the subdiagonal in column k are now zero.
        h.set(k + 1, k, alpha);
        for i in (k + 2)..n {
            h.set(i, k, Complex64::ZERO);
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix, eigenvalues only.
fn qr_eigenvalues(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut values = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut its = 0usize;

    loop {
        // Deflate negligible subdiagonals, then locate the active block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h.get(lo, lo - 1).norm();
            let local = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            let tol = if local > 0.0 { eps * local } else { eps * hnorm };
            if sub <= tol {
                h.set(lo, lo - 1, Complex64::ZERO);
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            // 1x1 block converged.
            values.push(h.get(hi, hi));
            if hi == 0 {
                break;
            }
            hi -= 1;
            its = 0;
            continue;
        }
        if lo + 1 == hi {
            // 2x2 block: closed form.
            let (l1, l2) = eig_2x2(
                h.get(lo, lo),
                h.get(lo, hi),
                h.get(hi, lo),
                h.get(hi, hi),
            );
            values.push(l1);
            values.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            its = 0;
            continue;
        }

        its += 1;
        if its > 120 {
            return Err(Error::Numerical(
                "QR eigensolver did not converge within the iteration limit".into(),
            ));
        }

        // Wilkinson shift from the trailing 2x2, with an occasional
        // exceptional shift to break symmetric stalls.
        let shift = if its % 12 == 0 {
            let s = h.get(hi, hi - 1).norm() + h.get(hi - 1, hi - 2).norm();
            h.get(hi, hi) + c64(0.75 * s, 0.4375 * s)
        } else {
            let (l1, l2) = eig_2x2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let d = h.get(hi, hi);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        qr_step(h, lo, hi, shift);
    }

    Ok(values)
}

/// Eigenvalues of [[a, b], [c, d]].
fn eig_2x2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let half_tr = (a + d).scale(0.5);
    let disc = ((a - d).scale(0.5)).powu(2) + b * c;
    let root = disc.sqrt();
    (half_tr + root, half_tr - root)
}

/// One explicit shifted QR step on the decoupled block lo..=hi.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        let v = h.get(i, i) - shift;
        h.set(i, i, v);
    }

    // Factor: chains of Givens rotations eliminating the subdiagonal.
    let mut rotations = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let a = h.get(i, i);
        let b = h.get(i + 1, i);
        let (c, s) = givens(a, b);
        // Rows i, i+1 over block columns.
        for j in i..=hi {
            let x = h.get(i, j);
            let y = h.get(i + 1, j);
            h.set(i, j, x.scale(c) + s * y);
            h.set(i + 1, j, y.scale(c) - s.conj() * x);
        }
        rotations.push((c, s));
    }

    // Form RQ: apply the adjoint rotations on the right in the same order.
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let i = lo + idx;
        let top = if i + 2 <= hi { i + 2 } else { hi };
        for r in lo..=top {
            let x = h.get(r, i);
            let y = h.get(r, i + 1);
            h.set(r, i, x.scale(c) + y * s.conj());
            h.set(r, i + 1, y.scale(c) - x * s);
        }
    }

    for i in lo..=hi {
        let v = h.get(i, i) + shift;
        h.set(i, i, v);
    }
}

/// Complex Givens pair (c real, s complex) with
/// [[c, s], [-conj(s), c]] [a; b] = [r; 0].
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj().scale(1.0 / r);
    (c, s)
}

#[cfg(test)]
mod tests {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::numerics::expm::solve_linear;
    use crate::numerics::ComplexVector;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let entries = (0..n * n)
            .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::new(n, n, entries)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let m = random_matrix(n, rng);
        (&m + &m.adjoint()).scale(c64(0.5, 0.0))
    }

    fn sorted_close(mut got: Vec<Complex64>, mut expect: Vec<Complex64>, tol: f64) {
        let key = |z: &Complex64| (z.re, z.im);
        got.sort_by(|a, b| key(a).0.total_cmp(&key(b).0).then(key(a).1.total_cmp(&key(b).1)));
        expect
            .sort_by(|a, b| key(a).0.total_cmp(&key(b).0).then(key(a).1.total_cmp(&key(b).1)));
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).norm() < tol, "eigenvalue {g} vs {e}");
        }
    }

    #[test]
    fn general_diagonal() {
        let m = ComplexMatrix::diag(&[c64(1.0, 0.0), c64(0.0, 2.0)]);
        sorted_close(
            eig_general(&m).unwrap(),
            vec![c64(1.0, 0.0), c64(0.0, 2.0)],
            1e-12,
        );
    }

    #[test]
    fn general_identity_triple() {
        let vals = eig_general(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(vals.len(), 3);
        for v in vals {
            assert!((v - Complex64::ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn general_rotation_gives_plus_minus_i() {
        // Roots of lambda^2 + 1 from the characteristic polynomial.
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        sorted_close(
            eig_general(&m).unwrap(),
            vec![c64(0.0, 1.0), c64(0.0, -1.0)],
            1e-12,
        );
    }

    #[test]
    fn general_eigenvalue_sum_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 8, 12] {
            let m = random_matrix(n, &mut rng);
            let sum: Complex64 = eig_general(&m).unwrap().into_iter().sum();
            assert!(
                (sum - m.trace()).norm() < 1e-10,
                "n={n}: sum {sum} vs trace {}",
                m.trace()
            );
        }
    }

    #[test]
    fn general_defective_jordan_block() {
        // Jordan block: double eigenvalue 3 with a single eigenvector.
        let m = ComplexMatrix::from_real_rows(&[vec![3.0, 1.0], vec![0.0, 3.0]]);
        sorted_close(
            eig_general(&m).unwrap(),
            vec![c64(3.0, 0.0), c64(3.0, 0.0)],
            1e-7,
        );
    }

    #[test]
    fn general_residual_via_inverse_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(6, &mut rng);
        let scale = m.frobenius_norm();
        for &lambda in eig_general(&m).unwrap().iter() {
            // Inverse iteration with a slightly displaced shift recovers an
            // eigenvector; the residual checks the eigenvalue quality.
            let shifted = &m - &ComplexMatrix::identity(6).scale(lambda + c64(1e-8, 1e-8));
            let mut v = ComplexVector::new(vec![Complex64::ONE; 6]).normalized();
            for _ in 0..3 {
                let sol = solve_linear(&shifted, &v_as_col(&v)).unwrap();
                v = col_as_vec(&sol).normalized();
            }
            let residual = (&m.mul_vec(&v) - &v.scale(lambda)).norm();
            assert!(
                residual <= 1e-10 * scale,
                "residual {residual:.3e} for lambda {lambda}"
            );
        }
    }

    fn v_as_col(v: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix::new(v.dim(), 1, v.entries().to_vec())
    }

    fn col_as_vec(m: &ComplexMatrix) -> ComplexVector {
        ComplexVector::new(m.entries().to_vec())
    }

    #[test]
    fn hermitian_diagonal() {
        let m = ComplexMatrix::diag(&[c64(-1.0, 0.0), c64(1.0, 0.0)]);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn hermitian_pauli_x() {
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = eig_hermitian(&sx).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_half_density_difference() {
        // 0.5*(rho1 - rho0) for rho0 = |g><g|, rho1 = I/2 is diag(-1/4, 1/4).
        let rho0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let rho1 = ComplexMatrix::identity(2).scale(c64(0.5, 0.0));
        let m = (&rho1 - &rho0).scale(c64(0.5, 0.0));
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] + 0.25).abs() < 1e-14);
        assert!((e.values[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn hermitian_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 4, 7, 10] {
            let m = random_hermitian(n, &mut rng);
            let e = eig_hermitian(&m).unwrap();
            let v = &e.vectors;

            // Orthonormality to 1e-12.
            let gram = v.adjoint().matmul(v);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
                    assert!(
                        (gram.get(i, j) - expect).norm() < 1e-12,
                        "gram ({i},{j}) off for n={n}"
                    );
                }
            }

            // Reconstruction V diag(w) V^dagger = M to 1e-10.
            let lam = ComplexMatrix::diag(
                &e.values.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>(),
            );
            let rec = v.matmul(&lam).matmul(&v.adjoint());
            assert!((&rec - &m).max_abs_entry() < 1e-10, "reconstruction n={n}");

            // Ascending order.
            for w in e.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }
}
