//! Error-probability bounds for binary discrimination of open-system
//! dynamics.
//!
//! Four curves are computed for the driven two-level atom:
//!
//!  - the minimal error achievable by any measurement on system plus
//!    environment, from the two-sided overlap;
//!  - the error of photon counting alone, from the no-detection
//!    probability of the no-jump wavefunction;
//!  - photon counting plus a final measurement of the atom;
//!  - the Helstrom bound for a measurement on the final reduced state
//!    of the atom only.

use num_complex::Complex64;

use crate::model::{two_level_rabi_pair, validate_density_matrix};
use crate::numerics::{
    c64, eig_hermitian, integrate_adaptive, ComplexMatrix, ComplexVector, OdeSettings,
};
use crate::twosided::{solve_lindblad, solve_two_sided};
use crate::{Error, Result};

/// Overlap magnitudes above 1 + this slack are rejected; below it they are
/// treated as roundoff and clamped to 1.
pub const OVERLAP_CLAMP_TOL: f64 = 1e-9;

/// Minimal error probability for equal priors given the state overlap:
/// 1/2 (1 - sqrt(1 - |alpha|^2)).
pub fn error_from_overlap(alpha: Complex64) -> Result<f64> {
    let mag = alpha.norm();
    if !mag.is_finite() {
        return Err(Error::Numerical("overlap is not finite".into()));
    }
    if mag > 1.0 + OVERLAP_CLAMP_TOL {
        return Err(Error::Validation(format!(
            "overlap magnitude {mag} exceeds 1 beyond roundoff tolerance"
        )));
    }
    let m = mag.min(1.0);
    Ok(0.5 * (1.0 - (1.0 - m * m).sqrt()))
}

/// Helstrom bound: minimal error probability for discriminating two density
/// matrices with a single measurement, 1/2 + sum of the negative eigenvalues
/// of 1/2 (rho1 - rho0).
pub fn helstrom_error(rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<f64> {
    if rho0.rows() != rho1.rows() || rho0.cols() != rho1.cols() {
        return Err(Error::Dimension(
            "Helstrom bound needs equal-dimension density matrices".into(),
        ));
    }
    validate_density_matrix(rho0, 1e-7)?;
    validate_density_matrix(rho1, 1e-7)?;
    // Symmetrize the half-difference so solver roundoff cannot trip the
    // Hermitian eigensolver's input check.
    let half_diff = (rho1 - rho0).scale(c64(0.5, 0.0));
    let sym = (&half_diff + &half_diff.adjoint()).scale(c64(0.5, 0.0));
    let eig = eig_hermitian(&sym)?;
    let negative_sum: f64 = eig.values.iter().filter(|&&g| g <= 0.0).sum();
    Ok(0.5 + negative_sum)
}

/// Un-normalized no-detection wavefunction a(t)|g> + b(t)|e> of the driven,
/// decaying two-level atom. Its squared norm is the probability that no
/// photon has been emitted up to t.
#[derive(Debug, Clone)]
pub struct NoJumpState {
    pub times: Vec<f64>,
    /// Ground amplitude.
    pub a: Vec<Complex64>,
    /// Excited amplitude.
    pub b: Vec<Complex64>,
}

impl NoJumpState {
    /// No-detection probability |a|^2 + |b|^2 at each grid time.
    pub fn survival(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }
}

/// Propagate the no-jump wavefunction from the ground state under the
/// non-Hermitian Hamiltonian
/// (omega/2)(|e><g| + |g><e|) - i (kappa/2) |e><e|.
pub fn no_jump_evolution(
    omega: f64,
    kappa: f64,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<NoJumpState> {
    if kappa < 0.0 {
        return Err(Error::Validation("decay rate must be non-negative".into()));
    }
    match t_grid.first() {
        Some(&0.0) => {}
        _ => {
            return Err(Error::Validation(
                "no-jump propagation requires a grid starting at 0".into(),
            ))
        }
    }
    let h_nh = ComplexMatrix::from_rows(&[
        vec![Complex64::ZERO, c64(omega / 2.0, 0.0)],
        vec![c64(omega / 2.0, 0.0), c64(0.0, -kappa / 2.0)],
    ]);
    let y0 = ComplexVector::basis(2, 0);
    let rhs = |_: f64, y: &ComplexVector| h_nh.mul_vec(y).scale(c64(0.0, -1.0));
    let states = integrate_adaptive(rhs, &y0, t_grid, settings)?;
    let (a, b) = states
        .iter()
        .map(|s| (s.entries()[0], s.entries()[1]))
        .unzip();
    Ok(NoJumpState {
        times: t_grid.to_vec(),
        a,
        b,
    })
}

/// Error probabilities of photon-counting strategies for distinguishing a
/// quiet atom (no drive) from one driven at `omega1`, both decaying at
/// `kappa`.
///
/// Returns (counting only, counting plus final atomic measurement):
/// 1/2 (|a|^2 + |b|^2) and 1/2 |a|^2. These formulas are specific to the
/// zero-drive null hypothesis, which never produces a photon.
pub fn counting_error_curves(
    omega1: f64,
    kappa: f64,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nj = no_jump_evolution(omega1, kappa, t_grid, settings)?;
    let pe_counting = nj
        .survival()
        .into_iter()
        .map(|p| 0.5 * p)
        .collect();
    let pe_counting_atom = nj.a.iter().map(|a| 0.5 * a.norm_sqr()).collect();
    Ok((pe_counting, pe_counting_atom))
}

/// The four discrimination error curves for the zero-drive vs `omega1`
/// two-level scenario on a common time grid.
#[derive(Debug, Clone)]
pub struct Fig2Bundle {
    pub times: Vec<f64>,
    /// Minimal error over all system-plus-environment measurements.
    pub pe_min: Vec<f64>,
    /// Photon counting only.
    pub pe_counting: Vec<f64>,
    /// Photon counting plus final atomic measurement.
    pub pe_counting_atom: Vec<f64>,
    /// Final measurement on the atom alone (Helstrom bound).
    pub pe_helstrom: Vec<f64>,
}

/// Assemble all four error curves. The null hypothesis is pinned to zero
/// drive, where the counting formulas are valid.
pub fn fig2_bundle(
    omega1: f64,
    kappa: f64,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Fig2Bundle> {
    let pair = two_level_rabi_pair(0.0, omega1, kappa)?;
    let curve = solve_two_sided(&pair, t_grid, settings)?;
    let (pe_counting, pe_counting_atom) =
        counting_error_curves(omega1, kappa, t_grid, settings)?;

    let ground = ComplexVector::basis(2, 0);
    let rho_init = ground.outer(&ground);
    let traj0 = solve_lindblad(&pair.hyp0, &rho_init, t_grid, settings)?;
    let traj1 = solve_lindblad(&pair.hyp1, &rho_init, t_grid, settings)?;
    let pe_helstrom = traj0
        .states
        .iter()
        .zip(&traj1.states)
        .map(|(r0, r1)| helstrom_error(r0, r1))
        .collect::<Result<Vec<_>>>()?;

    Ok(Fig2Bundle {
        times: t_grid.to_vec(),
        pe_min: curve.pe_min,
        pe_counting,
        pe_counting_atom,
        pe_helstrom,
    })
}
