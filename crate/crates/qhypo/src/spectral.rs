//! Spectral analysis of the vectorized two-sided generator.
//!
//! For time-independent hypotheses the two-sided equation is linear,
//! vec(rho01)' = L vec(rho01), with L a d^2 x d^2 matrix. The eigenvalue of
//! L with the smallest nonzero |Re| sets the asymptotic exponential rate at
//! which the overlap decays, i.e. how fast the hypotheses become
//! distinguishable. Scanning that rate over a control parameter (here the
//! Rabi frequency) locates the optimal working point.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::HypothesisPair;
use crate::numerics::{c64, eig_general, expm, kron, ComplexMatrix};
use crate::{Error, Result};

/// Default threshold below which |Re lambda| counts as a stationary mode.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// Spectrum of a two-sided generator and the extracted convergence rate.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// All d^2 eigenvalues (units of kappa).
    pub eigenvalues: Vec<Complex64>,
    /// Smallest |Re lambda| above the zero-mode threshold; 0 if every mode
    /// is stationary.
    pub rate: f64,
    /// Number of eigenvalues filtered as stationary modes.
    pub zero_modes: usize,
}

/// Rate-vs-drive scan at a fixed detuning.
#[derive(Debug, Clone)]
pub struct RateScan {
    pub detuning: f64,
    pub omegas: Vec<f64>,
    pub rates: Vec<f64>,
    /// Grid argmax refined by three-point parabolic interpolation.
    pub argmax_omega: f64,
    /// Rate at the refined argmax (parabola vertex value).
    pub max_rate: f64,
}

/// Vectorized two-sided generator under column stacking
/// (vec(A X B) = (B^T kron A) vec(X)):
///
///   L = -i (I kron H0 - H1^T kron I)
///       + sum_m [ conj(c1_m) kron c0_m
///                 - 1/2 (I kron c0_m^dag c0_m + (c1_m^dag c1_m)^T kron I) ]
///
/// Requires time-independent hypotheses.
pub fn vectorize_two_sided(pair: &HypothesisPair) -> Result<ComplexMatrix> {
    if !pair.is_time_independent() {
        return Err(Error::Validation(
            "vectorization requires time-independent hypotheses".into(),
        ));
    }
    let d = pair.dim();
    let eye = ComplexMatrix::identity(d);
    let h0 = pair.hyp0.hamiltonian.constant_matrix()?;
    let h1 = pair.hyp1.hamiltonian.constant_matrix()?;

    let commutator_part =
        (&kron(&eye, &h0) - &kron(&h1.transpose(), &eye)).scale(c64(0.0, -1.0));

    let mut l = commutator_part;
    for (ch0, ch1) in pair.channel_pairs() {
        let c0 = ch0.operator();
        let c1 = ch1.operator();
        let jump = kron(&c1.conj(), c0);
        let k0 = c0.adjoint().matmul(c0);
        let k1 = c1.adjoint().matmul(c1);
        let damp = (&kron(&eye, &k0) + &kron(&k1.transpose(), &eye)).scale(c64(0.5, 0.0));
        l = &(&l + &jump) - &damp;
    }
    Ok(l)
}

/// rho01 at time t by direct exponentiation of the vectorized generator.
///
/// Cross-check path for the adaptive ODE propagation; only valid for
/// time-independent pairs.
pub fn propagate_two_sided_expm(pair: &HypothesisPair, t: f64) -> Result<ComplexMatrix> {
    let l = vectorize_two_sided(pair)?;
    let d = pair.dim();
    let propagator = expm(&l.scale(c64(t, 0.0)))?;
    let v = propagator.mul_vec(&pair.initial_rho01().vectorize());
    Ok(ComplexMatrix::from_vectorized(&v, d, d))
}

/// Full spectrum of the vectorized generator and the asymptotic
/// discrimination rate: the smallest |Re lambda| after filtering stationary
/// modes.
///
/// Reports an error if any eigenvalue has Re lambda > zero_tol; the
/// two-sided generator must be dissipative and a violation indicates a bad
/// input rather than a rate.
pub fn convergence_rate(pair: &HypothesisPair, zero_tol: f64) -> Result<SpectrumResult> {
    let l = vectorize_two_sided(pair)?;
    let eigenvalues = eig_general(&l)?;
    if let Some(bad) = eigenvalues.iter().find(|e| e.re > zero_tol) {
        return Err(Error::Numerical(format!(
            "two-sided generator has an eigenvalue with positive real part: {bad}"
        )));
    }
    let zero_modes = eigenvalues
        .iter()
        .filter(|e| e.re.abs() <= zero_tol)
        .count();
    let rate = eigenvalues
        .iter()
        .map(|e| e.re.abs())
        .filter(|&r| r > zero_tol)
        .fold(f64::INFINITY, f64::min);
    let rate = if rate.is_finite() { rate } else { 0.0 };
    Ok(SpectrumResult {
        eigenvalues,
        rate,
        zero_modes,
    })
}

/// Scan the convergence rate over a grid of Rabi frequencies at fixed
/// detuning. `builder(omega, delta)` supplies the hypothesis pair for each
/// grid point; scan points run in parallel.
pub fn scan_rate_over_rabi<B>(
    delta: f64,
    omega_grid: &[f64],
    builder: B,
) -> Result<RateScan>
where
    B: Fn(f64, f64) -> Result<HypothesisPair> + Sync,
{
    if omega_grid.is_empty() {
        return Err(Error::Validation("empty Rabi-frequency grid".into()));
    }
    if omega_grid.iter().any(|&w| w <= 0.0) {
        return Err(Error::Validation(
            "Rabi-frequency grid entries must be positive".into(),
        ));
    }
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "Rabi-frequency grid must be strictly increasing".into(),
        ));
    }

    let rates: Vec<f64> = omega_grid
        .par_iter()
        .map(|&omega| {
            let pair = builder(omega, delta)?;
            Ok(convergence_rate(&pair, ZERO_MODE_TOL)?.rate)
        })
        .collect::<Result<_>>()?;

    let m = rates
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let (argmax_omega, max_rate) = if m > 0 && m + 1 < rates.len() {
        parabolic_vertex(
            (omega_grid[m - 1], rates[m - 1]),
            (omega_grid[m], rates[m]),
            (omega_grid[m + 1], rates[m + 1]),
        )
        .unwrap_or((omega_grid[m], rates[m]))
    } else {
        (omega_grid[m], rates[m])
    };

    Ok(RateScan {
        detuning: delta,
        omegas: omega_grid.to_vec(),
        rates,
        argmax_omega,
        max_rate,
    })
}

/// Vertex of the parabola through three points, if one exists and falls
/// within the outer abscissae.
fn parabolic_vertex(
    (x1, y1): (f64, f64),
    (x2, y2): (f64, f64),
    (x3, y3): (f64, f64),
) -> Option<(f64, f64)> {
    let num = (x2 - x1).powi(2) * (y2 - y3) - (x2 - x3).powi(2) * (y2 - y1);
    let den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
    if den.abs() < 1e-300 {
        return None;
    }
    let x = x2 - 0.5 * num / den;
    if !(x1..=x3).contains(&x) {
        return None;
    }
    // Lagrange evaluation of the fitted parabola at the vertex.
    let l1 = (x - x2) * (x - x3) / ((x1 - x2) * (x1 - x3));
    let l2 = (x - x1) * (x - x3) / ((x2 - x1) * (x2 - x3));
    let l3 = (x - x1) * (x - x2) / ((x3 - x1) * (x3 - x2));
    Some((x, y1 * l1 + y2 * l2 + y3 * l3))
}

/// Fit the late-time exponential decay rate of |values(t)|.
///
/// Uses the local maxima of |values| inside the window (the envelope of an
/// oscillating decay); falls back to every window sample when the signal
/// does not oscillate. Returns the positive decay rate, i.e. minus the
/// slope of ln |values| versus time.
pub fn fit_log_decay_rate(
    times: &[f64],
    values: &[Complex64],
    window_start: f64,
) -> Result<f64> {
    if times.len() != values.len() || times.len() < 4 {
        return Err(Error::Validation(
            "decay fit needs matching time/value arrays with at least 4 samples".into(),
        ));
    }
    let in_window: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= window_start)
        .map(|(&t, v)| (t, v.norm()))
        .collect();
    if in_window.len() < 4 {
        return Err(Error::Validation(
            "decay-fit window contains fewer than 4 samples".into(),
        ));
    }

    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for w in in_window.windows(3) {
        if w[1].1 >= w[0].1 && w[1].1 >= w[2].1 && w[1].1 > 0.0 {
            peaks.push(w[1]);
        }
    }
    let samples: Vec<(f64, f64)> = if peaks.len() >= 3 {
        peaks
    } else {
        in_window.into_iter().filter(|&(_, m)| m > 0.0).collect()
    };
    if samples.len() < 2 {
        return Err(Error::Numerical(
            "decay fit found no usable magnitude samples".into(),
        ));
    }

    let n = samples.len() as f64;
    let t_mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let y_mean = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, m) in &samples {
        num += (t - t_mean) * (m.ln() - y_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    if den == 0.0 {
        return Err(Error::Numerical("degenerate decay-fit window".into()));
    }
    Ok(-num / den)
}

#[cfg(test)]
mod tests {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::{
        build_two_level, two_level_detuning_pair, two_level_rabi_pair, Hypothesis,
        HypothesisPair, TimeDependentHamiltonian, TwoLevelParams,
    };
    use crate::numerics::{uniform_grid, ComplexVector, OdeSettings};
    use crate::twosided::{solve_two_sided, two_sided_derivative};

    #[test]
    fn zero_pair_vectorizes_to_zero() {
        let h = TimeDependentHamiltonian::constant(ComplexMatrix::zeros(2, 2)).unwrap();
        let hyp = Hypothesis::new("null", h, vec![]).unwrap();
        let pair =
            HypothesisPair::new(hyp.clone(), hyp, ComplexVector::basis(2, 0)).unwrap();
        let l = vectorize_two_sided(&pair).unwrap();
        assert_eq!(l.max_abs_entry(), 0.0);
        assert_eq!(l.rows(), 4);
    }

    #[test]
    fn identical_hypotheses_have_a_stationary_mode() {
        let hyp = build_two_level(TwoLevelParams::new(2.0, 0.3, 1.0)).unwrap();
        let pair =
            HypothesisPair::new(hyp.clone(), hyp, ComplexVector::basis(2, 0)).unwrap();
        let spec = convergence_rate(&pair, ZERO_MODE_TOL).unwrap();
        assert!(spec.zero_modes >= 1, "expected a zero mode");
    }

    #[test]
    fn vectorization_matches_direct_derivative_on_random_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let pair = two_level_rabi_pair(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.1..2.0),
            )
            .unwrap();
            let l = vectorize_two_sided(&pair).unwrap();
            for _ in 0..10 {
                let entries = (0..4)
                    .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let rho = ComplexMatrix::new(2, 2, entries);
                let direct = two_sided_derivative(&pair, &rho, 0.0).unwrap();
                let via_l = ComplexMatrix::from_vectorized(
                    &l.mul_vec(&rho.vectorize()),
                    2,
                    2,
                );
                assert!(
                    (&direct - &via_l).max_abs_entry() < 1e-12,
                    "generator application mismatch"
                );
            }
        }
    }

    #[test]
    fn pure_decay_spectrum_is_known() {
        // Identical hypotheses, no drive: eigenvalues {0, -k/2, -k/2, -k},
        // so the slowest nonzero mode is the coherence decay k/2.
        let pair = two_level_rabi_pair(0.0, 0.0, 1.0).unwrap();
        let spec = convergence_rate(&pair, ZERO_MODE_TOL).unwrap();
        let mut expect = vec![0.0, -0.5, -0.5, -1.0];
        let mut got: Vec<f64> = spec.eigenvalues.iter().map(|e| e.re).collect();
        expect.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-10, "{g} vs {e}");
        }
        for e in &spec.eigenvalues {
            assert!(e.im.abs() < 1e-10);
        }
        assert!((spec.rate - 0.5).abs() < 1e-10);
        assert_eq!(spec.zero_modes, 1);
    }

    #[test]
    fn generator_trace_equals_eigenvalue_sum() {
        let pair = two_level_detuning_pair(0.8, 1.2, 1.0).unwrap();
        let l = vectorize_two_sided(&pair).unwrap();
        let spec = convergence_rate(&pair, ZERO_MODE_TOL).unwrap();
        let sum: Complex64 = spec.eigenvalues.iter().sum();
        let tr = l.trace();
        assert!(
            (sum - tr).norm() <= 1e-9 * tr.norm().max(1.0),
            "sum {sum} vs trace {tr}"
        );
    }

    #[test]
    fn generator_is_dissipative() {
        for &(omega, delta) in &[(0.3, 0.5), (0.75, 1.0), (1.5, 2.5)] {
            let pair = two_level_detuning_pair(omega, delta, 1.0).unwrap();
            let spec = convergence_rate(&pair, ZERO_MODE_TOL).unwrap();
            for e in &spec.eigenvalues {
                assert!(e.re <= ZERO_MODE_TOL, "eigenvalue {e} not dissipative");
            }
        }
    }

    #[test]
    fn detuning_discrimination_rate_vanishes_with_drive() {
        let weak = convergence_rate(
            &two_level_detuning_pair(0.01, 1.0, 1.0).unwrap(),
            ZERO_MODE_TOL,
        )
        .unwrap()
        .rate;
        let moderate = convergence_rate(
            &two_level_detuning_pair(0.5, 1.0, 1.0).unwrap(),
            ZERO_MODE_TOL,
        )
        .unwrap()
        .rate;
        assert!(weak < 0.1 * moderate, "weak {weak}, moderate {moderate}");
    }

    #[test]
    fn expm_propagation_matches_adaptive_ode() {
        let pair = two_level_rabi_pair(0.0, 4.0, 1.0).unwrap();
        let settings = OdeSettings::default();
        for &t in &[0.5, 1.0, 2.0] {
            let states =
                crate::twosided::solve_two_sided_states(&pair, &[0.0, t], &settings)
                    .unwrap();
            let via_expm = propagate_two_sided_expm(&pair, t).unwrap();
            let diff = (&states[1].rho01 - &via_expm).max_abs_entry();
            assert!(diff < 1e-8, "t = {t}: propagation mismatch {diff:.3e}");
        }
    }

    #[test]
    fn scan_refines_argmax_and_matches_long_time_decay() {
        // Coarse scan to keep the unit test fast; the acceptance suite runs
        // the full-resolution version.
        let grid: Vec<f64> = (1..=75).map(|i| 1.5 * i as f64 / 75.0).collect();
        let scan = scan_rate_over_rabi(1.0, &grid, |omega, delta| {
            two_level_detuning_pair(omega, delta, 1.0)
        })
        .unwrap();
        assert!(
            (scan.argmax_omega - 0.75).abs() < 0.05,
            "argmax {}",
            scan.argmax_omega
        );

        // The spectral rate must show up as the late-time slope of the
        // overlap decay.
        let pair = two_level_detuning_pair(scan.argmax_omega, 1.0, 1.0).unwrap();
        let rate = convergence_rate(&pair, ZERO_MODE_TOL).unwrap().rate;
        let grid_t = uniform_grid(0.0, 24.0, 601);
        let curve = solve_two_sided(&pair, &grid_t, &OdeSettings::default()).unwrap();
        let fitted = fit_log_decay_rate(&curve.times, &curve.overlaps, 8.0).unwrap();
        let rel = (fitted - rate).abs() / rate;
        assert!(rel < 0.02, "fitted {fitted}, spectral {rate}, rel {rel:.4}");
    }

    #[test]
    fn rejects_time_dependent_pairs() {
        use crate::model::DriveCoefficient;
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let driven = Hypothesis::new(
            "driven",
            TimeDependentHamiltonian::new(
                ComplexMatrix::zeros(2, 2),
                vec![(
                    DriveCoefficient::Sinusoid {
                        amplitude: 1.0,
                        angular_frequency: 2.0,
                        phase: 0.0,
                    },
                    sx,
                )],
            )
            .unwrap(),
            vec![],
        )
        .unwrap();
        let still = build_two_level(TwoLevelParams::default()).unwrap();
        let pair =
            HypothesisPair::new(driven, still, ComplexVector::basis(2, 0)).unwrap();
        assert!(matches!(
            vectorize_two_sided(&pair),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn decay_fit_recovers_synthetic_rate() {
        let times: Vec<f64> = (0..400).map(|i| 0.05 * i as f64).collect();
        let values: Vec<Complex64> = times
            .iter()
            .map(|&t| c64((-0.3 * t).exp() * (2.0 * t).cos(), 0.0))
            .collect();
        let rate = fit_log_decay_rate(&times, &values, 2.0).unwrap();
        assert!((rate - 0.3).abs() < 0.003, "rate {rate}");
    }
}
