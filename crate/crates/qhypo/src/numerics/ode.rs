//! Adaptive Dormand–Prince 5(4) integration for complex state vectors.
//!
//! Embedded error estimate with a PI step-size controller (Hairer, Nørsett &
//! Wanner, "Solving Ordinary Differential Equations I", §II.4). Solutions are
//! sampled by stepping exactly onto every requested grid time, so no dense
//! output interpolation is involved.

use num_complex::Complex64;

use super::matrix::ComplexVector;
use crate::{Error, Result};

/// Tolerances and limits for [`integrate_adaptive`].
#[derive(Debug, Clone)]
pub struct OdeSettings {
    /// Relative tolerance on the local error per step.
    pub rel_tol: f64,
    /// Absolute tolerance on the local error per step.
    pub abs_tol: f64,
    /// First trial step; non-positive selects one automatically.
    pub initial_step: f64,
    /// Cap on accepted plus rejected steps across the whole grid.
    pub max_steps: usize,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            initial_step: 0.0,
            max_steps: 1_000_000,
        }
    }
}

impl OdeSettings {
    /// Settings with tolerances tightened by the given factor.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Validation(
                "ODE tolerances must be positive".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::Validation("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (identical to the last A row; FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded fourth-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Uniform grid of `points` times from `start` to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs at least two points");
    assert!(end > start, "grid end must exceed start");
    let step = (end - start) / (points - 1) as f64;
    (0..points).map(|i| start + step * i as f64).collect()
}

/// Integrate y' = f(t, y) and return the solution at every grid time.
///
/// The grid must be strictly increasing; the first grid entry is the initial
/// time and maps to a copy of `y0`.
pub fn integrate_adaptive<F>(
    f: F,
    y0: &ComplexVector,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<ComplexVector>>
where
    F: Fn(f64, &ComplexVector) -> ComplexVector,
{
    settings.validate()?;
    if t_grid.is_empty() {
        return Err(Error::Validation("empty time grid".into()));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Validation(
                "time grid must be strictly increasing".into(),
            ));
        }
    }
    if !y0.all_finite() {
        return Err(Error::Numerical("initial state contains NaN/Inf".into()));
    }

    let dim = y0.dim();
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0.clone());
    if t_grid.len() == 1 {
        return Ok(out);
    }

    let mut t = t_grid[0];
    let mut y = y0.clone();
    let mut dy = eval(&f, t, &y)?;
    let span = t_grid[t_grid.len() - 1] - t_grid[0];
    let mut h = if settings.initial_step > 0.0 {
        settings.initial_step.min(span)
    } else {
        initial_step_guess(&y, &dy, span, settings)
    };
    let mut err_prev: f64 = 1.0;
    let mut steps = 0usize;

    for &t_target in &t_grid[1..] {
        while t < t_target {
            if steps >= settings.max_steps {
                return Err(Error::Numerical(format!(
                    "ODE step limit {} exceeded at t = {t:.6}",
                    settings.max_steps
                )));
            }
            steps += 1;

            let h_trial = h.min(t_target - t);
            let mut k: Vec<ComplexVector> = Vec::with_capacity(7);
            k.push(dy.clone());
            for stage in 0..6 {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    let a = A[stage][j];
                    if a != 0.0 {
                        ys = ys.axpy(Complex64::new(a * h_trial, 0.0), kj);
                    }
                }
                k.push(eval(&f, t + C[stage + 1] * h_trial, &ys)?);
            }

            let mut y5 = y.clone();
            let mut y4 = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    y5 = y5.axpy(Complex64::new(B5[j] * h_trial, 0.0), kj);
                }
                if B4[j] != 0.0 {
                    y4 = y4.axpy(Complex64::new(B4[j] * h_trial, 0.0), kj);
                }
            }
            if !y5.all_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite solution at t = {:.6}",
                    t + h_trial
                )));
            }

            // Weighted RMS error over components.
            let mut acc = 0.0;
            for i in 0..dim {
                let sc = settings.abs_tol
                    + settings.rel_tol * y.entries()[i].norm().max(y5.entries()[i].norm());
                let e = (y5.entries()[i] - y4.entries()[i]).norm() / sc;
                acc += e * e;
            }
            let err = (acc / dim as f64).sqrt().max(1e-30);

            if err <= 1.0 {
                t += h_trial;
                y = y5;
                // FSAL: the seventh stage is f at the accepted point.
                dy = k.pop().expect("seven stages");
                // PI controller (alpha = 0.7/5, beta = 0.4/5).
                let fac = 0.9 * err.powf(-0.14) * err_prev.powf(0.08);
                h = h_trial * fac.clamp(0.2, 5.0);
                err_prev = err;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                h = h_trial * fac;
            }
        }
        out.push(y.clone());
    }

    Ok(out)
}

fn eval<F>(f: &F, t: f64, y: &ComplexVector) -> Result<ComplexVector>
where
    F: Fn(f64, &ComplexVector) -> ComplexVector,
{
    let dy = f(t, y);
    if !dy.all_finite() {
        return Err(Error::Numerical(format!(
            "derivative returned NaN/Inf at t = {t:.6}"
        )));
    }
    Ok(dy)
}

/// Crude version of the standard starting-step heuristic.
fn initial_step_guess(
    y: &ComplexVector,
    dy: &ComplexVector,
    span: f64,
    settings: &OdeSettings,
) -> f64 {
    let d0 = y.norm();
    let d1 = dy.norm();
    let h = if d1 > 1e-10 {
        0.01 * (d0.max(settings.abs_tol) / d1)
    } else {
        1e-6 * span
    };
    h.clamp(1e-12 * span.max(1.0), span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{c64, ComplexMatrix};

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_solution_for_zero_derivative() {
        let y0 = ComplexVector::new(vec![c64(1.0, 2.0), c64(-0.5, 0.0)]);
        let sol = integrate_adaptive(
            |_, y| ComplexVector::zeros(y.dim()),
            &y0,
            &grid(3.0, 10),
            &OdeSettings::default(),
        )
        .unwrap();
        for s in &sol {
            assert_eq!(s, &y0);
        }
    }

    #[test]
    fn scalar_exponential_decay() {
        let y0 = ComplexVector::new(vec![Complex64::ONE]);
        let settings = OdeSettings::default();
        let sol = integrate_adaptive(
            |_, y| y.scale(c64(-1.0, 0.0)),
            &y0,
            &[0.0, 1.0],
            &settings,
        )
        .unwrap();
        let expect = (-1.0f64).exp();
        let got = sol[1].entries()[0].re;
        assert!(
            (got - expect).abs() <= 10.0 * settings.rel_tol * expect,
            "got {got}, expected {expect}"
        );
    }

    #[test]
    fn planar_rotation_closed_form() {
        // y' = A y with A = [[0,1],[-1,0]] rotates (1,0) to (0,-1) at t = pi/2.
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let y0 = ComplexVector::from_real(&[1.0, 0.0]);
        let settings = OdeSettings::default();
        let sol = integrate_adaptive(
            |_, y| a.mul_vec(y),
            &y0,
            &[0.0, std::f64::consts::FRAC_PI_2],
            &settings,
        )
        .unwrap();
        let end = &sol[1];
        assert!((end.entries()[0]).norm() < 1e-8);
        assert!((end.entries()[1] - c64(-1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn matches_matrix_exponential_on_random_linear_system() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;

        use crate::numerics::expm::expm;

        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let settings = OdeSettings::default();
        for _ in 0..5 {
            let entries = (0..16)
                .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let a = ComplexMatrix::new(4, 4, entries);
            let y0 = ComplexVector::new(
                (0..4)
                    .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            );
            let t = 1.5;
            let sol = integrate_adaptive(|_, y| a.mul_vec(y), &y0, &[0.0, t], &settings)
                .unwrap();
            let exact = expm(&a.scale(c64(t, 0.0))).unwrap().mul_vec(&y0);
            let diff = (&sol[1] - &exact).norm();
            let scale = exact.norm().max(1.0);
            assert!(
                diff <= 10.0 * settings.rel_tol * scale,
                "diff {diff:.3e} vs scale {scale:.3e}"
            );
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let y0 = ComplexVector::new(vec![Complex64::ONE]);
        let f = |_: f64, y: &ComplexVector| y.clone();
        assert!(integrate_adaptive(f, &y0, &[0.0, 0.0], &OdeSettings::default()).is_err());
        assert!(integrate_adaptive(f, &y0, &[1.0, 0.5], &OdeSettings::default()).is_err());
    }

    #[test]
    fn reports_step_limit() {
        let y0 = ComplexVector::new(vec![Complex64::ONE]);
        let settings = OdeSettings {
            max_steps: 3,
            ..OdeSettings::default()
        };
        // Stiff-ish oscillator forces many steps.
        let res = integrate_adaptive(
            |t, y| y.scale(c64(0.0, 1e4 * (1.0 + t))),
            &y0,
            &[0.0, 10.0],
            &settings,
        );
        assert!(matches!(res, Err(Error::Numerical(_))));
    }

    #[test]
    fn reports_nan_from_derivative() {
        let y0 = ComplexVector::new(vec![Complex64::ONE]);
        let res = integrate_adaptive(
            |t, y| {
                if t > 0.1 {
                    ComplexVector::new(vec![c64(f64::NAN, 0.0)])
                } else {
                    y.clone()
                }
            },
            &y0,
            &[0.0, 1.0],
            &OdeSettings::default(),
        );
        assert!(matches!(res, Err(Error::Numerical(_))));
    }
}
