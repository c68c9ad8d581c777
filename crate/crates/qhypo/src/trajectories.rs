//! Monte Carlo wavefunction verification of the two-sided solution.
//!
//! An ancilla qubit is prepended to the system; its basis states select
//! which hypothesis generates the dynamics, so Hamiltonian and jump
//! operators become block-diagonal on the doubled space. Standard quantum
//! jump trajectories of that augmented system reproduce the two-sided
//! overlap as twice the ensemble average of the ancilla raising operator.
//! This sampler is a statistical cross-check of the deterministic solver,
//! not a performance-oriented integrator: fixed step, first order in the
//! jump probability.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::HypothesisPair;
use crate::numerics::{c64, ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Per-step total jump probability above which the first-order unraveling
/// is rejected as unstable.
pub const JUMP_PROBABILITY_BOUND: f64 = 0.05;

/// Block-diagonal ancilla-plus-system model derived from a hypothesis pair.
#[derive(Debug, Clone)]
pub struct AugmentedModel {
    /// Doubled dimension 2d: ancilla index major, system index minor.
    pub dim: usize,
    /// diag(H0, H1).
    pub hamiltonian: ComplexMatrix,
    /// diag(c0_m, c1_m) for each channel pair m.
    pub channels: Vec<ComplexMatrix>,
    /// Ancilla raising operator |1><0| tensored with the system identity.
    pub sigma_plus: ComplexMatrix,
    /// Normalized initial state (|0> + |1>)/sqrt(2) tensor |psi(0)>.
    pub initial: ComplexVector,
}

/// Ensemble size, seed, and step for the jump unraveling.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Fixed step of the first-order unraveling (units 1/kappa).
    pub dt: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_traj: 1000,
            seed: 0,
            dt: 1e-3,
        }
    }
}

/// Ensemble mean of twice the ancilla coherence with its standard error.
#[derive(Debug, Clone)]
pub struct EnsembleEstimate {
    pub times: Vec<f64>,
    /// Mean over trajectories of 2 <sigma_A^+> on the normalized state.
    pub mean_overlap: Vec<Complex64>,
    /// Standard error of the complex mean at each grid time.
    pub std_err: Vec<f64>,
}

/// Assemble the block-diagonal augmented model for a hypothesis pair.
///
/// Requires time-independent hypotheses; the sampler precomputes constant
/// effective operators.
pub fn build_augmented(pair: &HypothesisPair) -> Result<AugmentedModel> {
    if !pair.is_time_independent() {
        return Err(Error::Validation(
            "trajectory sampling requires time-independent hypotheses".into(),
        ));
    }
    let d = pair.dim();
    let dim = 2 * d;

    let block_diag = |a: &ComplexMatrix, b: &ComplexMatrix| {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, a.get(i, j));
                m.set(d + i, d + j, b.get(i, j));
            }
        }
        m
    };

    let h0 = pair.hyp0.hamiltonian.constant_matrix()?;
    let h1 = pair.hyp1.hamiltonian.constant_matrix()?;
    let hamiltonian = block_diag(&h0, &h1);

    let channels: Vec<ComplexMatrix> = pair
        .channel_pairs()
        .map(|(c0, c1)| block_diag(c0.operator(), c1.operator()))
        .collect();

    let mut sigma_plus = ComplexMatrix::zeros(dim, dim);
    for s in 0..d {
        sigma_plus.set(d + s, s, Complex64::ONE);
    }

    let amp = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut initial = vec![Complex64::ZERO; dim];
    for s in 0..d {
        let v = pair.initial_state.entries()[s] * amp;
        initial[s] = v;
        initial[d + s] = v;
    }

    Ok(AugmentedModel {
        dim,
        hamiltonian,
        channels,
        sigma_plus,
        initial: ComplexVector::new(initial).normalized(),
    })
}

/// Twice the ancilla coherence on a normalized copy of `psi`.
fn two_sigma_plus_expectation(model: &AugmentedModel, psi: &ComplexVector) -> Complex64 {
    let d = model.dim / 2;
    let norm_sqr = psi.norm_sqr();
    let mut acc = Complex64::ZERO;
    for s in 0..d {
        // <psi| (|1><0| tensor I) |psi> = sum_s conj(psi_{1,s}) psi_{0,s}
        acc += psi.entries()[d + s].conj() * psi.entries()[s];
    }
    acc.scale(2.0 / norm_sqr)
}

/// Run the quantum-jump ensemble and record 2 <sigma_A^+> at grid times.
///
/// The grid must start at 0, be uniform, and have a spacing that is an
/// integer multiple of `cfg.dt`. Per step, jump m fires with probability
/// dt <c_m^dag c_m>; otherwise the state advances under the non-Hermitian
/// effective Hamiltonian (second-order Taylor of its exponential) and is
/// renormalized. Trajectory i draws from an independent, reproducible
/// substream: ChaCha8 seeded by `cfg.seed` with stream index i. Results are
/// bit-identical for a fixed (n_traj, seed, dt) regardless of thread count.
pub fn run_ensemble(
    model: &AugmentedModel,
    t_grid: &[f64],
    cfg: &EnsembleConfig,
) -> Result<EnsembleEstimate> {
    if cfg.n_traj == 0 {
        return Err(Error::Validation("ensemble needs at least 1 trajectory".into()));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::Validation("dt must be positive".into()));
    }
    if t_grid.len() < 2 {
        return Err(Error::Validation("time grid needs at least 2 points".into()));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::Validation("time grid must start at 0".into()));
    }
    let spacing = t_grid[1] - t_grid[0];
    for w in t_grid.windows(2) {
        if ((w[1] - w[0]) - spacing).abs() > 1e-9 * spacing.max(1.0) {
            return Err(Error::Validation("time grid must be uniform".into()));
        }
    }
    let steps_per_sample = (spacing / cfg.dt).round() as usize;
    if steps_per_sample == 0
        || (spacing - steps_per_sample as f64 * cfg.dt).abs() > 1e-9 * spacing
    {
        return Err(Error::Validation(format!(
            "grid spacing {spacing} is not an integer multiple of dt {}",
            cfg.dt
        )));
    }

    // Effective drift: psi -> (1 - i dt H_eff - dt^2/2 H_eff^2) psi, with
    // H_eff = H - (i/2) sum_m c_m^dag c_m. The second-order term removes the
    // dominant Taylor bias while the jump handling stays first order.
    let mut damp = ComplexMatrix::zeros(model.dim, model.dim);
    for c in &model.channels {
        damp = &damp + &c.adjoint().matmul(c);
    }
    let h_eff = &model.hamiltonian - &damp.scale(c64(0.0, 0.5));
    let step_op = {
        let eye = ComplexMatrix::identity(model.dim);
        let first = h_eff.scale(c64(0.0, -cfg.dt));
        let second = h_eff.matmul(&h_eff).scale(c64(-0.5 * cfg.dt * cfg.dt, 0.0));
        &(&eye + &first) + &second
    };
    let jump_rates: Vec<ComplexMatrix> = model
        .channels
        .iter()
        .map(|c| c.adjoint().matmul(c))
        .collect();

    let samples: Vec<Result<Vec<Complex64>>> = (0..cfg.n_traj)
        .into_par_iter()
        .map(|traj| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(traj as u64);
            run_single_trajectory(
                model,
                &step_op,
                &jump_rates,
                t_grid.len(),
                steps_per_sample,
                cfg.dt,
                &mut rng,
            )
        })
        .collect();

    // Deterministic reduction in trajectory order.
    let mut per_traj = Vec::with_capacity(cfg.n_traj);
    for s in samples {
        per_traj.push(s?);
    }
    let n = cfg.n_traj as f64;
    let mut mean_overlap = Vec::with_capacity(t_grid.len());
    let mut std_err = Vec::with_capacity(t_grid.len());
    for k in 0..t_grid.len() {
        let mut mean = Complex64::ZERO;
        for t in &per_traj {
            mean += t[k];
        }
        mean = mean.scale(1.0 / n);
        let mut var = 0.0;
        for t in &per_traj {
            var += (t[k] - mean).norm_sqr();
        }
        let var = if cfg.n_traj > 1 { var / (n - 1.0) } else { 0.0 };
        mean_overlap.push(mean);
        std_err.push((var / n).sqrt());
    }

    Ok(EnsembleEstimate {
        times: t_grid.to_vec(),
        mean_overlap,
        std_err,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_single_trajectory(
    model: &AugmentedModel,
    step_op: &ComplexMatrix,
    jump_rates: &[ComplexMatrix],
    n_samples: usize,
    steps_per_sample: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Complex64>> {
    let mut psi = model.initial.clone();
    let mut out = Vec::with_capacity(n_samples);
    out.push(two_sigma_plus_expectation(model, &psi));

    let mut probs = vec![0.0f64; jump_rates.len()];
    for _ in 1..n_samples {
        for _ in 0..steps_per_sample {
            let norm_sqr = psi.norm_sqr();
            let mut total = 0.0;
            for (m, rate_op) in jump_rates.iter().enumerate() {
                let expect = expectation(rate_op, &psi) / norm_sqr;
                probs[m] = dt * expect;
                total += probs[m];
            }
            if total >= JUMP_PROBABILITY_BOUND {
                return Err(Error::Validation(format!(
                    "dt {dt} violates the stability bound: step jump probability \
                     {total:.3} exceeds {JUMP_PROBABILITY_BOUND}"
                )));
            }
            let u: f64 = rng.random();
            if u < total {
                // Select the channel within the jump branch.
                let mut acc = 0.0;
                let mut chosen = jump_rates.len() - 1;
                for (m, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        chosen = m;
                        break;
                    }
                }
                psi = model.channels[chosen].mul_vec(&psi);
            } else {
                psi = step_op.mul_vec(&psi);
            }
            let norm = psi.norm();
            if !(norm > 0.0) || !psi.all_finite() {
                return Err(Error::Numerical(
                    "trajectory state collapsed to zero or NaN".into(),
                ));
            }
            psi = psi.scale(c64(1.0 / norm, 0.0));
        }
        out.push(two_sigma_plus_expectation(model, &psi));
    }
    Ok(out)
}

/// <psi| op |psi> real part (op Hermitian PSD by construction).
fn expectation(op: &ComplexMatrix, psi: &ComplexVector) -> f64 {
    psi.inner(&op.mul_vec(psi)).re
}
