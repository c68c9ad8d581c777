//! Time-domain propagation of the two-sided master equation
//!
//!   d/dt rho01 = -i (H0(t) rho01 - rho01 H1(t))
//!                + sum_m [ c0_m rho01 c1_m^dag
//!                          - 1/2 (c0_m^dag c0_m rho01 + rho01 c1_m^dag c1_m) ],
//!
//! whose solution's trace is the overlap of the joint system–environment
//! states under the two hypotheses. All left multiplications use
//! hypothesis-0 operators and all right multiplications hypothesis-1
//! operators; with identical hypotheses the equation reduces to the
//! ordinary Lindblad master equation, which `solve_lindblad` exposes
//! directly.

use num_complex::Complex64;

use crate::bounds::error_from_overlap;
use crate::model::{validate_density_matrix, Hypothesis, HypothesisPair, TimeDependentHamiltonian};
use crate::numerics::{c64, integrate_adaptive, ComplexMatrix, ComplexVector, OdeSettings};
use crate::{Error, Result};

/// The two-sided block rho01 at one instant. Generally non-Hermitian; its
/// trace is the system–environment overlap.
#[derive(Debug, Clone)]
pub struct TwoSidedState {
    pub rho01: ComplexMatrix,
    pub time: f64,
}

/// Overlap trace alpha(t) = Tr rho01(t) on a time grid, with the pointwise
/// minimal error probability 1/2 (1 - sqrt(1 - |alpha|^2)).
#[derive(Debug, Clone)]
pub struct OverlapCurve {
    pub times: Vec<f64>,
    pub overlaps: Vec<Complex64>,
    pub pe_min: Vec<f64>,
}

/// Density-matrix trajectory of a single-hypothesis Lindblad evolution.
#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
}

/// Precomputed right-hand side of the two-sided equation.
struct TwoSidedGenerator {
    dim: usize,
    h0: HamTerm,
    h1: HamTerm,
    /// (c0_m, c1_m^dag) pairs with zero channels dropped.
    channels: Vec<(ComplexMatrix, ComplexMatrix)>,
    /// 1/2 sum_m c0_m^dag c0_m.
    k0: ComplexMatrix,
    /// 1/2 sum_m c1_m^dag c1_m.
    k1: ComplexMatrix,
}

enum HamTerm {
    Constant(ComplexMatrix),
    TimeDependent(TimeDependentHamiltonian),
}

impl HamTerm {
    fn new(h: &TimeDependentHamiltonian) -> Result<Self> {
        Ok(if h.is_time_independent() {
            HamTerm::Constant(h.constant_matrix()?)
        } else {
            HamTerm::TimeDependent(h.clone())
        })
    }

    fn at(&self, t: f64) -> ComplexMatrix {
        match self {
            HamTerm::Constant(m) => m.clone(),
            HamTerm::TimeDependent(h) => h.at(t),
        }
    }
}

impl TwoSidedGenerator {
    fn new(hyp0: &Hypothesis, hyp1: &Hypothesis) -> Result<Self> {
        let dim = hyp0.dim();
        if hyp1.dim() != dim {
            return Err(Error::Dimension(format!(
                "hypothesis dimensions differ: {dim} vs {}",
                hyp1.dim()
            )));
        }
        let mut channels = Vec::new();
        let mut k0 = ComplexMatrix::zeros(dim, dim);
        let mut k1 = ComplexMatrix::zeros(dim, dim);
        let n = hyp0.channels.len().max(hyp1.channels.len());
        let zero = ComplexMatrix::zeros(dim, dim);
        for m in 0..n {
            let c0 = hyp0
                .channels
                .get(m)
                .map(|c| c.operator().clone())
                .unwrap_or_else(|| zero.clone());
            let c1 = hyp1
                .channels
                .get(m)
                .map(|c| c.operator().clone())
                .unwrap_or_else(|| zero.clone());
            k0 = &k0 + &c0.adjoint().matmul(&c0).scale(c64(0.5, 0.0));
            k1 = &k1 + &c1.adjoint().matmul(&c1).scale(c64(0.5, 0.0));
            if c0.max_abs_entry() > 0.0 || c1.max_abs_entry() > 0.0 {
                channels.push((c0, c1.adjoint()));
            }
        }
        Ok(Self {
            dim,
            h0: HamTerm::new(&hyp0.hamiltonian)?,
            h1: HamTerm::new(&hyp1.hamiltonian)?,
            channels,
            k0,
            k1,
        })
    }

    fn apply(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let h0 = self.h0.at(t);
        let h1 = self.h1.at(t);
        // -i (H0 rho - rho H1)
        let mut out =
            (&h0.matmul(rho) - &rho.matmul(&h1)).scale(c64(0.0, -1.0));
        // jump terms c0 rho c1^dag
        for (c0, c1_dag) in &self.channels {
            out = &out + &c0.matmul(rho).matmul(c1_dag);
        }
        // -(K0 rho + rho K1)
        out = &out - &self.k0.matmul(rho);
        out = &out - &rho.matmul(&self.k1);
        out
    }
}

/// Right-hand side of the two-sided equation at one instant.
pub fn two_sided_derivative(
    pair: &HypothesisPair,
    rho01: &ComplexMatrix,
    t: f64,
) -> Result<ComplexMatrix> {
    if !rho01.is_square() || rho01.rows() != pair.dim() {
        return Err(Error::Dimension(format!(
            "rho01 must be {0}x{0}, got {1}x{2}",
            pair.dim(),
            rho01.rows(),
            rho01.cols()
        )));
    }
    let gen = TwoSidedGenerator::new(&pair.hyp0, &pair.hyp1)?;
    Ok(gen.apply(t, rho01))
}

fn propagate(
    gen: &TwoSidedGenerator,
    initial: &ComplexMatrix,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<ComplexMatrix>> {
    let dim = gen.dim;
    let y0 = ComplexVector::new(initial.entries().to_vec());
    let rhs = |t: f64, y: &ComplexVector| {
        let rho = ComplexMatrix::new(dim, dim, y.entries().to_vec());
        let d = gen.apply(t, &rho);
        ComplexVector::new(d.entries().to_vec())
    };
    let states = integrate_adaptive(rhs, &y0, t_grid, settings)?;
    Ok(states
        .into_iter()
        .map(|y| ComplexMatrix::new(dim, dim, y.entries().to_vec()))
        .collect())
}

fn check_grid_starts_at_zero(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        Some(&t0) if t0 == 0.0 => Ok(()),
        Some(&t0) => Err(Error::Validation(format!(
            "time grid must start at 0, got {t0}"
        ))),
        None => Err(Error::Validation("empty time grid".into())),
    }
}

/// Solve the two-sided equation from the pair's pure initial state and
/// report the overlap trace with the minimal error probability per time.
pub fn solve_two_sided(
    pair: &HypothesisPair,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<OverlapCurve> {
    let states = solve_two_sided_states(pair, t_grid, settings)?;
    let mut overlaps = Vec::with_capacity(states.len());
    let mut pe_min = Vec::with_capacity(states.len());
    for s in &states {
        let alpha = s.rho01.trace();
        overlaps.push(alpha);
        pe_min.push(error_from_overlap(alpha)?);
    }
    Ok(OverlapCurve {
        times: t_grid.to_vec(),
        overlaps,
        pe_min,
    })
}

/// Same propagation as [`solve_two_sided`] but keeping each full rho01
/// block (dense storage at every grid point).
pub fn solve_two_sided_states(
    pair: &HypothesisPair,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<TwoSidedState>> {
    check_grid_starts_at_zero(t_grid)?;
    let gen = TwoSidedGenerator::new(&pair.hyp0, &pair.hyp1)?;
    let states = propagate(&gen, &pair.initial_rho01(), t_grid, settings)?;
    Ok(states
        .into_iter()
        .zip(t_grid)
        .map(|(rho01, &time)| TwoSidedState { rho01, time })
        .collect())
}

/// Two-sided trace evolution from an arbitrary (possibly mixed) initial
/// block.
///
/// For mixed initial states the trace is still well defined, but it is not
/// the overlap of pure joint states, so no minimal-error probability is
/// attached here.
pub fn two_sided_trace(
    hyp0: &Hypothesis,
    hyp1: &Hypothesis,
    initial_rho01: &ComplexMatrix,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<Complex64>> {
    check_grid_starts_at_zero(t_grid)?;
    if !initial_rho01.is_square() || initial_rho01.rows() != hyp0.dim() {
        return Err(Error::Dimension(format!(
            "initial rho01 must be {0}x{0}",
            hyp0.dim()
        )));
    }
    let gen = TwoSidedGenerator::new(hyp0, hyp1)?;
    let states = propagate(&gen, initial_rho01, t_grid, settings)?;
    Ok(states.iter().map(|m| m.trace()).collect())
}

/// Trace-preserving Lindblad evolution of a density matrix under a single
/// hypothesis (the diagonal special case of the two-sided equation).
pub fn solve_lindblad(
    hyp: &Hypothesis,
    initial: &ComplexMatrix,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<DensityTrajectory> {
    check_grid_starts_at_zero(t_grid)?;
    if initial.rows() != hyp.dim() || initial.cols() != hyp.dim() {
        return Err(Error::Dimension(format!(
            "initial state must be {0}x{0}, got {1}x{2}",
            hyp.dim(),
            initial.rows(),
            initial.cols()
        )));
    }
    validate_density_matrix(initial, 1e-9)?;
    let gen = TwoSidedGenerator::new(hyp, hyp)?;
    let states = propagate(&gen, initial, t_grid, settings)?;
    Ok(DensityTrajectory {
        times: t_grid.to_vec(),
        states,
    })
}
