//! Hypotheses about an open quantum system: Hamiltonians (possibly driven),
//! Lindblad channels, initial states, and the two-level atom preset.
//!
//! Conventions: basis order (|g>, |e>) for the two-level preset, hbar = 1,
//! rates in units of kappa. Decay rates are absorbed into the channel
//! operators, c = sqrt(kappa) |g><e|, so no rate is stored separately.

use num_complex::Complex64;

use crate::numerics::{c64, ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Hermiticity tolerance for Hamiltonian operators.
pub const HAMILTONIAN_HERMITICITY_TOL: f64 = 1e-12;
/// Normalization tolerance for initial states.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// A single Lindblad channel. Any rate is absorbed into the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladChannel {
    operator: ComplexMatrix,
}

impl LindbladChannel {
    pub fn new(operator: ComplexMatrix) -> Result<Self> {
        if !operator.is_square() {
            return Err(Error::Dimension(format!(
                "channel operator must be square, got {}x{}",
                operator.rows(),
                operator.cols()
            )));
        }
        if !operator.all_finite() {
            return Err(Error::Validation("channel operator contains NaN/Inf".into()));
        }
        Ok(Self { operator })
    }

    /// The zero channel in the given dimension (used for padding).
    pub fn zero(dim: usize) -> Self {
        Self {
            operator: ComplexMatrix::zeros(dim, dim),
        }
    }

    #[inline]
    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.operator.rows()
    }
}

/// Scalar drive envelope multiplying a Hamiltonian term.
#[derive(Debug, Clone, PartialEq)]
pub enum DriveCoefficient {
    /// Time-independent coefficient.
    Constant(f64),
    /// Step function: `values[i]` on `[edges[i], edges[i+1])`; the last value
    /// extends to infinity and the first backwards to -infinity.
    PiecewiseConstant { edges: Vec<f64>, values: Vec<f64> },
    /// amplitude * cos(angular_frequency * t + phase).
    Sinusoid {
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
}

impl DriveCoefficient {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            DriveCoefficient::Constant(v) => *v,
            DriveCoefficient::PiecewiseConstant { edges, values } => {
                let idx = edges.partition_point(|&e| e <= t);
                if idx == 0 {
                    values[0]
                } else {
                    values[(idx - 1).min(values.len() - 1)]
                }
            }
            DriveCoefficient::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
            } => amplitude * (angular_frequency * t + phase).cos(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DriveCoefficient::Constant(_))
    }
}

/// Hamiltonian with a constant part plus scalar-envelope drive terms:
/// H(t) = H0 + sum_j f_j(t) H_j.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentHamiltonian {
    constant_part: ComplexMatrix,
    drive_terms: Vec<(DriveCoefficient, ComplexMatrix)>,
}

impl TimeDependentHamiltonian {
    pub fn constant(h: ComplexMatrix) -> Result<Self> {
        Self::new(h, Vec::new())
    }

    pub fn new(
        constant_part: ComplexMatrix,
        drive_terms: Vec<(DriveCoefficient, ComplexMatrix)>,
    ) -> Result<Self> {
        let dim = constant_part.rows();
        let check = |m: &ComplexMatrix, what: &str| -> Result<()> {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::Dimension(format!(
                    "{what} must be {dim}x{dim}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_hermitian(HAMILTONIAN_HERMITICITY_TOL) {
                return Err(Error::Validation(format!(
                    "{what} is not Hermitian (defect {:.3e})",
                    m.hermiticity_defect()
                )));
            }
            Ok(())
        };
        check(&constant_part, "Hamiltonian constant part")?;
        for (idx, (coeff, op)) in drive_terms.iter().enumerate() {
            check(op, &format!("drive term {idx}"))?;
            if let DriveCoefficient::PiecewiseConstant { edges, values } = coeff {
                if values.is_empty() || edges.len() != values.len() {
                    return Err(Error::Validation(format!(
                        "drive term {idx}: piecewise envelope needs one edge per value"
                    )));
                }
                if edges.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Validation(format!(
                        "drive term {idx}: piecewise edges must be increasing"
                    )));
                }
            }
        }
        Ok(Self {
            constant_part,
            drive_terms,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.constant_part.rows()
    }

    pub fn is_time_independent(&self) -> bool {
        self.drive_terms.iter().all(|(c, _)| c.is_constant())
    }

    /// Evaluate H(t).
    pub fn at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.constant_part.clone();
        for (coeff, op) in &self.drive_terms {
            let f = coeff.at(t);
            if f != 0.0 {
                h = &h + &op.scale(c64(f, 0.0));
            }
        }
        h
    }

    /// The full operator when time-independent, folding constant drives in.
    pub fn constant_matrix(&self) -> Result<ComplexMatrix> {
        if !self.is_time_independent() {
            return Err(Error::Validation(
                "Hamiltonian is time-dependent; this code path requires a constant one"
                    .into(),
            ));
        }
        Ok(self.at(0.0))
    }
}

/// One candidate description of the system: a Hamiltonian plus channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub label: String,
    pub hamiltonian: TimeDependentHamiltonian,
    pub channels: Vec<LindbladChannel>,
}

impl Hypothesis {
    pub fn new(
        label: impl Into<String>,
        hamiltonian: TimeDependentHamiltonian,
        channels: Vec<LindbladChannel>,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        for (idx, ch) in channels.iter().enumerate() {
            if ch.dim() != dim {
                return Err(Error::Dimension(format!(
                    "channel {idx} has dimension {} but the Hamiltonian is {dim}x{dim}",
                    ch.dim()
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            hamiltonian,
            channels,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn is_time_independent(&self) -> bool {
        self.hamiltonian.is_time_independent()
    }
}

/// Two hypotheses sharing an initial pure system state.
///
/// Construction pads the shorter channel list with zero operators so both
/// hypotheses expose the same number of channels.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    pub hyp0: Hypothesis,
    pub hyp1: Hypothesis,
    pub initial_state: ComplexVector,
}

impl HypothesisPair {
    pub fn new(
        hyp0: Hypothesis,
        hyp1: Hypothesis,
        initial_state: ComplexVector,
    ) -> Result<Self> {
        let pair = Self {
            hyp0,
            hyp1,
            initial_state,
        };
        validate_pair(pair)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.hyp0.dim()
    }

    pub fn is_time_independent(&self) -> bool {
        self.hyp0.is_time_independent() && self.hyp1.is_time_independent()
    }

    /// Initial two-sided block |psi><psi| built from the shared pure state.
    pub fn initial_rho01(&self) -> ComplexMatrix {
        self.initial_state.outer(&self.initial_state)
    }

    /// Channel pairs (c0_m, c1_m) after padding.
    pub fn channel_pairs(&self) -> impl Iterator<Item = (&LindbladChannel, &LindbladChannel)> {
        self.hyp0.channels.iter().zip(self.hyp1.channels.iter())
    }
}

/// Check all pair invariants and pad the shorter channel list with zero
/// operators. Returns the validated (possibly padded) pair.
pub fn validate_pair(mut pair: HypothesisPair) -> Result<HypothesisPair> {
    let dim = pair.hyp0.dim();
    if pair.hyp1.dim() != dim {
        return Err(Error::Dimension(format!(
            "hypothesis dimensions differ: {} vs {}",
            dim,
            pair.hyp1.dim()
        )));
    }
    if pair.initial_state.dim() != dim {
        return Err(Error::Dimension(format!(
            "initial state dimension {} does not match system dimension {dim}",
            pair.initial_state.dim()
        )));
    }
    if !pair.initial_state.all_finite() {
        return Err(Error::Validation("initial state contains NaN/Inf".into()));
    }
    let norm = pair.initial_state.norm();
    if (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::Validation(format!(
            "initial state is unnormalized: |psi| = {norm:.12}"
        )));
    }
    let n = pair.hyp0.channels.len().max(pair.hyp1.channels.len());
    pair.hyp0
        .channels
        .resize(n, LindbladChannel::zero(dim));
    pair.hyp1
        .channels
        .resize(n, LindbladChannel::zero(dim));
    Ok(pair)
}

/// Parameters of the driven, decaying two-level atom (units of kappa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    /// Rabi frequency of the resonant drive.
    pub rabi: f64,
    /// Detuning; enters as +detuning |e><e| (excited-state energy shift).
    pub detuning: f64,
    /// Excited-state decay rate.
    pub kappa: f64,
}

impl Default for TwoLevelParams {
    fn default() -> Self {
        Self {
            rabi: 0.0,
            detuning: 0.0,
            kappa: 1.0,
        }
    }
}

impl TwoLevelParams {
    pub fn new(rabi: f64, detuning: f64, kappa: f64) -> Self {
        Self {
            rabi,
            detuning,
            kappa,
        }
    }
}

/// Two-level atom preset in the (|g>, |e>) basis:
/// H = (rabi/2)(|e><g| + |g><e|) + detuning |e><e|, one decay channel
/// c = sqrt(kappa) |g><e|.
pub fn build_two_level(p: TwoLevelParams) -> Result<Hypothesis> {
    if p.kappa < 0.0 {
        return Err(Error::Validation(format!(
            "decay rate must be non-negative, got {}",
            p.kappa
        )));
    }
    let h = ComplexMatrix::from_real_rows(&[
        vec![0.0, p.rabi / 2.0],
        vec![p.rabi / 2.0, p.detuning],
    ]);
    let mut c = ComplexMatrix::zeros(2, 2);
    c.set(0, 1, c64(p.kappa.sqrt(), 0.0));
    Ok(Hypothesis::new(
        format!("two_level(rabi={}, detuning={}, kappa={})", p.rabi, p.detuning, p.kappa),
        TimeDependentHamiltonian::constant(h)?,
        vec![LindbladChannel::new(c)?],
    )?)
}

/// Pair of two-level hypotheses differing in Rabi frequency, both decaying
/// at rate kappa, started from the ground state.
pub fn two_level_rabi_pair(omega0: f64, omega1: f64, kappa: f64) -> Result<HypothesisPair> {
    HypothesisPair::new(
        build_two_level(TwoLevelParams::new(omega0, 0.0, kappa))?,
        build_two_level(TwoLevelParams::new(omega1, 0.0, kappa))?,
        ComplexVector::basis(2, 0),
    )
}

/// Pair of two-level hypotheses sharing a drive strength but differing in
/// detuning (0 vs `delta`), both decaying at rate kappa, started from the
/// ground state.
pub fn two_level_detuning_pair(omega: f64, delta: f64, kappa: f64) -> Result<HypothesisPair> {
    HypothesisPair::new(
        build_two_level(TwoLevelParams::new(omega, 0.0, kappa))?,
        build_two_level(TwoLevelParams::new(omega, delta, kappa))?,
        ComplexVector::basis(2, 0),
    )
}

/// A density matrix must be Hermitian, unit trace, and PSD up to `tol`.
pub fn validate_density_matrix(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::Dimension("density matrix must be square".into()));
    }
    if !rho.is_hermitian(tol.max(1e-10)) {
        return Err(Error::Validation(format!(
            "density matrix is not Hermitian (defect {:.3e})",
            rho.hermiticity_defect()
        )));
    }
    let tr = rho.trace();
    if (tr - Complex64::ONE).norm() > tol.max(1e-10) {
        return Err(Error::Validation(format!(
            "density matrix trace is {tr} instead of 1"
        )));
    }
    let eig = crate::numerics::eig_hermitian(rho)?;
    if eig.values[0] < -tol.max(1e-10) {
        return Err(Error::Validation(format!(
            "density matrix has negative eigenvalue {:.3e}",
            eig.values[0]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_zero_drive() {
        let h = build_two_level(TwoLevelParams::new(0.0, 0.0, 1.0)).unwrap();
        let ham = h.hamiltonian.constant_matrix().unwrap();
        assert_eq!(ham, ComplexMatrix::zeros(2, 2));
        let expect = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(h.channels[0].operator(), &expect);
    }

    #[test]
    fn two_level_rabi_four() {
        let h = build_two_level(TwoLevelParams::new(4.0, 0.0, 1.0)).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]);
        assert_eq!(h.hamiltonian.constant_matrix().unwrap(), expect);
    }

    #[test]
    fn two_level_detuning_only() {
        let h = build_two_level(TwoLevelParams::new(0.0, 0.5, 1.0)).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 0.5]]);
        assert_eq!(h.hamiltonian.constant_matrix().unwrap(), expect);
    }

    #[test]
    fn two_level_hamiltonian_is_exactly_hermitian() {
        for &(o, d) in &[(0.3, -1.2), (4.0, 0.0), (-2.0, 2.5)] {
            let h = build_two_level(TwoLevelParams::new(o, d, 1.0)).unwrap();
            assert_eq!(
                h.hamiltonian.constant_matrix().unwrap().hermiticity_defect(),
                0.0
            );
        }
    }

    #[test]
    fn negative_kappa_rejected() {
        assert!(matches!(
            build_two_level(TwoLevelParams::new(1.0, 0.0, -0.5)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn well_formed_pair_accepted_unchanged() {
        let pair = two_level_rabi_pair(0.0, 4.0, 1.0).unwrap();
        assert_eq!(pair.hyp0.channels.len(), 1);
        assert_eq!(pair.hyp1.channels.len(), 1);
        assert_eq!(pair.initial_state, ComplexVector::basis(2, 0));
    }

    #[test]
    fn uneven_channel_lists_are_padded() {
        let mut hyp0 = build_two_level(TwoLevelParams::new(0.0, 0.0, 1.0)).unwrap();
        let hyp1 = build_two_level(TwoLevelParams::new(1.0, 0.0, 1.0)).unwrap();
        hyp0.channels.clear();
        hyp0.channels
            .push(LindbladChannel::new(ComplexMatrix::zeros(2, 2)).unwrap());
        let mut hyp1 = hyp1;
        hyp1.channels
            .push(LindbladChannel::new(ComplexMatrix::identity(2)).unwrap());

        let pair =
            HypothesisPair::new(hyp0, hyp1, ComplexVector::basis(2, 0)).unwrap();
        assert_eq!(pair.hyp0.channels.len(), 2);
        assert_eq!(pair.hyp1.channels.len(), 2);
        assert_eq!(pair.hyp0.channels[1], LindbladChannel::zero(2));
    }

    #[test]
    fn unnormalized_initial_state_rejected() {
        let state = ComplexVector::from_real(&[0.9, 0.0]);
        let res = HypothesisPair::new(
            build_two_level(TwoLevelParams::default()).unwrap(),
            build_two_level(TwoLevelParams::default()).unwrap(),
            state,
        );
        match res {
            Err(Error::Validation(msg)) => assert!(msg.contains("unnormalized")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let hyp0 = build_two_level(TwoLevelParams::default()).unwrap();
        let h3 = TimeDependentHamiltonian::constant(ComplexMatrix::zeros(3, 3)).unwrap();
        let hyp1 = Hypothesis::new("three-level", h3, vec![]).unwrap();
        assert!(matches!(
            HypothesisPair::new(hyp0, hyp1, ComplexVector::basis(2, 0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(
            TimeDependentHamiltonian::constant(m),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn piecewise_envelope_evaluates_as_step_function() {
        let coeff = DriveCoefficient::PiecewiseConstant {
            edges: vec![0.0, 1.0, 2.0],
            values: vec![1.0, -1.0, 0.5],
        };
        assert_eq!(coeff.at(-0.5), 1.0);
        assert_eq!(coeff.at(0.0), 1.0);
        assert_eq!(coeff.at(0.99), 1.0);
        assert_eq!(coeff.at(1.0), -1.0);
        assert_eq!(coeff.at(1.99), -1.0);
        assert_eq!(coeff.at(2.0), 0.5);
        assert_eq!(coeff.at(10.0), 0.5);
    }

    #[test]
    fn sinusoid_envelope() {
        let coeff = DriveCoefficient::Sinusoid {
            amplitude: 2.0,
            angular_frequency: std::f64::consts::PI,
            phase: 0.0,
        };
        assert!((coeff.at(0.0) - 2.0).abs() < 1e-15);
        assert!(coeff.at(0.5).abs() < 1e-15);
        assert!((coeff.at(1.0) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn time_dependent_hamiltonian_evaluation() {
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let h = TimeDependentHamiltonian::new(
            ComplexMatrix::zeros(2, 2),
            vec![(
                DriveCoefficient::Sinusoid {
                    amplitude: 3.0,
                    angular_frequency: 1.0,
                    phase: 0.0,
                },
                sx.clone(),
            )],
        )
        .unwrap();
        assert!(!h.is_time_independent());
        assert!(h.constant_matrix().is_err());
        let at_zero = h.at(0.0);
        assert_eq!(at_zero, sx.scale(c64(3.0, 0.0)));
    }
}
