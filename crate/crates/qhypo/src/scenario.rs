//! Scenario files: the JSON description of a hypothesis pair accepted by
//! the command-line interface.
//!
//! A scenario carries the system dimension, a pure initial state, exactly
//! two hypotheses (each a Hamiltonian plus Lindblad channels, given either
//! as a named preset or as an explicit matrix), and a default time grid.
//! Complex numbers are two-element [re, im] arrays throughout; matrices
//! are nested row-major arrays of them.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "initial_state": { "type": "pure", "vector": [[1.0, 0.0], [0.0, 0.0]] },
//!   "hypotheses": [
//!     { "hamiltonian": { "preset": "two_level", "rabi": 0.0, "detuning": 0.0 },
//!       "channels": [ { "preset": "decay", "kappa": 1.0 } ] },
//!     { "hamiltonian": { "preset": "two_level", "rabi": 4.0, "detuning": 0.0 },
//!       "channels": [ { "preset": "decay", "kappa": 1.0 } ] }
//!   ],
//!   "time": { "t_max": 5.0, "steps": 500 }
//! }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{
    build_two_level, Hypothesis, HypothesisPair, LindbladChannel, TimeDependentHamiltonian,
    TwoLevelParams,
};
use crate::numerics::{c64, ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Parsed scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dimension: usize,
    pub initial_state: InitialStateSpec,
    pub hypotheses: Vec<HypothesisSpec>,
    pub time: TimeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
pub enum InitialStateSpec {
    Pure { vector: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisSpec {
    pub hamiltonian: OperatorSpec,
    pub channels: Vec<ChannelSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Preset(TwoLevelPresetSpec),
    Matrix(MatrixSpec),
}

/// Two-level atom Hamiltonian preset. The decay rate is accepted here for
/// symmetry with [`TwoLevelParams`] but only affects channels, never the
/// Hamiltonian itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelPresetSpec {
    pub preset: String,
    pub rabi: f64,
    pub detuning: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Preset(DecayPresetSpec),
    Matrix(MatrixSpec),
}

/// Spontaneous-decay channel preset, sqrt(kappa) |g><e| (dimension 2 only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayPresetSpec {
    pub preset: String,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_max: f64,
    pub steps: usize,
}

fn default_kappa() -> f64 {
    1.0
}

/// Parse a scenario document from JSON text.
pub fn parse_scenario(input: &str) -> Result<ScenarioFile> {
    serde_json::from_str(input)
        .map_err(|e| Error::Validation(format!("scenario parse error: {e}")))
}

/// Read and parse a scenario file from disk.
pub fn load_scenario(path: &std::path::Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

impl MatrixSpec {
    fn to_matrix(&self, dim: usize, what: &str) -> Result<ComplexMatrix> {
        if self.matrix.len() != dim || self.matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::Validation(format!(
                "{what}: matrix must be {dim}x{dim}"
            )));
        }
        let rows: Vec<Vec<Complex64>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&[re, im]| c64(re, im)).collect())
            .collect();
        let m = ComplexMatrix::from_rows(&rows);
        if !m.all_finite() {
            return Err(Error::Validation(format!(
                "{what}: matrix entries must be finite"
            )));
        }
        Ok(m)
    }
}

impl ScenarioFile {
    /// Validate the document and build the hypothesis pair it describes.
    pub fn build_pair(&self) -> Result<HypothesisPair> {
        if self.dimension == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        if self.hypotheses.len() != 2 {
            return Err(Error::Validation(format!(
                "a scenario needs exactly two hypotheses, found {}",
                self.hypotheses.len()
            )));
        }
        if !(self.time.t_max > 0.0) || !self.time.t_max.is_finite() {
            return Err(Error::Validation("time.t_max must be positive".into()));
        }
        if self.time.steps == 0 {
            return Err(Error::Validation("time.steps must be at least 1".into()));
        }

        let initial = match &self.initial_state {
            InitialStateSpec::Pure { vector } => {
                if vector.len() != self.dimension {
                    return Err(Error::Validation(format!(
                        "initial state has {} entries but dimension is {}",
                        vector.len(),
                        self.dimension
                    )));
                }
                let entries: Vec<Complex64> =
                    vector.iter().map(|&[re, im]| c64(re, im)).collect();
                ComplexVector::new(entries)
            }
        };

        let hyp0 = self.build_hypothesis(0)?;
        let hyp1 = self.build_hypothesis(1)?;
        HypothesisPair::new(hyp0, hyp1, initial)
    }

    fn build_hypothesis(&self, index: usize) -> Result<Hypothesis> {
        let spec = &self.hypotheses[index];
        let label = format!("hypothesis {index}");

        let hamiltonian = match &spec.hamiltonian {
            OperatorSpec::Preset(p) => {
                if p.preset != "two_level" {
                    return Err(Error::Validation(format!(
                        "{label}: unknown Hamiltonian preset '{}'",
                        p.preset
                    )));
                }
                if self.dimension != 2 {
                    return Err(Error::Validation(format!(
                        "{label}: the two_level preset needs dimension 2"
                    )));
                }
                build_two_level(TwoLevelParams::new(p.rabi, p.detuning, p.kappa))?
                    .hamiltonian
            }
            OperatorSpec::Matrix(m) => TimeDependentHamiltonian::constant(
                m.to_matrix(self.dimension, &format!("{label} Hamiltonian"))?,
            )?,
        };

        let mut channels = Vec::with_capacity(spec.channels.len());
        for (ci, ch) in spec.channels.iter().enumerate() {
            let op = match ch {
                ChannelSpec::Preset(p) => {
                    if p.preset != "decay" {
                        return Err(Error::Validation(format!(
                            "{label}: unknown channel preset '{}'",
                            p.preset
                        )));
                    }
                    if self.dimension != 2 {
                        return Err(Error::Validation(format!(
                            "{label}: the decay preset needs dimension 2"
                        )));
                    }
                    if p.kappa < 0.0 {
                        return Err(Error::Validation(format!(
                            "{label}: decay rate must be non-negative"
                        )));
                    }
                    let mut c = ComplexMatrix::zeros(2, 2);
                    c.set(0, 1, c64(p.kappa.sqrt(), 0.0));
                    c
                }
                ChannelSpec::Matrix(m) => {
                    m.to_matrix(self.dimension, &format!("{label} channel {ci}"))?
                }
            };
            channels.push(LindbladChannel::new(op)?);
        }

        Hypothesis::new(label, hamiltonian, channels)
    }

    /// Default time grid of the scenario: steps + 1 uniform points on
    /// [0, t_max].
    pub fn time_grid(&self) -> Vec<f64> {
        grid_from(self.time.t_max, self.time.steps)
    }
}

/// steps + 1 uniform points on [0, t_max].
pub fn grid_from(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| t_max * i as f64 / steps as f64)
        .collect()
}

/// The zero-drive vs driven two-level scenario as a document, mirroring
/// [`crate::model::two_level_rabi_pair`].
pub fn two_level_rabi_scenario(
    omega0: f64,
    omega1: f64,
    kappa: f64,
    t_max: f64,
    steps: usize,
) -> ScenarioFile {
    let hyp = |rabi: f64| HypothesisSpec {
        hamiltonian: OperatorSpec::Preset(TwoLevelPresetSpec {
            preset: "two_level".into(),
            rabi,
            detuning: 0.0,
            kappa,
        }),
        channels: vec![ChannelSpec::Preset(DecayPresetSpec {
            preset: "decay".into(),
            kappa,
        })],
    };
    ScenarioFile {
        dimension: 2,
        initial_state: InitialStateSpec::Pure {
            vector: vec![[1.0, 0.0], [0.0, 0.0]],
        },
        hypotheses: vec![hyp(omega0), hyp(omega1)],
        time: TimeSpec { t_max, steps },
    }
}
