// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: a TOML document with one table per concern.
//! Unknown keys are rejected and every cross-field constraint is checked at
//! load time with the dotted path of the offending key.

use std::path::Path;

use mmrabi::circuitmap::CircuitParams;
use mmrabi::dynamics::{ModeWeights, NoiseModel, ReleaseConfig};
use mmrabi::hilbert::{ModelDims, Parity};
use mmrabi::operators::{CouplingKind, RabiParams};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for randomized checks; `--seed` overrides it.
    pub seed: Option<u64>,
    pub model: Option<ModelSection>,
    pub sweep: Option<SweepSection>,
    pub dark: Option<DarkSection>,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub noise: NoiseSection,
    pub release: Option<ReleaseSection>,
    #[serde(default)]
    pub solver: SolverSection,
    pub circuit: Option<CircuitParams>,
    pub frame: Option<FrameSection>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    #[default]
    Rabi,
    Jc,
}

impl From<Coupling> for CouplingKind {
    fn from(c: Coupling) -> Self {
        match c {
            Coupling::Rabi => CouplingKind::Rabi,
            Coupling::Jc => CouplingKind::JaynesCummings,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    Even,
    Odd,
    /// Each parity sector separately.
    #[default]
    Both,
    /// The unrestricted space.
    Full,
}

impl Sector {
    /// Sectors to diagonalize separately; `None` is the full space.
    pub fn sectors(self) -> Vec<Option<Parity>> {
        match self {
            Sector::Even => vec![Some(Parity::Even)],
            Sector::Odd => vec![Some(Parity::Odd)],
            Sector::Both => vec![Some(Parity::Even), Some(Parity::Odd)],
            Sector::Full => vec![None],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub modes: usize,
    pub qubits: usize,
    /// Cutoff on the total photon number.
    pub n_max: usize,
    /// Mode frequencies, one per mode.
    pub omega: Vec<f64>,
    /// Qubit half-splittings, one per qubit.
    pub delta: Vec<f64>,
    /// Couplings, one row per mode.
    pub g: Vec<Vec<f64>>,
    #[serde(default)]
    pub coupling: Coupling,
    #[serde(default)]
    pub parity: Sector,
}

impl ModelSection {
    pub fn dims(&self) -> ModelDims {
        ModelDims {
            modes: self.modes,
            qubits: self.qubits,
            n_max: self.n_max,
        }
    }

    pub fn params(&self) -> RabiParams {
        RabiParams {
            omega: self.omega.clone(),
            delta: self.delta.clone(),
            g: self.g.clone(),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        ModelDims::new(self.modes, self.qubits, self.n_max)
            .map_err(|e| ConfigError::at("model", e))?;
        if self.omega.len() != self.modes {
            return Err(ConfigError::new(
                "model.omega",
                format!(
                    "expected {} entries (one per mode), found {}",
                    self.modes,
                    self.omega.len()
                ),
            ));
        }
        if self.delta.len() != self.qubits {
            return Err(ConfigError::new(
                "model.delta",
                format!(
                    "expected {} entries (one per qubit), found {}",
                    self.qubits,
                    self.delta.len()
                ),
            ));
        }
        if self.g.len() != self.modes {
            return Err(ConfigError::new(
                "model.g",
                format!(
                    "expected {} rows (one per mode), found {}",
                    self.modes,
                    self.g.len()
                ),
            ));
        }
        for (i, row) in self.g.iter().enumerate() {
            if row.len() != self.qubits {
                return Err(ConfigError::new(
                    format!("model.g[{i}]"),
                    format!(
                        "expected {} entries (one per qubit), found {}",
                        self.qubits,
                        row.len()
                    ),
                ));
            }
        }
        self.params()
            .validate()
            .map_err(|e| ConfigError::at("model", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub g_min: f64,
    pub g_max: f64,
    pub points: usize,
    /// Eigenvalues kept per sector and point.
    pub levels: usize,
    /// Coupling pattern scaled by `g`; defaults to the model's `g`.
    pub pattern: Option<Vec<Vec<f64>>>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            g_min: 0.0,
            g_max: 1.0,
            points: 50,
            levels: 12,
            pattern: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DarkKind {
    TwoQubitEven,
    TwoQubitOddA,
    TwoQubitOddB,
    ThreeQubit,
}

impl DarkKind {
    pub fn base_qubits(self) -> usize {
        match self {
            DarkKind::ThreeQubit => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarkSection {
    /// Closed-form state on the leading qubits.
    pub state: DarkKind,
    /// Singlet pairs appended on the trailing qubits.
    #[serde(default)]
    pub extra_pairs: usize,
    /// Random coupling scales drawn from `g_range` (seeded).
    #[serde(default)]
    pub random_samples: usize,
    #[serde(default = "default_g_range")]
    pub g_range: [f64; 2],
}

fn default_g_range() -> [f64; 2] {
    [0.05, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    pub duration: f64,
    pub g_max: f64,
    pub delta_split_initial: f64,
    /// Per-mode coupling weights; uniform when absent.
    pub weights: Option<Vec<f64>>,
    /// Output grid size, endpoints included.
    pub samples: usize,
    /// Instantaneous-spectrum samples for the gap monitor (0 disables it).
    pub gap_samples: usize,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            duration: 100.0,
            g_max: 0.25,
            delta_split_initial: 0.8,
            weights: None,
            samples: 201,
            gap_samples: 20,
        }
    }
}

impl ScheduleSection {
    pub fn mode_weights(&self) -> ModeWeights {
        match &self.weights {
            Some(w) => ModeWeights::Custom(w.clone()),
            None => ModeWeights::Uniform,
        }
    }

    fn validate(&self, modes: Option<usize>) -> Result<(), ConfigError> {
        positive("schedule.duration", self.duration)?;
        positive("schedule.g_max", self.g_max)?;
        if !(self.delta_split_initial > 0.0 && self.delta_split_initial <= 1.0) {
            return Err(ConfigError::new(
                "schedule.delta_split_initial",
                format!("must lie in (0, 1], got {}", self.delta_split_initial),
            ));
        }
        if self.samples < 2 {
            return Err(ConfigError::new(
                "schedule.samples",
                "need at least 2 output samples",
            ));
        }
        if let (Some(w), Some(m)) = (&self.weights, modes) {
            if w.len() != m {
                return Err(ConfigError::new(
                    "schedule.weights",
                    format!("expected {m} entries (one per mode), found {}", w.len()),
                ));
            }
            if w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                return Err(ConfigError::new(
                    "schedule.weights",
                    "weights must be finite and positive",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Intrinsic resonator decay, every mode.
    pub kappa_in: f64,
    /// Qubit relaxation, every qubit.
    pub gamma: f64,
    /// Qubit dephasing, every qubit.
    pub gamma_phi: f64,
}

impl NoiseSection {
    pub fn model(&self, modes: usize, qubits: usize) -> NoiseModel {
        NoiseModel::uniform(modes, qubits, self.kappa_in, self.gamma, self.gamma_phi)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [
            ("noise.kappa_in", self.kappa_in),
            ("noise.gamma", self.gamma),
            ("noise.gamma_phi", self.gamma_phi),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ConfigError::new(
                    key,
                    format!("rate must be finite and non-negative, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReleaseSection {
    pub hold: f64,
    pub release: f64,
    pub kappa_c: f64,
    /// Per-line switch-on delay; all zero when absent.
    pub delays: Option<Vec<f64>>,
    #[serde(default = "default_ramp")]
    pub ramp: f64,
    #[serde(default = "default_true")]
    pub decouple_during_hold: bool,
}

fn default_ramp() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

impl ReleaseSection {
    pub fn to_release(&self, modes: usize) -> ReleaseConfig {
        ReleaseConfig {
            hold: self.hold,
            release: self.release,
            kappa_c: self.kappa_c,
            delays: self.delays.clone().unwrap_or_else(|| vec![0.0; modes]),
            ramp: self.ramp,
            decouple_during_hold: self.decouple_during_hold,
        }
    }

    fn validate(&self, modes: Option<usize>) -> Result<(), ConfigError> {
        if let (Some(d), Some(m)) = (&self.delays, modes) {
            if d.len() != m {
                return Err(ConfigError::new(
                    "release.delays",
                    format!("expected {m} entries (one per mode), found {}", d.len()),
                ));
            }
        }
        if let Some(m) = modes {
            self.to_release(m)
                .validate(m)
                .map_err(|e| ConfigError::at("release", e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Relative tolerance for pure-state runs.
    pub rtol: f64,
    /// Relative tolerance for density-matrix runs.
    pub open_rtol: f64,
    /// Largest accepted eigen-residual for solutions and dark states.
    pub residual_tol: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            open_rtol: 1e-10,
            residual_tol: 1e-10,
        }
    }
}

impl SolverSection {
    fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [
            ("solver.rtol", self.rtol),
            ("solver.open_rtol", self.open_rtol),
            ("solver.residual_tol", self.residual_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError::new(
                    key,
                    format!("must lie in (0, 1), got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Rotating frame for turning circuit couplings into a dimensionless model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    /// Frequency unit (GHz).
    pub reference: f64,
    /// Frame mode frequencies in units of `reference`.
    pub omega: Vec<f64>,
    /// Frame half-splittings in units of `reference`.
    pub delta: Vec<f64>,
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(
            key,
            format!("must be finite and positive, got {v}"),
        ))
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| ConfigError::new("<document>", e.message()))?;
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::new(
                if path == "." {
                    "<document>".into()
                } else {
                    path
                },
                inner.message().to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::new("<file>", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let modes = self.model.as_ref().map(|m| m.modes);
        if let Some(m) = &self.model {
            m.validate()?;
        }
        if let Some(s) = &self.sweep {
            if !(s.g_min.is_finite() && s.g_max.is_finite() && s.g_min <= s.g_max) {
                return Err(ConfigError::new(
                    "sweep.g_max",
                    "need finite g_min <= g_max",
                ));
            }
            if s.points == 0 {
                return Err(ConfigError::new("sweep.points", "need at least one point"));
            }
            if s.levels == 0 {
                return Err(ConfigError::new("sweep.levels", "need at least one level"));
            }
            if let (Some(p), Some(m)) = (&s.pattern, &self.model) {
                if p.len() != m.modes || p.iter().any(|r| r.len() != m.qubits) {
                    return Err(ConfigError::new(
                        "sweep.pattern",
                        format!("expected {} rows of {} entries", m.modes, m.qubits),
                    ));
                }
            }
        }
        if let Some(d) = &self.dark {
            if !(d.g_range[0] > 0.0 && d.g_range[1] >= d.g_range[0] && d.g_range[1].is_finite()) {
                return Err(ConfigError::new("dark.g_range", "need 0 < low <= high"));
            }
            if let Some(m) = &self.model {
                let need = d.state.base_qubits() + 2 * d.extra_pairs;
                if m.qubits != need {
                    return Err(ConfigError::new(
                        "model.qubits",
                        format!(
                            "dark state {:?} with {} extra pairs needs {need} qubits",
                            d.state, d.extra_pairs
                        ),
                    ));
                }
                if m.n_max < 2 {
                    return Err(ConfigError::new(
                        "model.n_max",
                        "dark-state verification needs a cutoff of at least 2",
                    ));
                }
            }
        }
        self.schedule.validate(modes)?;
        self.noise.validate()?;
        if let Some(r) = &self.release {
            r.validate(modes)?;
        }
        self.solver.validate()?;
        if let Some(f) = &self.frame {
            positive("frame.reference", f.reference)?;
            if f.omega.len() != 2 || f.delta.len() != 2 {
                return Err(ConfigError::new(
                    "frame",
                    "the circuit has two modes and two qubits",
                ));
            }
        }
        Ok(())
    }

    pub fn require_model(&self) -> Result<&ModelSection, ConfigError> {
        self.model
            .as_ref()
            .ok_or_else(|| ConfigError::new("model", "this subcommand needs a [model] table"))
    }

    /// The W-generation protocol acts on two qubits with a common splitting sum.
    pub fn require_generation_model(&self) -> Result<&ModelSection, ConfigError> {
        let m = self.require_model()?;
        if m.qubits != 2 {
            return Err(ConfigError::new(
                "model.qubits",
                "W generation uses exactly 2 qubits",
            ));
        }
        if m.omega.iter().any(|w| (w - 1.0).abs() > 1e-12) {
            return Err(ConfigError::new(
                "model.omega",
                "W generation runs in units of the common mode frequency (all omega = 1)",
            ));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [model]
        modes = 2
        qubits = 2
        n_max = 3
        omega = [1.0, 1.0]
        delta = [0.9, 0.1]
        g = [[0.2, 0.2], [0.2, 0.2]]
    "#;

    #[test]
    fn minimal_config_loads_with_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let m = cfg.model.unwrap();
        assert_eq!(m.coupling, Coupling::Rabi);
        assert_eq!(m.parity, Sector::Both);
        assert_eq!(cfg.schedule, ScheduleSection::default());
        assert_eq!(cfg.solver.rtol, 1e-9);
    }

    #[test]
    fn unknown_key_reports_its_path() {
        let err = ExperimentConfig::from_toml(&format!("{MINIMAL}\nfoo = 1\n")).unwrap_err();
        assert_eq!(err.path, "model.foo");
        assert!(err.message.contains("foo"), "{err}");
    }

    #[test]
    fn wrong_type_reports_nested_path() {
        let text = MINIMAL.replace(
            "g = [[0.2, 0.2], [0.2, 0.2]]",
            "g = [[0.2, 0.2], [0.2, \"x\"]]",
        );
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert_eq!(err.path, "model.g[1][1]");
    }

    #[test]
    fn shape_errors_name_the_key() {
        let text = MINIMAL.replace("delta = [0.9, 0.1]", "delta = [0.9]");
        assert_eq!(
            ExperimentConfig::from_toml(&text).unwrap_err().path,
            "model.delta"
        );
        let text = format!("{MINIMAL}\n[schedule]\nweights = [1.0]\n");
        assert_eq!(
            ExperimentConfig::from_toml(&text).unwrap_err().path,
            "schedule.weights"
        );
        let text = format!("{MINIMAL}\n[noise]\ngamma = -1.0\n");
        assert_eq!(
            ExperimentConfig::from_toml(&text).unwrap_err().path,
            "noise.gamma"
        );
    }

    #[test]
    fn release_window_is_checked() {
        let text = format!("{MINIMAL}\n[release]\nhold = 5.0\nrelease = 10.0\nkappa_c = 0.1\ndelays = [0.0, 20.0]\n");
        assert_eq!(
            ExperimentConfig::from_toml(&text).unwrap_err().path,
            "release"
        );
    }
}
