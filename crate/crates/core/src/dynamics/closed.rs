// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Schrödinger evolution, trajectories and fidelities.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::integrator::{integrate_piecewise, IntegrationStats, IntegratorOptions};
use super::schedule::ProtocolSchedule;
use crate::error::{Error, Result};
use crate::hilbert::{state_index, BasisState, HilbertSpace, Spin};
use crate::operators::{HamiltonianTerms, SparseOperator, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(m) => m.nrows(),
        }
    }

    pub fn density(&self) -> DMatrix<C64> {
        match self {
            Self::Pure(v) => v * v.adjoint(),
            Self::Mixed(m) => m.clone(),
        }
    }

    pub fn expectation(&self, op: &SparseOperator) -> C64 {
        match self {
            Self::Pure(v) => op.expectation(v),
            Self::Mixed(m) => op.trace_product(m.as_slice()),
        }
    }
}

/// `|⟨b|a⟩|²` for pure `a`, `⟨b|ρ|b⟩` for mixed `a`; `b` must be normalized.
pub fn fidelity(a: &QuantumState, b: &DVector<C64>) -> Result<f64> {
    if a.dim() != b.len() {
        return Err(Error::SpaceMismatch(format!(
            "state of dimension {} against target of dimension {}",
            a.dim(),
            b.len()
        )));
    }
    Ok(match a {
        QuantumState::Pure(v) => b.dotc(v).norm_sqr(),
        QuantumState::Mixed(m) => (b.adjoint() * m * b)[(0, 0)].re,
    }
    .clamp(0.0, 1.0))
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(d);
    0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Sampled states (empty unless requested).
    pub states: Vec<QuantumState>,
    /// Named time series on `times`.
    pub observables: BTreeMap<String, Vec<f64>>,
    pub final_state: QuantumState,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(|v| v.as_slice())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        self.observables.get(name).and_then(|v| v.last().copied())
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub integrator: IntegratorOptions,
    /// Uniform output grid size, endpoints included.
    pub samples: usize,
    pub store_states: bool,
    /// Expectation values recorded as `⟨name⟩`.
    pub observables: Vec<(String, SparseOperator)>,
    /// Fidelities recorded as `F[name]`.
    pub targets: Vec<(String, DVector<C64>)>,
}

impl EvolveOptions {
    pub fn new(rtol: f64, samples: usize) -> Self {
        Self {
            integrator: IntegratorOptions::with_rtol(rtol),
            samples,
            store_states: false,
            observables: vec![],
            targets: vec![],
        }
    }

    pub fn observe(mut self, name: impl Into<String>, op: SparseOperator) -> Self {
        self.observables.push((name.into(), op));
        self
    }

    pub fn target(mut self, name: impl Into<String>, v: DVector<C64>) -> Self {
        self.targets.push((name.into(), v));
        self
    }

    pub fn sample_times(&self, duration: f64) -> Vec<f64> {
        crate::spectra::linspace(0.0, duration, self.samples.max(2))
    }
}

pub(crate) struct Recorder<'a> {
    opts: &'a EvolveOptions,
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl<'a> Recorder<'a> {
    pub fn new(opts: &'a EvolveOptions) -> Self {
        Self {
            opts,
            times: vec![],
            states: vec![],
            observables: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.observables
            .entry(name.to_string())
            .or_default()
            .push(value);
    }

    pub fn record(&mut self, t: f64, state: QuantumState) -> Result<()> {
        self.times.push(t);
        for (name, op) in &self.opts.observables {
            let v = state.expectation(op).re;
            self.push(&format!("<{name}>"), v);
        }
        for (name, target) in &self.opts.targets {
            let f = fidelity(&state, target)?;
            self.push(&format!("F[{name}]"), f);
        }
        if self.opts.store_states {
            self.states.push(state);
        }
        Ok(())
    }
}

/// Integrates `i ψ̇ = H(t) ψ` with `H(t)` from `schedule`. Records `norm`
/// plus the requested observables on a uniform grid.
pub fn evolve_schrodinger(
    terms: &HamiltonianTerms,
    schedule: &ProtocolSchedule,
    psi0: &DVector<C64>,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    schedule.validate()?;
    let n = terms.space.dim();
    if psi0.len() != n {
        return Err(Error::SpaceMismatch(format!(
            "initial state of dimension {} in a {n}-dimensional space",
            psi0.len()
        )));
    }
    let mut f = |t: f64, y: &[C64], dy: &mut [C64]| {
        dy.fill(C64::new(0.0, 0.0));
        let p = schedule.params_at(t);
        terms.apply_add(&p, C64::new(0.0, -1.0), y, dy);
    };
    let mut y: Vec<C64> = psi0.iter().copied().collect();
    let samples = opts.sample_times(schedule.duration);
    let mut rec = Recorder::new(opts);
    let stats = integrate_piecewise(
        &mut f,
        &schedule.breakpoints(),
        &mut y,
        &opts.integrator,
        &samples,
        &mut |t, y| {
            let v = DVector::from_column_slice(y);
            rec.push("norm", v.norm());
            rec.record(t, QuantumState::Pure(v))
        },
    )?;
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        observables: rec.observables,
        final_state: QuantumState::Pure(DVector::from_vec(y)),
        stats,
    })
}

/// Basis vector for a labelled state.
pub fn basis_vector(space: &HilbertSpace, state: &BasisState) -> Result<DVector<C64>> {
    let k = state_index(space, state)?;
    let mut v = DVector::zeros(space.dim());
    v[k] = C64::new(1.0, 0.0);
    Ok(v)
}

/// `|0_M, ↑, ↑⟩` (extra qubits down).
pub fn initial_up_up(space: &HilbertSpace) -> Result<DVector<C64>> {
    let dims = space.dims();
    let mut spins = vec![Spin::Down; dims.qubits];
    spins[0] = Spin::Up;
    if dims.qubits > 1 {
        spins[1] = Spin::Up;
    }
    basis_vector(space, &BasisState::vacuum(dims.modes, spins))
}

/// Normalized `Σ_i w_i |1_i⟩ ⊗ (|↓↑⟩ − |↑↓⟩)/√2` on qubits 1–2.
pub fn w_bell_state(space: &HilbertSpace, weights: &[f64]) -> Result<DVector<C64>> {
    let dims = space.dims();
    if weights.len() != dims.modes || dims.qubits != 2 {
        return Err(Error::DimensionMismatch(format!(
            "W ⊗ Bell target needs 2 qubits and {} weights, got {} qubits and {} weights",
            dims.modes,
            dims.qubits,
            weights.len()
        )));
    }
    let mut v = DVector::zeros(space.dim());
    for (i, w) in weights.iter().enumerate() {
        let mut occ = vec![0; dims.modes];
        occ[i] = 1;
        for (spins, sign) in [
            ([Spin::Down, Spin::Up], 1.0),
            ([Spin::Up, Spin::Down], -1.0),
        ] {
            let k = state_index(space, &BasisState::new(occ.clone(), spins.to_vec()))?;
            v[k] = C64::new(w * sign, 0.0);
        }
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("W weights vanish".into()));
    }
    Ok(v / C64::new(norm, 0.0))
}

/// Projector `|W⟩⟨W| ⊗ 1_qubits` onto the normalized single-photon state
/// `Σ_i w_i |1_i⟩`; its expectation is the photon-only W fidelity.
pub fn photon_w_projector(space: &Arc<HilbertSpace>, weights: &[f64]) -> Result<SparseOperator> {
    let dims = space.dims();
    if weights.len() != dims.modes {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} modes",
            weights.len(),
            dims.modes
        )));
    }
    let norm: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("W weights vanish".into()));
    }
    let mut triplets = Vec::new();
    for spins in spin_configurations(dims.qubits) {
        let members: Vec<(usize, f64)> = (0..dims.modes)
            .filter_map(|i| {
                let mut occ = vec![0; dims.modes];
                occ[i] = 1;
                space
                    .index_of(&BasisState::new(occ, spins.clone()))
                    .map(|k| (k, weights[i] / norm))
            })
            .collect();
        for &(r, a) in &members {
            for &(c, b) in &members {
                triplets.push((r, c, C64::new(a * b, 0.0)));
            }
        }
    }
    Ok(SparseOperator::from_triplets(space.clone(), triplets))
}

fn spin_configurations(n: usize) -> Vec<Vec<Spin>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|j| {
                    if bits >> (n - 1 - j) & 1 == 0 {
                        Spin::Up
                    } else {
                        Spin::Down
                    }
                })
                .collect()
        })
        .collect()
}
