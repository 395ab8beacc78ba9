// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-system W-generation runs and the shortest-duration search.

use std::sync::Arc;

use serde::Serialize;

use super::closed::{evolve_schrodinger, initial_up_up, w_bell_state, EvolveOptions, Trajectory};
use super::schedule::{make_w_generation_schedule, ModeWeights};
use crate::error::{Error, Result};
use crate::hilbert::{enumerate_basis, ModelDims, Parity};
use crate::operators::{CouplingKind, HamiltonianTerms};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationSetup {
    pub modes: usize,
    pub n_max: usize,
    pub g_max: f64,
    pub delta_split_initial: f64,
    pub weights: ModeWeights,
    pub rtol: f64,
}

impl GenerationSetup {
    pub fn new(modes: usize, n_max: usize) -> Self {
        Self {
            modes,
            n_max,
            g_max: 0.25,
            delta_split_initial: 0.8,
            weights: ModeWeights::Uniform,
            rtol: 1e-9,
        }
    }
}

/// Evolves `|0_M,↑,↑⟩` through the linear schedule of length `duration` in the
/// even sector, recording `F[w]` against the ideal `W ⊗ singlet` and
/// `F[start]` against the initial state.
pub fn run_generation(
    setup: &GenerationSetup,
    duration: f64,
    samples: usize,
) -> Result<Trajectory> {
    let space = Arc::new(enumerate_basis(
        ModelDims::new(setup.modes, 2, setup.n_max)?,
        Some(Parity::Even),
    ));
    let terms = HamiltonianTerms::new(CouplingKind::Rabi, &space)?;
    let schedule = make_w_generation_schedule(
        setup.modes,
        duration,
        setup.g_max,
        setup.delta_split_initial,
        &setup.weights,
    )?;
    let weights = setup.weights.resolve(setup.modes)?;
    let psi0 = initial_up_up(&space)?;
    let opts = EvolveOptions::new(setup.rtol, samples)
        .target("w", w_bell_state(&space, &weights)?)
        .target("start", psi0.clone());
    evolve_schrodinger(&terms, &schedule, &psi0, &opts)
}

/// Final `|⟨W ψ_B|ψ(T)⟩|²`.
pub fn generation_fidelity(setup: &GenerationSetup, duration: f64) -> Result<f64> {
    run_generation(setup, duration, 2)?
        .last("F[w]")
        .ok_or_else(|| Error::ConvergenceFailure("no fidelity recorded".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationSearch {
    /// Shortest duration found with fidelity at or above the threshold.
    pub duration: f64,
    pub fidelity: f64,
    /// Every `(T, F)` evaluated, in order.
    pub evaluations: Vec<(f64, f64)>,
}

/// First duration in `[t_min, t_max]` whose fidelity reaches `threshold`:
/// a scan with spacing `step` brackets the first crossing, bisection refines
/// it to `t_tol`.
pub fn minimum_duration(
    setup: &GenerationSetup,
    threshold: f64,
    t_min: f64,
    t_max: f64,
    step: f64,
    t_tol: f64,
) -> Result<DurationSearch> {
    if !(t_min > 0.0 && t_max > t_min && step > 0.0 && t_tol > 0.0) {
        return Err(Error::InvalidSchedule(
            "duration search needs 0 < t_min < t_max and positive steps".into(),
        ));
    }
    let mut evaluations = Vec::new();
    let mut eval = |t: f64| -> Result<f64> {
        let f = generation_fidelity(setup, t)?;
        evaluations.push((t, f));
        Ok(f)
    };
    let f0 = eval(t_min)?;
    if f0 >= threshold {
        return Ok(DurationSearch {
            duration: t_min,
            fidelity: f0,
            evaluations,
        });
    }
    let (mut lo, mut hi, mut f_hi) = (t_min, f64::NAN, f64::NAN);
    let mut t = t_min;
    while t < t_max {
        let next = (t + step).min(t_max);
        let f = eval(next)?;
        if f >= threshold {
            lo = t;
            hi = next;
            f_hi = f;
            break;
        }
        t = next;
    }
    if hi.is_nan() {
        return Err(Error::ConvergenceFailure(format!(
            "fidelity {threshold} not reached for T ≤ {t_max}"
        )));
    }
    while hi - lo > t_tol {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid)?;
        if f >= threshold {
            hi = mid;
            f_hi = f;
        } else {
            lo = mid;
        }
    }
    Ok(DurationSearch {
        duration: hi,
        fidelity: f_hi,
        evaluations,
    })
}
