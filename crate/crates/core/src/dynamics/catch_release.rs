// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Catch and release: generate a W state in the resonators with the line
//! couplers off, hold it, then switch the couplers on and record what each
//! transmission line receives.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::closed::{
    initial_up_up, photon_w_projector, w_bell_state, EvolveOptions, QuantumState, Trajectory,
};
use super::lindblad::{evolve_lindblad, NoiseModel};
use super::schedule::{PiecewiseLinear, ProtocolSchedule};
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::operators::{CouplingKind, HamiltonianTerms, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseConfig {
    /// Storage time after generation, couplers off.
    pub hold: f64,
    /// Time allowed for emission after the hold.
    pub release: f64,
    /// Coupler-mediated line decay once switched on.
    pub kappa_c: f64,
    /// Per-line switch-on delay, measured from the end of the hold.
    pub delays: Vec<f64>,
    /// Width of the linear switch-on.
    pub ramp: f64,
    /// Ramp the qubit–mode couplings linearly to zero over the hold. The
    /// ideal `W ⊗ singlet` is an eigenstate for every `g_i1 = g_i2`, so this
    /// leaves it untouched while removing the dressed vacuum's photons.
    #[serde(default = "default_decouple")]
    pub decouple_during_hold: bool,
}

fn default_decouple() -> bool {
    true
}

impl ReleaseConfig {
    pub fn simultaneous(modes: usize, hold: f64, release: f64, kappa_c: f64) -> Self {
        Self {
            hold,
            release,
            kappa_c,
            delays: vec![0.0; modes],
            ramp: 1.0,
            decouple_during_hold: true,
        }
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        if self.delays.len() != modes {
            return Err(Error::DimensionMismatch(format!(
                "{} release delays for {modes} lines",
                self.delays.len()
            )));
        }
        let finite = [self.hold, self.release, self.kappa_c, self.ramp]
            .iter()
            .chain(&self.delays)
            .all(|x| x.is_finite() && *x >= 0.0);
        if !finite || !(self.ramp > 0.0) || !(self.release > 0.0) {
            return Err(Error::InvalidSchedule(
                "release timings must be finite, non-negative, with positive ramp and release window".into(),
            ));
        }
        if self.decouple_during_hold && !(self.hold > 0.0) {
            return Err(Error::InvalidSchedule(
                "decoupling needs a positive hold time".into(),
            ));
        }
        if self.delays.iter().any(|d| d + self.ramp > self.release) {
            return Err(Error::InvalidSchedule(
                "a line switches on after the release window closes".into(),
            ));
        }
        Ok(())
    }
}

/// Frozen continuation of `generation` with the line couplers switched on.
pub fn release_schedule(
    generation: &ProtocolSchedule,
    cfg: &ReleaseConfig,
) -> Result<ProtocolSchedule> {
    let m = generation.modes();
    cfg.validate(m)?;
    let end = generation.params_at(generation.duration);
    let total = cfg.hold + cfg.release;
    let mut s = ProtocolSchedule::frozen(&end, total)?;
    if cfg.decouple_during_hold {
        for (row, g_row) in s.g.iter_mut().zip(&end.g) {
            for (curve, g) in row.iter_mut().zip(g_row) {
                *curve = PiecewiseLinear::new(vec![0.0, cfg.hold, total], vec![*g, 0.0, 0.0])?;
            }
        }
    }
    for (i, k) in s.kappa_c.iter_mut().enumerate() {
        let on = cfg.hold + cfg.delays[i];
        let mut times = vec![0.0, on, on + cfg.ramp, total];
        let mut values = vec![0.0, 0.0, cfg.kappa_c, cfg.kappa_c];
        if on == 0.0 {
            times.remove(0);
            values.remove(0);
        }
        if on + cfg.ramp >= total {
            times.pop();
            values.pop();
        }
        *k = PiecewiseLinear::new(times, values)?;
    }
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmissionReport {
    /// Fidelity with the ideal `W ⊗ singlet` at the end of generation.
    pub generation_fidelity: f64,
    /// `⟨W|ρ_photons|W⟩` at the end of generation.
    pub photon_fidelity: f64,
    /// Photons emitted into each line.
    pub emitted: Vec<f64>,
    /// Photons lost intrinsically in each resonator during hold and release.
    pub lost: Vec<f64>,
    pub total_emitted: f64,
    /// `emitted_i / Σ emitted`.
    pub shares: Vec<f64>,
    /// `g_i² / Σ g²` at the end of generation.
    pub expected_shares: Vec<f64>,
    /// Time of peak emission rate in each line, from the start of the hold.
    pub peak_times: Vec<f64>,
    /// Largest photon-ledger imbalance over both stages.
    pub max_ledger_residual: f64,
    /// Photons still in the resonators when the window closes.
    pub residual_photons: f64,
}

#[derive(Debug, Clone)]
pub struct CatchRelease {
    pub generation: Trajectory,
    pub release: Trajectory,
    pub report: EmissionReport,
}

/// Runs generation from `|0_M,↑,↑⟩` then hold and release under `noise`.
/// `space` must be unrestricted (qubit relaxation breaks parity).
pub fn catch_and_release(
    space: &Arc<HilbertSpace>,
    generation: &ProtocolSchedule,
    noise: &NoiseModel,
    cfg: &ReleaseConfig,
    opts: &EvolveOptions,
) -> Result<CatchRelease> {
    let m = generation.modes();
    let terms = HamiltonianTerms::new(CouplingKind::Rabi, space)?;
    let end = generation.params_at(generation.duration);
    let weights: Vec<f64> = end.g.iter().map(|row| row[0]).collect();
    let target = w_bell_state(space, &weights)?;
    let psi0 = initial_up_up(space)?;
    let rho0: DMatrix<C64> = &psi0 * psi0.adjoint();
    let gen_opts = opts.clone().target("w", target.clone());
    let gen = evolve_lindblad(&terms, generation, noise, &rho0, &gen_opts, true)?;
    let generation_fidelity = super::closed::fidelity(&gen.final_state, &target)?;
    let photon_fidelity = gen
        .final_state
        .expectation(&photon_w_projector(space, &weights)?)
        .re;

    let rel_sched = release_schedule(generation, cfg)?;
    let rho_t = match &gen.final_state {
        QuantumState::Mixed(r) => r.clone(),
        QuantumState::Pure(v) => v * v.adjoint(),
    };
    let rel = evolve_lindblad(&terms, &rel_sched, noise, &rho_t, opts, true)?;

    let emitted: Vec<f64> = (0..m)
        .map(|i| rel.last(&format!("emitted[{i}]")).unwrap_or(0.0))
        .collect();
    let lost: Vec<f64> = (0..m)
        .map(|i| rel.last(&format!("lost[{i}]")).unwrap_or(0.0))
        .collect();
    let total_emitted: f64 = emitted.iter().sum();
    let shares = emitted
        .iter()
        .map(|e| {
            if total_emitted > 0.0 {
                e / total_emitted
            } else {
                0.0
            }
        })
        .collect();
    let g2: f64 = weights.iter().map(|w| w * w).sum();
    let expected_shares = weights.iter().map(|w| w * w / g2).collect();
    let peak_times = (0..m)
        .map(|i| {
            let s = rel.series(&format!("emission[{i}]")).unwrap_or(&[]);
            s.iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map_or(0.0, |(k, _)| rel.times[k])
        })
        .collect();
    let ledger = |tr: &Trajectory| {
        tr.series("ledger")
            .unwrap_or(&[])
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()))
    };
    let residual_photons = (0..m)
        .map(|i| rel.last(&format!("n[{i}]")).unwrap_or(0.0))
        .sum();
    let report = EmissionReport {
        generation_fidelity,
        photon_fidelity,
        emitted,
        lost,
        total_emitted,
        shares,
        expected_shares,
        peak_times,
        max_ledger_residual: ledger(&gen).max(ledger(&rel)),
        residual_photons,
    };
    Ok(CatchRelease {
        generation: gen,
        release: rel,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::schedule::{make_w_generation_schedule, ModeWeights};

    #[test]
    fn release_schedule_switches_lines_in_order() {
        let g = make_w_generation_schedule(2, 10.0, 0.25, 0.8, &ModeWeights::Uniform).unwrap();
        let mut cfg = ReleaseConfig::simultaneous(2, 5.0, 40.0, 0.1);
        cfg.delays = vec![0.0, 10.0];
        let s = release_schedule(&g, &cfg).unwrap();
        assert_eq!(s.kappa_c_at(4.9), vec![0.0, 0.0]);
        assert!((s.kappa_c_at(5.5)[0] - 0.05).abs() < 1e-12);
        assert_eq!(s.kappa_c_at(7.0), vec![0.1, 0.0]);
        assert_eq!(s.kappa_c_at(20.0), vec![0.1, 0.1]);
        assert_eq!(s.params_at(3.0).delta, g.params_at(10.0).delta);
        assert!((s.params_at(3.0).g[1][0] - 0.1).abs() < 1e-15);
        assert_eq!(s.params_at(6.0).g[1][0], 0.0);
        cfg.decouple_during_hold = false;
        assert_eq!(
            release_schedule(&g, &cfg).unwrap().params_at(30.0),
            g.params_at(10.0)
        );
        cfg.delays = vec![0.0, 39.5];
        assert!(matches!(
            release_schedule(&g, &cfg),
            Err(Error::InvalidSchedule(_))
        ));
    }
}
