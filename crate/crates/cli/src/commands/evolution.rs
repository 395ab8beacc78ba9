// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-dependent subcommands: closed W generation with the gap monitor,
//! open-system generation, and catch and release.

use std::collections::BTreeMap;
use std::sync::Arc;

use mmrabi::dynamics::{
    catch_and_release, evolve_lindblad, evolve_schrodinger, gap_monitor, initial_up_up,
    make_w_generation_schedule, photon_w_projector, w_bell_state, EmissionReport, EvolveOptions,
    GapSample, IntegrationStats, ModeWeights, NoiseModel, ProtocolSchedule, ReleaseConfig,
    Tracking, Trajectory,
};
use mmrabi::hilbert::{ModelDims, Parity};
use mmrabi::operators::{build_mode_number, build_photon_threshold_projector, CouplingKind, C64};
use mmrabi::spectra::linspace;
use serde::Serialize;

use super::{space, top_populations, Context};
use crate::config::{ModelSection, ScheduleSection};
use crate::emit::{fmt_f64, Csv};
use crate::error::{CliResult, ConfigError, Stage};

/// Protocol inputs shared by the generation subcommands and figures.
#[derive(Debug, Clone, Serialize)]
pub(super) struct Generation {
    pub modes: usize,
    pub n_max: usize,
    pub coupling: CouplingKind,
    pub duration: f64,
    pub g_max: f64,
    pub delta_split_initial: f64,
    pub weights: ModeWeights,
    pub samples: usize,
    pub gap_samples: usize,
}

impl Generation {
    pub fn from_config(m: &ModelSection, s: &ScheduleSection) -> Self {
        Self {
            modes: m.modes,
            n_max: m.n_max,
            coupling: m.coupling.into(),
            duration: s.duration,
            g_max: s.g_max,
            delta_split_initial: s.delta_split_initial,
            weights: s.mode_weights(),
            samples: s.samples,
            gap_samples: s.gap_samples,
        }
    }

    pub fn schedule(&self) -> CliResult<ProtocolSchedule> {
        make_w_generation_schedule(
            self.modes,
            self.duration,
            self.g_max,
            self.delta_split_initial,
            &self.weights,
        )
        .config_at("schedule")
    }

    pub fn weights(&self) -> CliResult<Vec<f64>> {
        self.weights
            .resolve(self.modes)
            .config_at("schedule.weights")
    }

    fn dims(&self) -> ModelDims {
        ModelDims {
            modes: self.modes,
            qubits: 2,
            n_max: self.n_max,
        }
    }
}

fn trajectory_csv(tr: &Trajectory) -> Csv {
    let cols: Vec<(String, &[f64])> = tr
        .observables
        .iter()
        .map(|(k, v)| (k.clone(), v.as_slice()))
        .collect();
    Csv::from_series(&tr.times, &cols)
}

fn finals(tr: &Trajectory) -> BTreeMap<String, f64> {
    tr.observables
        .iter()
        .filter_map(|(k, v)| v.last().map(|x| (k.clone(), *x)))
        .collect()
}

#[derive(Serialize)]
struct GapSummary {
    tracking: &'static str,
    samples: usize,
    max_partner_element: f64,
    min_effective_gap: Option<f64>,
    max_adiabatic_ratio: f64,
    ambiguous_samples: usize,
}

#[derive(Serialize)]
pub(super) struct ClosedSummary {
    #[serde(rename = "F_M")]
    pub f_m: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub setup: Generation,
    pub dim: usize,
    pub final_observables: BTreeMap<String, f64>,
    pub final_populations: Vec<(String, f64)>,
    gap: Option<GapSummary>,
    pub integration: IntegrationStats,
}

pub(super) struct ClosedRun {
    pub trajectory: Trajectory,
    pub gap_csv: Option<Csv>,
    pub summary: ClosedSummary,
}

/// Pure-state generation in the even sector from `|0_M,↑,↑⟩`.
pub(super) fn closed_generation(setup: &Generation, rtol: f64) -> CliResult<ClosedRun> {
    let sp = space(setup.dims(), Some(Parity::Even))?;
    let terms = mmrabi::operators::HamiltonianTerms::new(setup.coupling, &sp).config_at("model")?;
    let schedule = setup.schedule()?;
    let psi0 = initial_up_up(&sp).config_at("model")?;
    let w = w_bell_state(&sp, &setup.weights()?).config_at("schedule.weights")?;
    let mut opts = EvolveOptions::new(rtol, setup.samples)
        .target("w", w)
        .target("start", psi0.clone())
        .observe("P[n>=2]", build_photon_threshold_projector(&sp, 2));
    for i in 0..setup.modes {
        opts = opts.observe(
            format!("n[{i}]"),
            build_mode_number(&sp, i).config_at("model")?,
        );
    }
    let tr = evolve_schrodinger(&terms, &schedule, &psi0, &opts).stage("Schrodinger evolution")?;

    let (gap_csv, gap) = if setup.gap_samples > 0 {
        let times = linspace(0.0, setup.duration, setup.gap_samples);
        let samples = gap_monitor(
            setup.coupling,
            &schedule,
            &sp,
            &psi0,
            &times,
            Tracking::MinPhotons(2),
        )
        .stage("gap monitor")?;
        (Some(gap_csv(&samples)), Some(summarize_gap(&samples)))
    } else {
        (None, None)
    };
    let psi = match &tr.final_state {
        mmrabi::dynamics::QuantumState::Pure(v) => v.clone(),
        mmrabi::dynamics::QuantumState::Mixed(_) => {
            unreachable!("Schrodinger evolution returns a pure state")
        }
    };
    let pops: Vec<f64> = psi.iter().map(C64::norm_sqr).collect();
    let summary = ClosedSummary {
        f_m: tr.last("F[w]").unwrap_or(f64::NAN),
        duration: setup.duration,
        setup: setup.clone(),
        dim: sp.dim(),
        final_observables: finals(&tr),
        final_populations: top_populations(&sp, &pops, 6),
        gap,
        integration: tr.stats,
    };
    Ok(ClosedRun {
        trajectory: tr,
        gap_csv,
        summary,
    })
}

fn gap_csv(samples: &[GapSample]) -> Csv {
    let mut csv = Csv::new(&[
        "t",
        "energy",
        "cluster_size",
        "overlap",
        "ambiguous",
        "max_partner_element",
        "effective_gap",
        "adiabatic_ratio",
    ]);
    for s in samples {
        csv.push(vec![
            fmt_f64(s.t),
            fmt_f64(s.energy),
            s.cluster_size.to_string(),
            fmt_f64(s.overlap),
            s.ambiguous.to_string(),
            fmt_f64(s.max_partner_element),
            s.effective_gap.map_or(String::new(), fmt_f64),
            fmt_f64(s.adiabatic_ratio),
        ]);
    }
    csv
}

fn summarize_gap(samples: &[GapSample]) -> GapSummary {
    GapSummary {
        tracking: "min-photons(2)",
        samples: samples.len(),
        max_partner_element: samples
            .iter()
            .map(|s| s.max_partner_element)
            .fold(0.0, f64::max),
        min_effective_gap: samples
            .iter()
            .filter_map(|s| s.effective_gap)
            .min_by(|a, b| a.total_cmp(b)),
        max_adiabatic_ratio: samples
            .iter()
            .map(|s| s.adiabatic_ratio)
            .fold(0.0, f64::max),
        ambiguous_samples: samples.iter().filter(|s| s.ambiguous).count(),
    }
}

pub fn adiabatic(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_generation_model()?;
    let setup = Generation::from_config(m, &ctx.cfg.schedule);
    let run = closed_generation(&setup, ctx.cfg.solver.rtol)?;
    ctx.sink
        .csv("adiabatic", &trajectory_csv(&run.trajectory))?;
    if let Some(g) = &run.gap_csv {
        ctx.sink.csv("adiabatic_gap", g)?;
    }
    ctx.sink.json("adiabatic", &run.summary)
}

#[derive(Serialize)]
pub(super) struct OpenSummary {
    #[serde(rename = "F_M")]
    pub f_m: f64,
    /// `⟨W|ρ_photons|W⟩`, qubits traced out.
    pub photon_fidelity: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub setup: Generation,
    pub noise: NoiseModel,
    pub dim: usize,
    pub final_observables: BTreeMap<String, f64>,
    pub final_populations: Vec<(String, f64)>,
    pub emitted_per_line: Vec<f64>,
    pub lost_per_line: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_ledger_residual: f64,
    pub integration: IntegrationStats,
}

fn max_abs(tr: &Trajectory, name: &str) -> f64 {
    tr.series(name)
        .unwrap_or(&[])
        .iter()
        .fold(0.0, |a, x| a.max(x.abs()))
}

/// Density-matrix generation in the full space from `|0_M,↑,↑⟩`.
pub(super) fn open_generation(
    setup: &Generation,
    noise: &NoiseModel,
    rtol: f64,
) -> CliResult<(Trajectory, OpenSummary)> {
    if setup.coupling != CouplingKind::Rabi {
        return Err(ConfigError::new(
            "model.coupling",
            "open-system runs use the full Rabi coupling",
        )
        .into());
    }
    let sp = space(setup.dims(), None)?;
    let terms = mmrabi::operators::HamiltonianTerms::new(setup.coupling, &sp).config_at("model")?;
    let schedule = setup.schedule()?;
    let weights = setup.weights()?;
    let psi0 = initial_up_up(&sp).config_at("model")?;
    let rho0 = &psi0 * psi0.adjoint();
    let opts = EvolveOptions::new(rtol, setup.samples)
        .target(
            "w",
            w_bell_state(&sp, &weights).config_at("schedule.weights")?,
        )
        .observe(
            "P[W photons]",
            photon_w_projector(&sp, &weights).config_at("schedule.weights")?,
        );
    let tr = evolve_lindblad(&terms, &schedule, noise, &rho0, &opts, true)
        .stage("Lindblad evolution")?;
    let rho = tr.final_state.density();
    let pops: Vec<f64> = (0..sp.dim()).map(|k| rho[(k, k)].re).collect();
    let m = setup.modes;
    let summary = OpenSummary {
        f_m: tr.last("F[w]").unwrap_or(f64::NAN),
        photon_fidelity: tr.last("<P[W photons]>").unwrap_or(f64::NAN),
        duration: setup.duration,
        setup: setup.clone(),
        noise: noise.clone(),
        dim: sp.dim(),
        final_observables: finals(&tr),
        final_populations: top_populations(&sp, &pops, 6),
        emitted_per_line: (0..m)
            .map(|i| tr.last(&format!("emitted[{i}]")).unwrap_or(0.0))
            .collect(),
        lost_per_line: (0..m)
            .map(|i| tr.last(&format!("lost[{i}]")).unwrap_or(0.0))
            .collect(),
        min_eigenvalue: tr
            .series("min_eigenvalue")
            .unwrap_or(&[])
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        max_ledger_residual: max_abs(&tr, "ledger"),
        integration: tr.stats,
    };
    Ok((tr, summary))
}

pub fn lindblad(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_generation_model()?;
    let setup = Generation::from_config(m, &ctx.cfg.schedule);
    let noise = ctx.cfg.noise.model(m.modes, m.qubits);
    let (tr, summary) = open_generation(&setup, &noise, ctx.cfg.solver.open_rtol)?;
    ctx.sink.csv("lindblad", &trajectory_csv(&tr))?;
    ctx.sink.json("lindblad", &summary)
}

#[derive(Serialize)]
pub(super) struct ReleaseSummary {
    #[serde(rename = "F_M")]
    pub f_m: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub setup: Generation,
    pub noise: NoiseModel,
    pub release: ReleaseConfig,
    pub dim: usize,
    pub emitted_per_line: Vec<f64>,
    pub report: EmissionReport,
    pub generation_integration: IntegrationStats,
    pub release_integration: IntegrationStats,
}

pub(super) struct ReleaseRun {
    pub generation_csv: Csv,
    pub release_csv: Csv,
    pub summary: ReleaseSummary,
}

pub(super) fn release_run(
    setup: &Generation,
    noise: &NoiseModel,
    cfg: &ReleaseConfig,
    rtol: f64,
) -> CliResult<ReleaseRun> {
    if setup.coupling != CouplingKind::Rabi {
        return Err(ConfigError::new(
            "model.coupling",
            "open-system runs use the full Rabi coupling",
        )
        .into());
    }
    let sp: Arc<_> = space(setup.dims(), None)?;
    let schedule = setup.schedule()?;
    let opts = EvolveOptions::new(rtol, setup.samples);
    let out = catch_and_release(&sp, &schedule, noise, cfg, &opts).stage("catch and release")?;
    let summary = ReleaseSummary {
        f_m: out.report.generation_fidelity,
        duration: setup.duration,
        setup: setup.clone(),
        noise: noise.clone(),
        release: cfg.clone(),
        dim: sp.dim(),
        emitted_per_line: out.report.emitted.clone(),
        report: out.report.clone(),
        generation_integration: out.generation.stats,
        release_integration: out.release.stats,
    };
    Ok(ReleaseRun {
        generation_csv: trajectory_csv(&out.generation),
        release_csv: trajectory_csv(&out.release),
        summary,
    })
}

pub fn catch_release(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_generation_model()?;
    let r = ctx
        .cfg
        .release
        .as_ref()
        .ok_or_else(|| ConfigError::new("release", "catch-release needs a [release] table"))?;
    let setup = Generation::from_config(m, &ctx.cfg.schedule);
    let noise = ctx.cfg.noise.model(m.modes, m.qubits);
    let run = release_run(
        &setup,
        &noise,
        &r.to_release(m.modes),
        ctx.cfg.solver.open_rtol,
    )?;
    ctx.sink
        .csv("catch_release_generation", &run.generation_csv)?;
    ctx.sink.csv("catch_release_emission", &run.release_csv)?;
    ctx.sink.json("catch_release", &run.summary)
}
