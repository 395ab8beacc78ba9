// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Static subcommands: basis listing, spectra, coupling sweeps, dark-state
//! verification and the one-photon solution search.

use std::sync::Arc;

use mmrabi::hilbert::{HilbertSpace, ModelDims, Parity};
use mmrabi::operators::{build_hamiltonian_of, RabiParams};
use mmrabi::solutions::{
    dark_state_2q_odd_unchecked, dark_state_2q_unchecked, dark_state_3q_unchecked,
    dark_state_residual, find_one_photon_solutions, product_dark_state_unchecked, ConditionCheck,
    DarkState, OddVariant, RankDiagnostics,
};
use mmrabi::spectra::{
    confined_level, degeneracy_count, eigenspectrum, line_crossings, linspace, sector_crossings,
    sweep_coupling, Crossing, DEGENERACY_WINDOW,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{amplitudes, sector_label, space, weight_above, Amplitude, Context};
use crate::config::{DarkKind, Sector};
use crate::emit::{fmt_f64, Csv};
use crate::error::{CliResult, ConfigError, Stage};

/// Window for the flat line at `E = ω`.
const LINE_TOL: f64 = 1e-8;

#[derive(Serialize)]
struct BasisSummary {
    dims: ModelDims,
    sector: &'static str,
    dim: usize,
    /// States per total photon number.
    block_sizes: Vec<usize>,
}

pub fn basis(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_model()?;
    let sector = match m.parity {
        Sector::Even => Some(Parity::Even),
        Sector::Odd => Some(Parity::Odd),
        Sector::Both | Sector::Full => None,
    };
    let sp = space(m.dims(), sector)?;
    let mut header = vec!["index".to_string()];
    header.extend((1..=m.modes).map(|i| format!("n_{i}")));
    header.extend((1..=m.qubits).map(|j| format!("s_{j}")));
    header.push("parity".into());
    let mut csv = Csv::new(&header);
    for (k, s) in sp.states().iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(s.occupations.iter().map(|n| n.to_string()));
        row.extend(s.spins.iter().map(|x| x.symbol().to_string()));
        row.push(s.parity().to_string());
        csv.push(row);
    }
    let summary = BasisSummary {
        dims: m.dims(),
        sector: sector_label(sector),
        dim: sp.dim(),
        block_sizes: (0..=m.n_max).map(|k| sp.photon_block(k).len()).collect(),
    };
    ctx.sink.csv("basis", &csv)?;
    ctx.sink.json("basis", &summary)
}

#[derive(Serialize)]
struct SectorSpectrum {
    sector: &'static str,
    dim: usize,
    levels: Vec<f64>,
    ground_energy: f64,
    /// Levels within the degeneracy window of `omega[0]`.
    degeneracy_at_omega: usize,
    /// Best-confined eigenvector at `omega[0]`, if the level exists.
    confined_at_omega: Option<ConfinedLevel>,
}

#[derive(Serialize)]
struct ConfinedLevel {
    energy: f64,
    /// Weight on states with two or more photons.
    weight_two_plus: f64,
}

#[derive(Serialize)]
struct SpectrumSummary {
    dims: ModelDims,
    coupling: String,
    params: RabiParams,
    sectors: Vec<SectorSpectrum>,
}

pub fn spectrum(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_model()?.clone();
    let params = m.params();
    let wanted = ctx.cfg.sweep.as_ref().map(|s| s.levels);
    let mut csv = Csv::new(&["sector", "level_index", "energy", "weight_two_plus"]);
    let mut sectors = Vec::new();
    for sector in m.parity.sectors() {
        let sp = space(m.dims(), sector)?;
        let h = build_hamiltonian_of(m.coupling.into(), &params, &sp).config_at("model")?;
        let n = wanted.unwrap_or(sp.dim()).min(sp.dim());
        let pairs = eigenspectrum(&h, n).stage("eigensolve")?;
        for k in 0..pairs.len() {
            csv.push(vec![
                sector_label(sector).into(),
                k.to_string(),
                fmt_f64(pairs.values[k]),
                fmt_f64(weight_above(&sp, &pairs.vector(k), 2)),
            ]);
        }
        let omega = params.omega[0];
        sectors.push(SectorSpectrum {
            sector: sector_label(sector),
            dim: sp.dim(),
            ground_energy: pairs.values[0],
            degeneracy_at_omega: degeneracy_count(&h, omega, DEGENERACY_WINDOW),
            confined_at_omega: confined_level(&sp, &pairs, omega, LINE_TOL, 2).map(
                |(energy, _, w)| ConfinedLevel {
                    energy,
                    weight_two_plus: w,
                },
            ),
            levels: pairs.values,
        });
    }
    let summary = SpectrumSummary {
        dims: m.dims(),
        coupling: format!("{:?}", m.coupling).to_lowercase(),
        params,
        sectors,
    };
    ctx.sink.csv("spectrum", &csv)?;
    ctx.sink.json("spectrum", &summary)
}

#[derive(Serialize)]
struct LineReport {
    sector: &'static str,
    /// Largest distance from `omega[0]` to the nearest level over the grid.
    max_distance: f64,
    /// Grid points where the line is present within tolerance.
    points_on_line: usize,
    crossings: Vec<Crossing>,
}

#[derive(Serialize)]
struct SweepSummary {
    dims: ModelDims,
    template: RabiParams,
    pattern: Vec<Vec<f64>>,
    points: usize,
    g_range: [f64; 2],
    levels: usize,
    line_energy: f64,
    lines: Vec<LineReport>,
    sector_crossings: Vec<Crossing>,
}

pub(super) fn sweep_sectors(sector: Sector) -> Result<Vec<Parity>, ConfigError> {
    match sector {
        Sector::Even => Ok(vec![Parity::Even]),
        Sector::Odd => Ok(vec![Parity::Odd]),
        Sector::Both => Ok(vec![Parity::Even, Parity::Odd]),
        Sector::Full => Err(ConfigError::new(
            "model.parity",
            "sweeps are resolved by parity sector",
        )),
    }
}

pub(super) fn sweep_report(
    template: &RabiParams,
    pattern: &[Vec<f64>],
    grid: &[f64],
    n_max: usize,
    parities: &[Parity],
    levels: usize,
) -> CliResult<(Csv, serde_json::Value)> {
    let table =
        sweep_coupling(template, pattern, grid, n_max, parities, levels).stage("coupling sweep")?;
    let energy = template.omega[0];
    let lines = parities
        .iter()
        .map(|&p| {
            let d = table.distance_to(p, energy).unwrap_or_default();
            LineReport {
                sector: sector_label(Some(p)),
                max_distance: d.iter().copied().fold(0.0, f64::max),
                points_on_line: d.iter().filter(|x| **x < LINE_TOL).count(),
                crossings: line_crossings(&table, p, energy, LINE_TOL),
            }
        })
        .collect();
    let cross = if parities.len() == 2 {
        sector_crossings(&table, parities[0], parities[1])
    } else {
        vec![]
    };
    let summary = SweepSummary {
        dims: table.dims,
        template: template.clone(),
        pattern: pattern.to_vec(),
        points: grid.len(),
        g_range: [grid[0], grid[grid.len() - 1]],
        levels,
        line_energy: energy,
        lines,
        sector_crossings: cross,
    };
    let mut csv = Csv::new(&["g", "parity", "level_index", "energy"]);
    // Reuse the library's row layout.
    for line in table.to_csv().lines().skip(1) {
        csv.push(line.split(',').map(str::to_string).collect());
    }
    Ok((
        csv,
        serde_json::to_value(summary).expect("summary serializes"),
    ))
}

pub fn sweep(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_model()?.clone();
    let s = ctx.cfg.sweep.clone().unwrap_or_default();
    let parities = sweep_sectors(m.parity)?;
    let pattern = s.pattern.clone().unwrap_or_else(|| m.g.clone());
    let grid = linspace(s.g_min, s.g_max, s.points);
    let (csv, summary) = sweep_report(&m.params(), &pattern, &grid, m.n_max, &parities, s.levels)?;
    ctx.sink.csv("sweep", &csv)?;
    ctx.sink.json("sweep", &summary)
}

pub(super) fn build_dark_state(
    kind: DarkKind,
    extra_pairs: usize,
    params: &RabiParams,
    sp: &Arc<HilbertSpace>,
) -> CliResult<DarkState> {
    let nb = kind.base_qubits();
    let base_params = if extra_pairs == 0 {
        params.clone()
    } else {
        params.select_qubits(&(0..nb).collect::<Vec<_>>())
    };
    let base_space = if extra_pairs == 0 {
        sp.clone()
    } else {
        let d = sp.dims();
        space(ModelDims { qubits: nb, ..d }, None)?
    };
    let base = match kind {
        DarkKind::TwoQubitEven => dark_state_2q_unchecked(&base_params, &base_space),
        DarkKind::TwoQubitOddA => {
            dark_state_2q_odd_unchecked(&base_params, &base_space, OddVariant::A)
        }
        DarkKind::TwoQubitOddB => {
            dark_state_2q_odd_unchecked(&base_params, &base_space, OddVariant::B)
        }
        DarkKind::ThreeQubit => dark_state_3q_unchecked(&base_params, &base_space),
    }
    .config_at("dark.state")?;
    if extra_pairs == 0 {
        Ok(base)
    } else {
        product_dark_state_unchecked(&base, extra_pairs, params, sp).config_at("dark.extra_pairs")
    }
}

#[derive(Serialize)]
struct DarkSample {
    g_scale: f64,
    residual: f64,
    conditions_hold: bool,
}

#[derive(Serialize)]
struct RandomCheck {
    seed: u64,
    samples: Vec<DarkSample>,
    max_residual: f64,
}

#[derive(Serialize)]
struct DarkSummary {
    state: String,
    parity: String,
    energy: f64,
    residual: f64,
    residual_tol: f64,
    conditions: Vec<ConditionCheck>,
    conditions_hold: bool,
    /// Conditions hold and the residual is below tolerance.
    verified: bool,
    weight_two_plus: f64,
    amplitudes: Vec<Amplitude>,
    random: Option<RandomCheck>,
}

pub fn dark_verify(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_model()?.clone();
    let d = ctx
        .cfg
        .dark
        .clone()
        .ok_or_else(|| ConfigError::new("dark", "dark-verify needs a [dark] table"))?;
    let tol = ctx.cfg.solver.residual_tol;
    let params = m.params();
    let sp = space(m.dims(), None)?;
    let state = build_dark_state(d.state, d.extra_pairs, &params, &sp)?;
    let residual = dark_state_residual(&state, &params).stage("dark-state residual")?;
    let conditions_hold = state.conditions_hold();

    let mut csv = Csv::new(&["sample", "g_scale", "residual", "conditions_hold"]);
    let random = if d.random_samples > 0 {
        let g_ref = params
            .g
            .iter()
            .flatten()
            .fold(0.0f64, |a, x| a.max(x.abs()));
        if g_ref == 0.0 {
            return Err(ConfigError::new(
                "model.g",
                "random coupling scales need a nonzero coupling pattern",
            )
            .into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut samples = Vec::with_capacity(d.random_samples);
        for k in 0..d.random_samples {
            let scale = rng.random_range(d.g_range[0]..=d.g_range[1]);
            let g = params
                .g
                .iter()
                .map(|row| row.iter().map(|x| x * scale / g_ref).collect())
                .collect();
            let p = RabiParams {
                g,
                ..params.clone()
            };
            let s = build_dark_state(d.state, d.extra_pairs, &p, &sp)?;
            let r = dark_state_residual(&s, &p).stage("dark-state residual")?;
            csv.push(vec![
                k.to_string(),
                fmt_f64(scale),
                fmt_f64(r),
                s.conditions_hold().to_string(),
            ]);
            samples.push(DarkSample {
                g_scale: scale,
                residual: r,
                conditions_hold: s.conditions_hold(),
            });
        }
        Some(RandomCheck {
            seed: ctx.seed,
            max_residual: samples.iter().map(|s| s.residual).fold(0.0, f64::max),
            samples,
        })
    } else {
        None
    };
    let summary = DarkSummary {
        state: format!("{:?}", state.kind),
        parity: format!("{:?}", state.parity).to_lowercase(),
        energy: state.energy,
        residual,
        residual_tol: tol,
        conditions: state.conditions.clone(),
        conditions_hold,
        verified: conditions_hold && residual < tol,
        weight_two_plus: state.weight_above(2),
        amplitudes: amplitudes(&state.space, &state.vector, 1e-14),
        random,
    };
    ctx.sink.csv("dark_verify", &csv)?;
    ctx.sink.json("dark_verify", &summary)
}

#[derive(Serialize)]
struct FoundSolution {
    energy: f64,
    residual: f64,
    amplitudes: Vec<Amplitude>,
}

#[derive(Serialize)]
struct SectorSolutions {
    sector: &'static str,
    dim: usize,
    o1_nullity: usize,
    o1_singular_values: Vec<f64>,
    solutions: Vec<FoundSolution>,
    conditions_checked: Vec<ConditionCheck>,
    rank_data: Vec<RankDiagnostics>,
}

#[derive(Serialize)]
struct SolveSummary {
    params: RabiParams,
    residual_tol: f64,
    total_found: usize,
    sectors: Vec<SectorSolutions>,
}

pub fn solve_one_photon(ctx: &mut Context) -> CliResult<()> {
    let m = ctx.cfg.require_model()?.clone();
    let params = m.params();
    let tol = ctx.cfg.solver.residual_tol;
    let parities = match m.parity {
        Sector::Even => vec![Parity::Even],
        Sector::Odd => vec![Parity::Odd],
        Sector::Both | Sector::Full => vec![Parity::Even, Parity::Odd],
    };
    let mut csv = Csv::new(&["sector", "solution", "energy", "residual"]);
    let mut sectors = Vec::new();
    for p in parities {
        let report = find_one_photon_solutions(&params, p, tol).stage("one-photon search")?;
        let label = sector_label(Some(p));
        let solutions: Vec<FoundSolution> = report
            .found
            .iter()
            .zip(&report.residuals)
            .map(|((e, v), r)| FoundSolution {
                energy: *e,
                residual: *r,
                amplitudes: amplitudes(&report.space, v, 1e-12),
            })
            .collect();
        for (k, s) in solutions.iter().enumerate() {
            csv.push(vec![
                label.into(),
                k.to_string(),
                fmt_f64(s.energy),
                fmt_f64(s.residual),
            ]);
        }
        sectors.push(SectorSolutions {
            sector: label,
            dim: report.space.dim(),
            o1_nullity: report.o1_nullity,
            o1_singular_values: report.o1_singular_values.clone(),
            solutions,
            conditions_checked: report.conditions_checked.clone(),
            rank_data: report.rank_data.clone(),
        });
    }
    let summary = SolveSummary {
        params,
        residual_tol: tol,
        total_found: sectors.iter().map(|s| s.solutions.len()).sum(),
        sectors,
    };
    ctx.sink.csv("solve_one_photon", &csv)?;
    ctx.sink.json("solve_one_photon", &summary)
}
