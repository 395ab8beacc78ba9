// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed-parameter runs for the reference figures. `--cutoff` overrides the
//! photon cutoff; solver tolerances come from the config when given.

use std::collections::BTreeMap;
use std::sync::Arc;

use clap::ValueEnum;
use mmrabi::dynamics::{minimum_duration, GenerationSetup, ModeWeights, NoiseModel, ReleaseConfig};
use mmrabi::hilbert::{ModelDims, Parity};
use mmrabi::operators::{build_hamiltonian, CouplingKind, RabiParams};
use mmrabi::solutions::{dark_state_3q, dark_state_residual};
use mmrabi::spectra::{confined_level, eigenspectrum, linspace};
use rayon::prelude::*;
use serde::Serialize;

use super::evolution::{closed_generation, release_run, ClosedSummary, Generation, ReleaseSummary};
use super::spectral::sweep_report;
use super::{space, Context};
use crate::emit::{fmt_f64, Csv};
use crate::error::{CliError, CliResult, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig2,
    Fig4,
    Fig5,
}

pub fn run(fig: Figure, ctx: &mut Context) -> CliResult<()> {
    match fig {
        Figure::Fig1a => fig1a(ctx),
        Figure::Fig1b => fig1b(ctx),
        Figure::Fig2 => fig2(ctx),
        Figure::Fig4 => fig4(ctx),
        Figure::Fig5 => fig5(ctx),
    }
}

const SWEEP_POINTS: usize = 50;
const SWEEP_LEVELS: usize = 12;
const LINE_TOL: f64 = 1e-8;

#[derive(Serialize)]
struct LineCheck {
    sector: &'static str,
    points: usize,
    points_on_line: usize,
    max_distance: f64,
    /// Largest two-or-more-photon weight of the confined eigenvector.
    max_weight_two_plus: f64,
}

/// Per grid point, the level nearest `ω = 1` in `parity` and the photon
/// confinement of the best eigenvector there.
fn dark_line(
    template: &RabiParams,
    pattern: &[Vec<f64>],
    grid: &[f64],
    n_max: usize,
    parity: Parity,
) -> CliResult<(Csv, LineCheck)> {
    let sp = space(
        ModelDims {
            modes: template.modes(),
            qubits: template.qubits(),
            n_max,
        },
        Some(parity),
    )?;
    let rows = grid
        .par_iter()
        .map(|&g| {
            let p = RabiParams::with_pattern(1.0, template.delta.clone(), pattern, g)?;
            let h = build_hamiltonian(&p, &sp)?;
            let pairs = eigenspectrum(&h, sp.dim())?;
            let nearest = pairs
                .values
                .iter()
                .copied()
                .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
                .unwrap_or(f64::NAN);
            let weight = confined_level(&sp, &pairs, 1.0, LINE_TOL, 2).map(|(_, _, w)| w);
            Ok((g, nearest, weight))
        })
        .collect::<mmrabi::Result<Vec<_>>>()
        .stage("dark-line scan")?;
    let mut csv = Csv::new(&["g", "nearest_energy", "distance", "weight_two_plus"]);
    for (g, e, w) in &rows {
        csv.push(vec![
            fmt_f64(*g),
            fmt_f64(*e),
            fmt_f64((e - 1.0).abs()),
            w.map_or(String::new(), fmt_f64),
        ]);
    }
    let check = LineCheck {
        sector: if parity == Parity::Even {
            "even"
        } else {
            "odd"
        },
        points: rows.len(),
        points_on_line: rows.iter().filter(|r| (r.1 - 1.0).abs() < LINE_TOL).count(),
        max_distance: rows.iter().map(|r| (r.1 - 1.0).abs()).fold(0.0, f64::max),
        max_weight_two_plus: rows.iter().filter_map(|r| r.2).fold(0.0, f64::max),
    };
    Ok((csv, check))
}

fn fig1a(ctx: &mut Context) -> CliResult<()> {
    let n_max = ctx.cutoff.unwrap_or(6);
    let pattern = vec![vec![1.0; 2]; 2];
    let template =
        RabiParams::with_pattern(1.0, vec![0.9, 0.1], &pattern, 0.0).config_at("fig1a")?;
    let grid = linspace(0.0, 1.0, SWEEP_POINTS);
    let (csv, sweep) = sweep_report(
        &template,
        &pattern,
        &grid,
        n_max,
        &[Parity::Even, Parity::Odd],
        SWEEP_LEVELS,
    )?;
    let (line_csv, line) = dark_line(&template, &pattern, &grid, n_max, Parity::Even)?;
    ctx.sink.csv("fig1a", &csv)?;
    ctx.sink.csv("fig1a_dark_line", &line_csv)?;
    ctx.sink.json(
        "fig1a",
        &serde_json::json!({ "sweep": sweep, "dark_line": line }),
    )
}

fn fig1b(ctx: &mut Context) -> CliResult<()> {
    let n_max = ctx.cutoff.unwrap_or(4);
    // g_11 = g_21 = 2g, all other couplings g.
    let pattern = vec![vec![2.0, 1.0, 1.0]; 2];
    let template = RabiParams::with_pattern(1.0, vec![1.0; 3], &pattern, 0.0).config_at("fig1b")?;
    let grid = linspace(0.0, 1.0, SWEEP_POINTS);
    let (csv, sweep) = sweep_report(
        &template,
        &pattern,
        &grid,
        n_max,
        &[Parity::Even, Parity::Odd],
        SWEEP_LEVELS,
    )?;
    let (line_csv, line) = dark_line(&template, &pattern, &grid, n_max, Parity::Odd)?;
    let full: Arc<_> = space(
        ModelDims {
            modes: 2,
            qubits: 3,
            n_max,
        },
        None,
    )?;
    let mut res_csv = Csv::new(&["g", "residual"]);
    let mut max_residual = 0.0f64;
    for &g in grid.iter().filter(|g| **g > 0.0) {
        let p = RabiParams::with_pattern(1.0, vec![1.0; 3], &pattern, g).config_at("fig1b")?;
        let d = dark_state_3q(&p, &full).config_at("fig1b")?;
        let r = dark_state_residual(&d, &p).stage("three-qubit residual")?;
        max_residual = max_residual.max(r);
        res_csv.push(vec![fmt_f64(g), fmt_f64(r)]);
    }
    ctx.sink.csv("fig1b", &csv)?;
    ctx.sink.csv("fig1b_dark_line", &line_csv)?;
    ctx.sink.csv("fig1b_residuals", &res_csv)?;
    ctx.sink.json(
        "fig1b",
        &serde_json::json!({ "sweep": sweep, "dark_line": line, "max_three_qubit_residual": max_residual }),
    )
}

const FIG2_DURATION: f64 = 100.0;
const FIG2_THRESHOLD: f64 = 0.99;

#[derive(Serialize)]
struct DurationEntry {
    modes: usize,
    duration: Option<f64>,
    fidelity: Option<f64>,
    evaluations: usize,
    note: Option<String>,
}

fn generation(
    modes: usize,
    n_max: usize,
    weights: ModeWeights,
    samples: usize,
    gap_samples: usize,
) -> Generation {
    Generation {
        modes,
        n_max,
        coupling: CouplingKind::Rabi,
        duration: FIG2_DURATION,
        g_max: 0.25,
        delta_split_initial: 0.8,
        weights,
        samples,
        gap_samples,
    }
}

fn fig2(ctx: &mut Context) -> CliResult<()> {
    let n_max = ctx.cutoff.unwrap_or(5);
    let rtol = ctx.cfg.solver.rtol;
    let runs = (2..=5usize)
        .into_par_iter()
        .map(|m| {
            closed_generation(
                &generation(
                    m,
                    n_max,
                    ModeWeights::Uniform,
                    201,
                    if m == 2 { 20 } else { 0 },
                ),
                rtol,
            )
        })
        .collect::<CliResult<Vec<_>>>()?;
    let durations: Vec<DurationEntry> = (2..=5usize)
        .into_par_iter()
        .map(|m| {
            let mut setup = GenerationSetup::new(m, n_max);
            setup.rtol = rtol;
            match minimum_duration(&setup, FIG2_THRESHOLD, 10.0, 300.0, 10.0, 0.25) {
                Ok(r) => Ok(DurationEntry {
                    modes: m,
                    duration: Some(r.duration),
                    fidelity: Some(r.fidelity),
                    evaluations: r.evaluations.len(),
                    note: None,
                }),
                Err(mmrabi::Error::ConvergenceFailure(msg)) => Ok(DurationEntry {
                    modes: m,
                    duration: None,
                    fidelity: None,
                    evaluations: 0,
                    note: Some(msg),
                }),
                Err(e) => Err(CliError::Numerical {
                    stage: "duration search".into(),
                    source: e,
                }),
            }
        })
        .collect::<CliResult<Vec<_>>>()?;

    let first = &runs[0];
    let tr = &first.trajectory;
    let cols: Vec<(String, &[f64])> = ["F[start]", "F[w]", "P[n>=2]", "n[0]", "n[1]", "norm"]
        .iter()
        .filter_map(|k| {
            let key = if k.starts_with('F') || *k == "norm" {
                k.to_string()
            } else {
                format!("<{k}>")
            };
            tr.series(&key).map(|s| (k.to_string(), s))
        })
        .collect();
    ctx.sink
        .csv("fig2_populations", &Csv::from_series(&tr.times, &cols))?;
    if let Some(g) = &first.gap_csv {
        ctx.sink.csv("fig2_gap", g)?;
    }
    let mut fcsv = Csv::new(&["modes", "fidelity"]);
    for (m, r) in (2..).zip(&runs) {
        fcsv.push(vec![m.to_string(), fmt_f64(r.summary.f_m)]);
    }
    ctx.sink.csv("fig2_fidelity", &fcsv)?;
    let mut dcsv = Csv::new(&["modes", "min_duration", "fidelity"]);
    for d in &durations {
        dcsv.push(vec![
            d.modes.to_string(),
            d.duration.map_or(String::new(), fmt_f64),
            d.fidelity.map_or(String::new(), fmt_f64),
        ]);
    }
    ctx.sink.csv("fig2_min_duration", &dcsv)?;

    let f_m: BTreeMap<String, f64> = (2..)
        .zip(&runs)
        .map(|(m, r)| (m.to_string(), r.summary.f_m))
        .collect();
    let runs_summary: BTreeMap<String, &ClosedSummary> = (2..)
        .zip(&runs)
        .map(|(m, r)| (m.to_string(), &r.summary))
        .collect();
    ctx.sink.json(
        "fig2",
        &serde_json::json!({
            "F_2": first.summary.f_m,
            "F_M": f_m,
            "T": FIG2_DURATION,
            "n_max": n_max,
            "threshold": FIG2_THRESHOLD,
            "min_duration": durations,
            "runs": runs_summary,
        }),
    )
}

/// Rescales weights to `Σ w² = M` so the peak coupling matches the uniform case.
fn normalized(w: &[f64]) -> ModeWeights {
    let norm: f64 = w.iter().map(|x| x * x).sum();
    let s = (w.len() as f64 / norm).sqrt();
    ModeWeights::Custom(w.iter().map(|x| x * s).collect())
}

fn storage_noise(modes: usize) -> NoiseModel {
    NoiseModel::uniform(modes, 2, 1e-4, 1e-5, 1e-4)
}

fn emission_outputs(
    ctx: &mut Context,
    stem: &str,
    runs: Vec<(&str, ReleaseRunOut)>,
) -> CliResult<()> {
    let mut summaries: BTreeMap<&str, ReleaseSummary> = BTreeMap::new();
    for (name, run) in runs {
        ctx.sink
            .csv(&format!("{stem}_{name}_generation"), &run.generation_csv)?;
        ctx.sink
            .csv(&format!("{stem}_{name}_emission"), &run.release_csv)?;
        summaries.insert(name, run.summary);
    }
    ctx.sink.json(stem, &summaries)
}

type ReleaseRunOut = super::evolution::ReleaseRun;

fn fig4(ctx: &mut Context) -> CliResult<()> {
    let n_max = ctx.cutoff.unwrap_or(4);
    let rtol = ctx.cfg.solver.open_rtol;
    let cases = [
        ("w3", ModeWeights::Uniform, 3usize),
        (
            "w4",
            normalized(&[1.0, 2f64.sqrt(), 3f64.sqrt(), 2.0]),
            4usize,
        ),
    ];
    let runs = cases
        .par_iter()
        .map(|(name, w, m)| {
            let setup = generation(*m, n_max, w.clone(), 201, 0);
            let cfg = ReleaseConfig::simultaneous(*m, 10.0, 80.0, 0.1);
            release_run(&setup, &storage_noise(*m), &cfg, rtol).map(|r| (*name, r))
        })
        .collect::<CliResult<Vec<_>>>()?;
    emission_outputs(ctx, "fig4", runs)
}

fn fig5(ctx: &mut Context) -> CliResult<()> {
    let n_max = ctx.cutoff.unwrap_or(4);
    let rtol = ctx.cfg.solver.open_rtol;
    let setup = generation(3, n_max, ModeWeights::perfect_w(3), 201, 0);
    let mut cfg = ReleaseConfig::simultaneous(3, 10.0, 100.0, 0.1);
    // Line 3 opens first; lines 1 and 2 follow.
    cfg.delays = vec![20.0, 20.0, 0.0];
    let run = release_run(&setup, &storage_noise(3), &cfg, rtol)?;
    emission_outputs(ctx, "fig5", vec![("perfect_w3", run)])
}
