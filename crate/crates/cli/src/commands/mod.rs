// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each writes one or more CSV tables and a JSON
//! summary named after the subcommand into the output directory.

mod circuit;
mod evolution;
mod reproduce;
mod spectral;

use std::sync::Arc;

use mmrabi::hilbert::{enumerate_basis, HilbertSpace, ModelDims, Parity};
use nalgebra::DVector;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::emit::Sink;
use crate::error::{CliResult, Stage};

pub use reproduce::Figure;

/// Everything a subcommand needs.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub seed: u64,
    /// `--cutoff` override, already applied to `cfg.model`.
    pub cutoff: Option<usize>,
    pub sink: Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Basis,
    Spectrum,
    Sweep,
    DarkVerify,
    SolveOnePhoton,
    Adiabatic,
    Lindblad,
    CatchRelease,
    CircuitMap,
}

pub fn run(cmd: Command, ctx: &mut Context) -> CliResult<()> {
    match cmd {
        Command::Basis => spectral::basis(ctx),
        Command::Spectrum => spectral::spectrum(ctx),
        Command::Sweep => spectral::sweep(ctx),
        Command::DarkVerify => spectral::dark_verify(ctx),
        Command::SolveOnePhoton => spectral::solve_one_photon(ctx),
        Command::Adiabatic => evolution::adiabatic(ctx),
        Command::Lindblad => evolution::lindblad(ctx),
        Command::CatchRelease => evolution::catch_release(ctx),
        Command::CircuitMap => circuit::circuit_map(ctx),
    }
}

pub fn run_figure(fig: Figure, ctx: &mut Context) -> CliResult<()> {
    reproduce::run(fig, ctx)
}

fn space(dims: ModelDims, sector: Option<Parity>) -> CliResult<Arc<HilbertSpace>> {
    dims.validate().config_at("model")?;
    Ok(Arc::new(enumerate_basis(dims, sector)))
}

fn sector_label(sector: Option<Parity>) -> &'static str {
    match sector {
        Some(Parity::Even) => "even",
        Some(Parity::Odd) => "odd",
        None => "full",
    }
}

/// Basis amplitude above `floor`, for JSON listings of states.
#[derive(Debug, Clone, Serialize)]
struct Amplitude {
    state: String,
    re: f64,
    im: f64,
}

fn amplitudes(
    space: &HilbertSpace,
    v: &DVector<mmrabi::operators::C64>,
    floor: f64,
) -> Vec<Amplitude> {
    space
        .states()
        .iter()
        .zip(v.iter())
        .filter(|(_, a)| a.norm() > floor)
        .map(|(s, a)| Amplitude {
            state: s.to_string(),
            re: a.re,
            im: a.im,
        })
        .collect()
}

/// Weight of `v` on states with at least `k` photons.
fn weight_above(space: &HilbertSpace, v: &DVector<mmrabi::operators::C64>, k: usize) -> f64 {
    space
        .states()
        .iter()
        .zip(v.iter())
        .filter(|(s, _)| s.total_photons() >= k)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Populations of the `count` most occupied basis states, largest first,
/// ties broken by basis order.
fn top_populations(space: &HilbertSpace, diag: &[f64], count: usize) -> Vec<(String, f64)> {
    let mut idx: Vec<usize> = (0..diag.len()).collect();
    idx.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]).then(a.cmp(&b)));
    idx.into_iter()
        .take(count)
        .map(|k| (space.states()[k].to_string(), diag[k]))
        .collect()
}
