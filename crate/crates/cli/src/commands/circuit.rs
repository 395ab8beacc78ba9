// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

use mmrabi::circuitmap::{
    effective_couplings, validate_regime, EffectiveRabiParams, RegimeReport, COUPLER_MAP,
};
use mmrabi::operators::RabiParams;
use serde::Serialize;

use super::Context;
use crate::emit::{fmt_f64, Csv};
use crate::error::{CliResult, ConfigError, Stage};

#[derive(Serialize)]
struct CircuitSummary {
    effective: EffectiveRabiParams,
    regime: RegimeReport,
    /// Dimensionless model in the configured frame, if any.
    model: Option<RabiParams>,
}

pub fn circuit_map(ctx: &mut Context) -> CliResult<()> {
    let circuit = ctx
        .cfg
        .circuit
        .as_ref()
        .ok_or_else(|| ConfigError::new("circuit", "circuit-map needs a [circuit] table"))?;
    let regime = validate_regime(circuit);
    let effective = effective_couplings(circuit).config_at("circuit")?;
    let model = match &ctx.cfg.frame {
        Some(f) => Some(
            effective
                .to_rabi_params(f.reference, f.omega.clone(), f.delta.clone())
                .config_at("frame")?,
        ),
        None => None,
    };
    let mut csv = Csv::new(&[
        "coupler",
        "qubit",
        "resonator",
        "g0_ghz",
        "g1_ghz_per_rad",
        "rabi_ghz",
    ]);
    for (k, (q, r)) in COUPLER_MAP.iter().enumerate() {
        csv.push(vec![
            (k + 1).to_string(),
            (q + 1).to_string(),
            (r + 1).to_string(),
            fmt_f64(effective.g0[k]),
            fmt_f64(effective.g1[k]),
            fmt_f64(effective.rabi_couplings[k]),
        ]);
    }
    if !ctx.sink.quiet {
        for w in &regime.warnings {
            eprintln!("warning: {w}");
        }
    }
    ctx.sink.csv("circuit_map", &csv)?;
    ctx.sink.json(
        "circuit_map",
        &CircuitSummary {
            effective,
            regime,
            model,
        },
    )
}
