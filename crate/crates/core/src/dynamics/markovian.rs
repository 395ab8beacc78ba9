// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Dressed-basis Markovian master equation for a static Hamiltonian.
//!
//! With `H = Σ_k ε_k |k⟩⟨k|`, each channel `m` (mode `i`: `C = a_i + a_i†`,
//! rate `κ_in,i + κ_c,i`; qubit `j`: `C = σ_jx`, rate `γ_j`) induces jumps
//! `k → j` for `ε_k > ε_j` at
//!
//! ```text
//! Γ_m^{jk} = rate_m · (ε_k − ε_j)/ω_m · |⟨j|C|k⟩|²
//! ```
//!
//! with `ω_m` the bare channel frequency (`ω_i`, or `2Δ_j`), so that each
//! rate reduces to its bare value in the uncoupled limit.
//!
//! Populations follow the resulting rate equation, coherences damp at
//! `½(Λ_a + Λ_b)` with `Λ_k = Σ_j Γ^{jk}`, and bare `σ_z` dephasing is kept
//! exactly. Used as an oracle for [`super::lindblad::evolve_lindblad`].

use nalgebra::{DMatrix, DVector};

use super::closed::{EvolveOptions, QuantumState, Recorder, Trajectory};
use super::integrator::integrate_piecewise;
use super::lindblad::NoiseModel;
use crate::error::{Error, Result};
use crate::linalg::dense_hermitian_eigen;
use crate::operators::{build_qubit_op, HamiltonianTerms, QubitAxis, RabiParams, C64};

/// Energy differences below this count as degenerate (no jump).
const ENERGY_TOL: f64 = 1e-9;

/// Evolves `rho0` (bare basis) for `duration` under the dressed-basis master
/// equation. States and observables are reported in the bare basis.
pub fn evolve_eigenbasis_markovian(
    terms: &HamiltonianTerms,
    params: &RabiParams,
    kappa_c: &[f64],
    noise: &NoiseModel,
    rho0: &DMatrix<C64>,
    duration: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let space = &terms.space;
    let dims = space.dims();
    let (m, nq) = (dims.modes, dims.qubits);
    params.check_dims(&dims)?;
    noise.validate(m, nq)?;
    if kappa_c.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} line rates for {m} modes",
            kappa_c.len()
        )));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidSchedule(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let d = space.dim();
    if rho0.shape() != (d, d) {
        return Err(Error::SpaceMismatch(format!(
            "density matrix {:?} in a {d}-dimensional space",
            rho0.shape()
        )));
    }
    let eig = dense_hermitian_eigen(&terms.assemble(params)?.to_dense());
    let u = eig.vectors.clone();
    let ud = u.adjoint();
    let eps = &eig.values;

    let mut channels: Vec<(f64, f64, DMatrix<C64>)> = Vec::new();
    for i in 0..m {
        let rate = noise.kappa_in[i] + kappa_c[i];
        if rate > 0.0 {
            let c = terms.coupling[i][0].clone();
            // coupling[i][j] = σ_jx (a_i + a_i†); strip the qubit factor.
            let field = c.matmul(&build_qubit_op(space, 0, QubitAxis::X)?)?;
            channels.push((rate, params.omega[i], &ud * field.to_dense() * &u));
        }
    }
    for j in 0..nq {
        if noise.gamma[j] > 0.0 {
            let c = build_qubit_op(space, j, QubitAxis::X)?;
            let splitting = 2.0 * params.delta[j].abs();
            if splitting == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "qubit {j} has zero splitting"
                )));
            }
            channels.push((noise.gamma[j], splitting, &ud * c.to_dense() * &u));
        }
    }
    // gamma[j][k]: rate k → j.
    let mut gamma = DMatrix::<f64>::zeros(d, d);
    for (rate, w_ref, x) in &channels {
        for k in 0..d {
            for j in 0..d {
                let de = eps[k] - eps[j];
                if de > ENERGY_TOL {
                    gamma[(j, k)] += rate * de / w_ref * x[(j, k)].norm_sqr();
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..d).map(|k| gamma.column(k).sum()).collect();
    let z_sign: Vec<Vec<f64>> = terms
        .sigma_z
        .iter()
        .map(|s| s.diagonal().iter().map(|z| z.re).collect())
        .collect();
    let dephase: Vec<(f64, &Vec<f64>)> = noise
        .gamma_phi
        .iter()
        .zip(&z_sign)
        .filter(|(g, _)| **g > 0.0)
        .map(|(g, s)| (*g, s))
        .collect();

    let to_bare = |rt: &DMatrix<C64>| &u * rt * &ud;
    let rho_t0 = &ud * rho0 * &u;
    let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| {
        let rt = DMatrix::from_column_slice(d, d, y);
        let mut out = DMatrix::<C64>::zeros(d, d);
        for b in 0..d {
            for a in 0..d {
                let w = C64::new(-0.5 * (lambda[a] + lambda[b]), -(eps[a] - eps[b]));
                out[(a, b)] = w * rt[(a, b)];
            }
        }
        for a in 0..d {
            let gain: f64 = (0..d).map(|k| gamma[(a, k)] * rt[(k, k)].re).sum();
            out[(a, a)] += gain;
        }
        if !dephase.is_empty() {
            let bare = to_bare(&rt);
            let mut acc = DMatrix::<C64>::zeros(d, d);
            for (g, s) in &dephase {
                for c in 0..d {
                    for r in 0..d {
                        acc[(r, c)] += bare[(r, c)] * (g * (s[r] * s[c] - 1.0));
                    }
                }
            }
            out += &ud * acc * &u;
        }
        dy.copy_from_slice(out.as_slice());
    };

    let mut y: Vec<C64> = rho_t0.as_slice().to_vec();
    let samples = opts.sample_times(duration);
    let mut rec = Recorder::new(opts);
    let stats = integrate_piecewise(
        &mut f,
        &[0.0, duration],
        &mut y,
        &opts.integrator,
        &samples,
        &mut |t, y| {
            let rho = to_bare(&DMatrix::from_column_slice(d, d, y));
            let trace: f64 = (0..d).map(|k| rho[(k, k)].re).sum();
            rec.push("trace", trace);
            rec.record(t, QuantumState::Mixed(rho))
        },
    )?;
    let rho = to_bare(&DMatrix::from_column_slice(d, d, &y));
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        observables: rec.observables,
        final_state: QuantumState::Mixed(rho),
        stats,
    })
}

/// Dressed eigenbasis populations `⟨k|ρ|k⟩` of `rho` for `params`.
pub fn eigenbasis_populations(
    terms: &HamiltonianTerms,
    params: &RabiParams,
    rho: &DMatrix<C64>,
) -> Result<DVector<f64>> {
    let eig = dense_hermitian_eigen(&terms.assemble(params)?.to_dense());
    let rt = eig.vectors.adjoint() * rho * &eig.vectors;
    Ok(DVector::from_iterator(
        rt.nrows(),
        (0..rt.nrows()).map(|k| rt[(k, k)].re),
    ))
}
