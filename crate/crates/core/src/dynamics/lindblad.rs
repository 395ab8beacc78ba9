// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Bare-basis Lindblad evolution
//!
//! ```text
//! ρ̇ = −i[H(t), ρ] + Σ_i (κ_in,i + κ_c,i(t)) D[a_i]ρ + Σ_j γ_j D[σ_j⁻]ρ
//!      + Σ_j γ_φ,j (σ_jz ρ σ_jz − ρ),     D[L]ρ = LρL† − ½{L†L, ρ}
//! ```
//!
//! Alongside `ρ` the integrator carries three photon-ledger accumulators per
//! run: photons emitted into each line `∫κ_c,i⟨n_i⟩`, photons lost
//! intrinsically `∫κ_in,i⟨n_i⟩`, and the net number handed from the qubits to
//! the modes `∫ i⟨[H, N]⟩`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::closed::{EvolveOptions, QuantumState, Recorder, Trajectory};
use super::integrator::integrate_piecewise;
use super::schedule::ProtocolSchedule;
use crate::error::{Error, Result};
use crate::operators::{
    build_exchange_term, build_mode_lowering, build_qubit_op, HamiltonianTerms, QubitAxis,
    SparseOperator, C64,
};

/// Threshold below which a negative density-matrix eigenvalue is a failure.
pub const POSITIVITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Intrinsic resonator decay per mode.
    pub kappa_in: Vec<f64>,
    /// Qubit relaxation per qubit.
    pub gamma: Vec<f64>,
    /// Qubit dephasing per qubit.
    pub gamma_phi: Vec<f64>,
}

impl NoiseModel {
    pub fn none(modes: usize, qubits: usize) -> Self {
        Self {
            kappa_in: vec![0.0; modes],
            gamma: vec![0.0; qubits],
            gamma_phi: vec![0.0; qubits],
        }
    }

    pub fn uniform(modes: usize, qubits: usize, kappa_in: f64, gamma: f64, gamma_phi: f64) -> Self {
        Self {
            kappa_in: vec![kappa_in; modes],
            gamma: vec![gamma; qubits],
            gamma_phi: vec![gamma_phi; qubits],
        }
    }

    pub fn validate(&self, modes: usize, qubits: usize) -> Result<()> {
        if self.kappa_in.len() != modes
            || self.gamma.len() != qubits
            || self.gamma_phi.len() != qubits
        {
            return Err(Error::DimensionMismatch(format!(
                "noise model sized for {} modes / {} qubits, model has {modes} / {qubits}",
                self.kappa_in.len(),
                self.gamma.len()
            )));
        }
        if self
            .kappa_in
            .iter()
            .chain(&self.gamma)
            .chain(&self.gamma_phi)
            .any(|r| !(*r >= 0.0) || !r.is_finite())
        {
            return Err(Error::InvalidParameter(
                "noise rates must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

fn diag_of(op: &SparseOperator) -> Vec<f64> {
    op.diagonal().iter().map(|z| z.re).collect()
}

/// Smallest eigenvalue of the Hermitian part of `rho`.
pub fn min_eigenvalue(rho: &DMatrix<C64>) -> f64 {
    let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    nalgebra::SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Integrates the master equation on the unrestricted space of `terms`.
///
/// Records `trace`, `min_eigenvalue` (when checking positivity), `n[i]`,
/// `emission[i] = κ_c,i⟨n_i⟩`, the cumulative ledger entries `emitted[i]`,
/// `lost[i]`, `exchanged`, and `ledger = ΔN − exchanged + Σ emitted + Σ lost`,
/// which stays at zero up to integration error.
pub fn evolve_lindblad(
    terms: &HamiltonianTerms,
    schedule: &ProtocolSchedule,
    noise: &NoiseModel,
    rho0: &DMatrix<C64>,
    opts: &EvolveOptions,
    check_positivity: bool,
) -> Result<Trajectory> {
    schedule.validate()?;
    let space = &terms.space;
    let dims = space.dims();
    let (m, nq) = (dims.modes, dims.qubits);
    noise.validate(m, nq)?;
    if schedule.modes() != m || schedule.qubits() != nq {
        return Err(Error::DimensionMismatch(
            "schedule and space describe different models".into(),
        ));
    }
    let d = space.dim();
    if rho0.shape() != (d, d) {
        return Err(Error::SpaceMismatch(format!(
            "density matrix {:?} in a {d}-dimensional space",
            rho0.shape()
        )));
    }
    let lower: Vec<SparseOperator> = (0..m)
        .map(|i| build_mode_lowering(space, i))
        .collect::<Result<_>>()?;
    let sigma_minus: Vec<SparseOperator> = (0..nq)
        .map(|j| build_qubit_op(space, j, QubitAxis::Lower))
        .collect::<Result<_>>()?;
    let exchange: Vec<Vec<SparseOperator>> = (0..m)
        .map(|i| {
            (0..nq)
                .map(|j| build_exchange_term(space, i, j))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let number: Vec<Vec<f64>> = terms.number.iter().map(diag_of).collect();
    let z_sign: Vec<Vec<f64>> = terms.sigma_z.iter().map(diag_of).collect();
    let up: Vec<Vec<f64>> = z_sign
        .iter()
        .map(|s| s.iter().map(|x| (1.0 + x) / 2.0).collect())
        .collect();

    let dd = d * d;
    let n_acc = 2 * m + 1;
    let mut k_buf = vec![C64::new(0.0, 0.0); dd];
    let mut y_buf = vec![C64::new(0.0, 0.0); dd];
    let mut yt_buf = vec![C64::new(0.0, 0.0); dd];
    let mut j_buf = vec![C64::new(0.0, 0.0); dd];
    let mut decay = vec![0.0; d];
    let minus_i = C64::new(0.0, -1.0);

    let mut f = |t: f64, y: &[C64], dy: &mut [C64]| {
        let rho = &y[..dd];
        let p = schedule.params_at(t);
        let kc = schedule.kappa_c_at(t);
        decay.fill(0.0);
        let dephase_total: f64 = noise.gamma_phi.iter().sum();
        for (k, dk) in decay.iter_mut().enumerate() {
            let mut r = dephase_total;
            for i in 0..m {
                r += (noise.kappa_in[i] + kc[i]) * number[i][k];
            }
            for j in 0..nq {
                r += noise.gamma[j] * up[j][k];
            }
            *dk = r;
        }
        // K = −iHρ − ½ Γ ρ.
        for c in 0..d {
            for r in 0..d {
                k_buf[c * d + r] = rho[c * d + r] * (-0.5 * decay[r]);
            }
        }
        terms.mul_dense_add(&p, minus_i, rho, &mut k_buf);
        let (drho, dacc) = dy.split_at_mut(dd);
        for c in 0..d {
            for r in 0..d {
                drho[c * d + r] = k_buf[c * d + r] + k_buf[r * d + c].conj();
            }
        }
        let mut jump = |op: &SparseOperator, rate: f64, drho: &mut [C64]| {
            if rate == 0.0 {
                return;
            }
            op.mul_dense_into(rho, &mut y_buf);
            for c in 0..d {
                for r in 0..d {
                    yt_buf[c * d + r] = y_buf[r * d + c].conj();
                }
            }
            op.mul_dense_into(&yt_buf, &mut j_buf);
            for (o, x) in drho.iter_mut().zip(&j_buf) {
                *o += x * rate;
            }
        };
        for i in 0..m {
            jump(&lower[i], noise.kappa_in[i] + kc[i], drho);
        }
        for j in 0..nq {
            jump(&sigma_minus[j], noise.gamma[j], drho);
        }
        for j in 0..nq {
            let g = noise.gamma_phi[j];
            if g == 0.0 {
                continue;
            }
            let s = &z_sign[j];
            for c in 0..d {
                for r in 0..d {
                    drho[c * d + r] += rho[c * d + r] * (g * s[r] * s[c]);
                }
            }
        }
        for i in 0..m {
            let n_i: f64 = (0..d).map(|k| number[i][k] * rho[k * d + k].re).sum();
            dacc[i] = C64::new(kc[i] * n_i, 0.0);
            dacc[m + i] = C64::new(noise.kappa_in[i] * n_i, 0.0);
        }
        let mut ex = C64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..nq {
                let g = p.g[i][j];
                if g != 0.0 {
                    ex += exchange[i][j].trace_product(rho) * g;
                }
            }
        }
        dacc[2 * m] = C64::new((C64::new(0.0, 1.0) * ex).re, 0.0);
    };

    let mut y: Vec<C64> = rho0.as_slice().to_vec();
    y.extend(std::iter::repeat_n(C64::new(0.0, 0.0), n_acc));
    let n_total0: f64 = (0..d)
        .map(|k| number.iter().map(|n| n[k]).sum::<f64>() * rho0[(k, k)].re)
        .sum();
    let samples = opts.sample_times(schedule.duration);
    let mut rec = Recorder::new(opts);
    let stats = integrate_piecewise(
        &mut f,
        &schedule.breakpoints(),
        &mut y,
        &opts.integrator,
        &samples,
        &mut |t, y| {
            let rho = DMatrix::from_column_slice(d, d, &y[..dd]);
            let acc = &y[dd..];
            let trace: f64 = (0..d).map(|k| rho[(k, k)].re).sum();
            rec.push("trace", trace);
            if check_positivity {
                let me = min_eigenvalue(&rho);
                rec.push("min_eigenvalue", me);
                if me < -POSITIVITY_TOL {
                    return Err(Error::PositivityLoss {
                        t,
                        min_eigenvalue: me,
                    });
                }
            }
            let kc = schedule.kappa_c_at(t);
            let mut n_total = 0.0;
            let mut out_total = 0.0;
            for i in 0..m {
                let n_i: f64 = (0..d).map(|k| number[i][k] * rho[(k, k)].re).sum();
                n_total += n_i;
                rec.push(&format!("n[{i}]"), n_i);
                rec.push(&format!("emission[{i}]"), kc[i] * n_i);
                rec.push(&format!("emitted[{i}]"), acc[i].re);
                rec.push(&format!("lost[{i}]"), acc[m + i].re);
                out_total += acc[i].re + acc[m + i].re;
            }
            rec.push("exchanged", acc[2 * m].re);
            rec.push("ledger", n_total - n_total0 - acc[2 * m].re + out_total);
            rec.record(t, QuantumState::Mixed(rho))
        },
    )?;
    let rho = DMatrix::from_column_slice(d, d, &y[..dd]);
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        observables: rec.observables,
        final_state: QuantumState::Mixed(rho),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::dynamics::closed::trace_distance;
    use crate::dynamics::schedule::PiecewiseLinear;
    use crate::hilbert::{enumerate_basis, BasisState, ModelDims, Spin};
    use crate::operators::{CouplingKind, RabiParams};

    #[test]
    fn single_mode_damping_is_exponential() {
        let space = Arc::new(enumerate_basis(ModelDims::new(1, 1, 1).unwrap(), None));
        let terms = HamiltonianTerms::new(CouplingKind::Rabi, &space).unwrap();
        let p = RabiParams::new(vec![1.0], vec![0.3], vec![vec![0.0]]).unwrap();
        let mut sched = ProtocolSchedule::frozen(&p, 10.0).unwrap();
        sched.kappa_c[0] = PiecewiseLinear::constant(0.2);
        let noise = NoiseModel::uniform(1, 1, 0.05, 0.0, 0.0);
        let k = space
            .index_of(&BasisState::new(vec![1], vec![Spin::Down]))
            .unwrap();
        let mut rho0 = DMatrix::zeros(space.dim(), space.dim());
        rho0[(k, k)] = C64::new(1.0, 0.0);
        let tr = evolve_lindblad(
            &terms,
            &sched,
            &noise,
            &rho0,
            &EvolveOptions::new(1e-10, 11),
            true,
        )
        .unwrap();
        for (t, n) in tr.times.iter().zip(tr.series("n[0]").unwrap()) {
            assert!((n - (-0.25 * t).exp()).abs() < 1e-8);
        }
        let emitted = tr.last("emitted[0]").unwrap();
        assert!((emitted - 0.8 * (1.0 - (-2.5f64).exp())).abs() < 1e-8);
        assert!(tr.series("ledger").unwrap().iter().all(|x| x.abs() < 1e-8));
    }

    #[test]
    fn zero_rates_reproduce_unitary_evolution() {
        let space = Arc::new(enumerate_basis(ModelDims::new(2, 2, 2).unwrap(), None));
        let terms = HamiltonianTerms::new(CouplingKind::Rabi, &space).unwrap();
        let sched = super::super::schedule::make_w_generation_schedule(
            2,
            10.0,
            0.25,
            0.8,
            &super::super::schedule::ModeWeights::Uniform,
        )
        .unwrap();
        let psi0 = super::super::closed::initial_up_up(&space).unwrap();
        let opts = EvolveOptions::new(1e-10, 3);
        let pure = super::super::closed::evolve_schrodinger(&terms, &sched, &psi0, &opts).unwrap();
        let rho0 = &psi0 * psi0.adjoint();
        let open =
            evolve_lindblad(&terms, &sched, &NoiseModel::none(2, 2), &rho0, &opts, true).unwrap();
        let d = trace_distance(&pure.final_state.density(), &open.final_state.density());
        assert!(d < 1e-6, "{d}");
        assert!(open
            .series("ledger")
            .unwrap()
            .iter()
            .all(|x| x.abs() < 1e-7));
    }
}
