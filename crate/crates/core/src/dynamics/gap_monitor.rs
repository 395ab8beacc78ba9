// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Instantaneous-spectrum diagnostics along a schedule.
//!
//! At each sample time the tracked level is followed through the dense
//! spectrum of `H(t)`. Eigenvalues within `window` form one degenerate
//! cluster; the other members of the tracked cluster are its partners. For
//! the tracked state `ψ` the monitor reports the partner matrix elements
//! `|⟨p|Ḣ|ψ⟩|`, the largest adiabatic ratio `|⟨m|Ḣ|ψ⟩|/(E_m − E)²` over the
//! rest of the spectrum, and the effective gap: the distance to the nearest
//! level that `Ḣ` actually connects to `ψ`.

use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use super::schedule::ProtocolSchedule;
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::linalg::{dense_hermitian_eigen, orthonormalize};
use crate::operators::{CouplingKind, HamiltonianTerms, C64};
use crate::spectra::min_photon_vector;

/// Cluster width for exact degeneracies.
pub const GAP_WINDOW: f64 = 1e-8;
/// Below this (relative to `‖Ḣψ‖`) a matrix element counts as zero.
const COUPLED_RTOL: f64 = 1e-8;
/// The chosen cluster must hold this many times the runner-up's share.
const TRACKING_DOMINANCE: f64 = 2.0;

/// Choice of representative inside a degenerate cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracking {
    /// Normalized projection of the previous state.
    Continuation,
    /// The member with least weight on states with at least `k` photons.
    MinPhotons(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSample {
    pub t: f64,
    pub energy: f64,
    pub cluster_size: usize,
    /// Share of the previous tracked state inside the chosen cluster.
    pub overlap: f64,
    /// Another cluster holds a comparable share of the previous state.
    pub ambiguous: bool,
    /// `|⟨p|Ḣ|ψ⟩|` for an orthonormal basis of the partners.
    pub partner_elements: Vec<f64>,
    pub max_partner_element: f64,
    pub effective_gap: Option<f64>,
    pub adiabatic_ratio: f64,
}

fn clusters(values: &[f64], window: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] >= window {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Follows `psi0` through the spectrum of `H(t)` at `times` (ascending, within
/// the schedule).
pub fn gap_monitor(
    kind: CouplingKind,
    schedule: &ProtocolSchedule,
    space: &Arc<HilbertSpace>,
    psi0: &DVector<C64>,
    times: &[f64],
    tracking: Tracking,
) -> Result<Vec<GapSample>> {
    schedule.validate()?;
    let d = space.dim();
    if psi0.len() != d {
        return Err(Error::SpaceMismatch(format!(
            "tracked state of dimension {} in a {d}-dimensional space",
            psi0.len()
        )));
    }
    if times.windows(2).any(|w| w[1] < w[0])
        || times.iter().any(|t| *t < 0.0 || *t > schedule.duration)
    {
        return Err(Error::InvalidSchedule(
            "sample times must be ascending and inside the schedule".into(),
        ));
    }
    let terms = HamiltonianTerms::new(kind, space)?;
    let mut prev = psi0 / C64::new(psi0.norm(), 0.0);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let h = terms.assemble(&schedule.params_at(t))?;
        let eig = dense_hermitian_eigen(&h.to_dense());
        let groups = clusters(&eig.values, GAP_WINDOW);
        let weights: Vec<f64> = groups
            .iter()
            .map(|g| {
                g.clone()
                    .map(|k| eig.vectors.column(k).dotc(&prev).norm_sqr())
                    .sum()
            })
            .collect();
        let (best, &overlap) = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::InvalidDims("empty space".into()))?;
        let runner_up = weights
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != best)
            .map(|(_, w)| *w)
            .fold(0.0, f64::max);
        let range = groups[best].clone();
        let members = eig.vectors.columns(range.start, range.len()).into_owned();
        let psi = match tracking {
            Tracking::Continuation => {
                let proj: DVector<C64> = &members * (members.adjoint() * &prev);
                let n = proj.norm();
                if n == 0.0 {
                    members.column(0).into_owned()
                } else {
                    proj / C64::new(n, 0.0)
                }
            }
            Tracking::MinPhotons(k) => {
                let (mut v, _) = min_photon_vector(space, &members, k);
                let phase = v.dotc(&prev);
                if phase.norm() > 0.0 {
                    v *= phase / phase.norm();
                }
                v
            }
        };
        let energy = h.expectation(&psi).re;

        let mut hdot_psi = vec![C64::new(0.0, 0.0); d];
        terms.apply_add(
            &schedule.params_rate(t),
            C64::new(1.0, 0.0),
            psi.as_slice(),
            &mut hdot_psi,
        );
        let hdot_psi = DVector::from_vec(hdot_psi);
        let scale = hdot_psi.norm();

        let mut partner_cols: Vec<DVector<C64>> = vec![psi.clone()];
        partner_cols.extend((0..members.ncols()).map(|c| members.column(c).into_owned()));
        let basis = orthonormalize(&partner_cols, 1e-8);
        let partner_elements: Vec<f64> = basis
            .iter()
            .skip(1)
            .map(|p| p.dotc(&hdot_psi).norm())
            .collect();

        let mut effective_gap: Option<f64> = None;
        let mut ratio = 0.0f64;
        for k in (0..eig.len()).filter(|k| !range.contains(k)) {
            let elem = eig.vectors.column(k).dotc(&hdot_psi).norm();
            let gap = (eig.values[k] - energy).abs();
            ratio = ratio.max(elem / (gap * gap));
            if elem > COUPLED_RTOL * scale && scale > 0.0 {
                effective_gap = Some(effective_gap.map_or(gap, |g| g.min(gap)));
            }
        }
        out.push(GapSample {
            t,
            energy,
            cluster_size: range.len(),
            overlap,
            ambiguous: overlap < TRACKING_DOMINANCE * runner_up,
            max_partner_element: partner_elements.iter().copied().fold(0.0, f64::max),
            partner_elements,
            effective_gap,
            adiabatic_ratio: ratio,
        });
        prev = psi;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::dynamics::closed::initial_up_up;
    use crate::dynamics::schedule::{make_w_generation_schedule, ModeWeights};
    use crate::hilbert::{enumerate_basis, ModelDims, Parity};

    #[test]
    fn cluster_grouping() {
        let g = clusters(&[0.0, 1.0, 1.0 + 1e-10, 2.0], 1e-8);
        assert_eq!(g, vec![0..1, 1..3, 3..4]);
    }

    #[test]
    fn dark_state_partners_are_protected_in_jc() {
        let space = Arc::new(enumerate_basis(
            ModelDims::new(2, 2, 3).unwrap(),
            Some(Parity::Even),
        ));
        let s = make_w_generation_schedule(2, 100.0, 0.05, 0.8, &ModeWeights::Uniform).unwrap();
        let psi0 = initial_up_up(&space).unwrap();
        let times = crate::spectra::linspace(0.0, 99.0, 5);
        let samples = gap_monitor(
            CouplingKind::JaynesCummings,
            &s,
            &space,
            &psi0,
            &times,
            Tracking::MinPhotons(2),
        )
        .unwrap();
        for smp in &samples {
            assert!((smp.energy - 1.0).abs() < 1e-10);
            assert_eq!(smp.cluster_size, 4);
            assert!(smp.max_partner_element < 1e-10, "{smp:?}");
            assert!(!smp.ambiguous);
        }
        assert!((samples[0].effective_gap.unwrap() - 0.8).abs() < 1e-6);
    }
}
