// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Generic search for eigenstates confined to at most one photon.
//!
//! A state `c₀ ⊕ c₁` on the vacuum and one-photon blocks is an eigenstate iff
//!
//! ```text
//! (D₀ − E) c₀ + O₀ᵀ c₁ = 0
//! O₀ c₀ + (D₁ − E) c₁ = 0
//! O₁ c₁ = 0
//! ```
//!
//! The last line restricts `c₁ = Z y` to the null space of `O₁`. Because `D₀`
//! and `D₁` are diagonal and independent of the couplings, the candidate
//! energies are their diagonal entries.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{eigen_residual, ConditionCheck};
use crate::error::Result;
use crate::hilbert::{enumerate_basis, HilbertSpace, ModelDims, Parity};
use crate::linalg::{null_space, orthonormalize};
use crate::operators::{build_hamiltonian, extract_blocks_in, RabiParams, C64};

/// Singular values below this fraction of the largest count as zero.
pub const NULL_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct RankDiagnostics {
    pub energy: f64,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub parity: Parity,
    pub space: Arc<HilbertSpace>,
    /// `(E, unit vector)`; vectors sharing an energy are orthonormal.
    pub found: Vec<(f64, DVector<C64>)>,
    pub residuals: Vec<f64>,
    pub conditions_checked: Vec<ConditionCheck>,
    /// Null space dimension of `O₁` and its singular values.
    pub o1_nullity: usize,
    pub o1_singular_values: Vec<f64>,
    /// One entry per energy candidate.
    pub rank_data: Vec<RankDiagnostics>,
}

impl SolutionReport {
    pub fn is_empty(&self) -> bool {
        self.found.is_empty()
    }

    /// Largest overlap modulus of `v` with the span of the solutions at `energy`.
    pub fn overlap_with(&self, energy: f64, v: &DVector<C64>, e_tol: f64) -> f64 {
        let proj: f64 = self
            .found
            .iter()
            .filter(|(e, _)| (e - energy).abs() <= e_tol)
            .map(|(_, u)| u.dotc(v).norm_sqr())
            .sum();
        proj.sqrt() / v.norm()
    }
}

/// Searches the `parity` sector of `params` for eigenstates with at most one
/// photon; every returned vector has residual below `tol`.
pub fn find_one_photon_solutions(
    params: &RabiParams,
    parity: Parity,
    tol: f64,
) -> Result<SolutionReport> {
    params.validate()?;
    let dims = ModelDims::new(params.modes(), params.qubits(), 2)?;
    let space = Arc::new(enumerate_basis(dims, Some(parity)));
    find_one_photon_solutions_in(params, &space, tol)
}

/// As [`find_one_photon_solutions`] in a given sector space (cutoff ≥ 2).
pub fn find_one_photon_solutions_in(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    tol: f64,
) -> Result<SolutionReport> {
    let blocks = extract_blocks_in(params, space, 1)?;
    let parity = blocks.parity;
    let (d0, d1) = (&blocks.diagonal[0], &blocks.diagonal[1]);
    let (o0, o1) = (&blocks.off_diagonal[0], &blocks.off_diagonal[1]);
    let (n0, n1) = (d0.nrows(), d1.nrows());
    let h = build_hamiltonian(params, space)?;

    let z_ns = null_space(o1, NULL_RTOL);
    let z = z_ns.basis;
    let nz = z.ncols();
    let mut conditions = vec![ConditionCheck {
        name: "O_1 has a nontrivial null space".into(),
        deviation: if nz > 0 {
            0.0
        } else {
            let s = &z_ns.singular_values;
            s.last().copied().unwrap_or(0.0)
                / s.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE)
        },
        satisfied: nz > 0,
    }];

    let scale = d0
        .iter()
        .chain(d1.iter())
        .chain(o0.iter())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let mut candidates: Vec<f64> = d0
        .diagonal()
        .iter()
        .chain(d1.diagonal().iter())
        .copied()
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);

    let mut found = Vec::new();
    let mut residuals = Vec::new();
    let mut rank_data = Vec::new();
    if nz > 0 {
        let o0t_z = o0.transpose() * &z;
        for &e in &candidates {
            let cols = n0 + nz;
            let mut a = DMatrix::zeros(n0 + n1, cols);
            let mut d0e = d0.clone();
            for k in 0..n0 {
                d0e[(k, k)] -= e;
            }
            let mut d1e = d1.clone();
            for k in 0..n1 {
                d1e[(k, k)] -= e;
            }
            a.view_mut((0, 0), (n0, n0)).copy_from(&d0e);
            a.view_mut((0, n0), (n0, nz)).copy_from(&o0t_z);
            a.view_mut((n0, 0), (n1, n0)).copy_from(o0);
            a.view_mut((n0, n0), (n1, nz)).copy_from(&(d1e * &z));
            let ns = null_space(&a, NULL_RTOL);
            rank_data.push(RankDiagnostics {
                energy: e,
                rows: n0 + n1,
                columns: cols,
                rank: ns.rank,
                singular_values: ns.singular_values.clone(),
            });
            let mut vecs = Vec::new();
            for j in 0..ns.basis.ncols() {
                let sol = ns.basis.column(j);
                let c1 = &z * sol.rows(n0, nz);
                let mut v = DVector::<C64>::zeros(space.dim());
                for k in 0..n0 {
                    v[k] = C64::new(sol[k], 0.0);
                }
                for k in 0..n1 {
                    v[n0 + k] = C64::new(c1[k], 0.0);
                }
                vecs.push(v);
            }
            for v in orthonormalize(&vecs, 1e-10) {
                let r = eigen_residual(&h, &v, e)?;
                if r < tol {
                    found.push((e, v));
                    residuals.push(r);
                }
            }
        }
    }
    conditions.push(ConditionCheck {
        name: "some energy candidate admits a solution".into(),
        deviation: if found.is_empty() { 1.0 } else { 0.0 },
        satisfied: !found.is_empty(),
    });
    Ok(SolutionReport {
        parity,
        space: space.clone(),
        found,
        residuals,
        conditions_checked: conditions,
        o1_nullity: nz,
        o1_singular_values: z_ns.singular_values,
        rank_data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::dark_state_2q;

    #[test]
    fn recovers_even_dark_state() {
        let p = RabiParams::new(
            vec![1.0; 2],
            vec![0.9, 0.1],
            vec![vec![0.3, 0.3], vec![0.2, 0.2]],
        )
        .unwrap();
        let report = find_one_photon_solutions(&p, Parity::Even, 1e-10).unwrap();
        let d = dark_state_2q(&p, &report.space).unwrap();
        assert!((report.overlap_with(1.0, &d.vector, 1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn empty_off_condition() {
        let p = RabiParams::new(
            vec![1.0; 2],
            vec![0.9, 0.3],
            vec![vec![0.3, 0.3], vec![0.2, 0.2]],
        )
        .unwrap();
        let report = find_one_photon_solutions(&p, Parity::Even, 1e-10).unwrap();
        assert!(report.is_empty(), "{:?}", report.found);
    }

    #[test]
    fn single_qubit_single_mode_is_empty() {
        for g in [0.05, 0.3, 1.0] {
            for parity in [Parity::Even, Parity::Odd] {
                let p = RabiParams::new(vec![1.0], vec![0.5], vec![vec![g]]).unwrap();
                let report = find_one_photon_solutions(&p, parity, 1e-10).unwrap();
                assert!(report.is_empty());
                assert_eq!(report.o1_nullity, 0);
            }
        }
    }
}
