// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Eigenspectra, coupling sweeps, degeneracy counting and cutoff convergence.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{enumerate_basis, HilbertSpace, ModelDims, Parity};
use crate::linalg::{dense_hermitian_eigen, lowest_eigenpairs, EigenPairs};
use crate::operators::{build_hamiltonian, RabiParams, SparseOperator, C64, DENSE_THRESHOLD};

/// Default window for counting degenerate levels (units of ω).
pub const DEGENERACY_WINDOW: f64 = 1e-6;

/// Lowest `n_levels` eigenpairs, ascending.
pub fn eigenspectrum(h: &SparseOperator, n_levels: usize) -> Result<EigenPairs> {
    lowest_eigenpairs(h, n_levels, DENSE_THRESHOLD)
}

/// Number of eigenvalues with `|E − target| < window`.
pub fn degeneracy_count(h: &SparseOperator, target: f64, window: f64) -> usize {
    dense_hermitian_eigen(&h.to_dense())
        .values
        .iter()
        .filter(|e| (**e - target).abs() < window)
        .count()
}

/// Within the span of `vectors` (orthonormal columns), the unit vector with the
/// least weight on states with at least `k` photons, and that weight.
pub fn min_photon_vector(
    space: &HilbertSpace,
    vectors: &DMatrix<C64>,
    k: usize,
) -> (DVector<C64>, f64) {
    let mask: Vec<f64> = space
        .states()
        .iter()
        .map(|s| if s.total_photons() >= k { 1.0 } else { 0.0 })
        .collect();
    let pq = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * mask[i]
    });
    let m = vectors.adjoint() * pq;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = dense_hermitian_eigen(&m);
    let v = vectors * eig.vector(0);
    let v = &v / C64::new(v.norm(), 0.0);
    let w = v.iter().zip(&mask).map(|(a, m)| a.norm_sqr() * m).sum();
    (v, w)
}

/// The eigenvector at `target` (cluster within `window`) with the least
/// weight on states with at least `k` photons.
pub fn confined_level(
    space: &HilbertSpace,
    pairs: &EigenPairs,
    target: f64,
    window: f64,
    k: usize,
) -> Option<(f64, DVector<C64>, f64)> {
    let idx: Vec<usize> = (0..pairs.len())
        .filter(|&j| (pairs.values[j] - target).abs() < window)
        .collect();
    if idx.is_empty() {
        return None;
    }
    let q = DMatrix::from_fn(pairs.vectors.nrows(), idx.len(), |i, j| {
        pairs.vectors[(i, idx[j])]
    });
    let (v, w) = min_photon_vector(space, &q, k);
    let nearest = idx
        .iter()
        .map(|&j| pairs.values[j])
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .unwrap();
    Some((nearest, v, w))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTable {
    pub sweep_values: Vec<f64>,
    pub parities: Vec<Parity>,
    /// `levels[point][parity][k]`, ascending in `k`.
    pub levels: Vec<Vec<Vec<f64>>>,
    pub template: RabiParams,
    pub pattern: Vec<Vec<f64>>,
    pub dims: ModelDims,
}

impl SpectrumTable {
    /// `g,parity,level_index,energy` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("g,parity,level_index,energy\n");
        for (g, point) in self.sweep_values.iter().zip(&self.levels) {
            for (parity, lv) in self.parities.iter().zip(point) {
                for (k, e) in lv.iter().enumerate() {
                    let _ = writeln!(out, "{g:.16e},{parity},{k},{e:.16e}");
                }
            }
        }
        out
    }

    pub fn sector_levels(&self, parity: Parity) -> Option<Vec<&Vec<f64>>> {
        let p = self.parities.iter().position(|x| *x == parity)?;
        Some(self.levels.iter().map(|pt| &pt[p]).collect())
    }

    /// Per point, the distance from `energy` to the nearest level of `parity`.
    pub fn distance_to(&self, parity: Parity, energy: f64) -> Option<Vec<f64>> {
        Some(
            self.sector_levels(parity)?
                .iter()
                .map(|lv| {
                    lv.iter()
                        .map(|e| (e - energy).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect(),
        )
    }
}

/// Spectrum of `template` with couplings `g · pattern` over `g_grid`, per parity.
pub fn sweep_coupling(
    template: &RabiParams,
    pattern: &[Vec<f64>],
    g_grid: &[f64],
    n_max: usize,
    parities: &[Parity],
    n_levels: usize,
) -> Result<SpectrumTable> {
    if g_grid.is_empty() {
        return Err(Error::InvalidParameter("empty coupling grid".into()));
    }
    let dims = ModelDims::new(template.modes(), template.qubits(), n_max)?;
    let spaces: Vec<Arc<HilbertSpace>> = parities
        .iter()
        .map(|p| Arc::new(enumerate_basis(dims, Some(*p))))
        .collect();
    let levels = g_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &g)| {
            let couplings = pattern
                .iter()
                .map(|row| row.iter().map(|x| x * g).collect())
                .collect();
            let params =
                RabiParams::new(template.omega.clone(), template.delta.clone(), couplings)?;
            spaces
                .iter()
                .map(|space| {
                    let h = build_hamiltonian(&params, space)?;
                    let n = n_levels.min(space.dim());
                    eigenspectrum(&h, n).map(|e| e.values).map_err(|e| match e {
                        Error::ConvergenceFailure(msg) => {
                            Error::ConvergenceFailure(format!("grid point {idx} (g = {g}): {msg}"))
                        }
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable {
        sweep_values: g_grid.to_vec(),
        parities: parities.to_vec(),
        levels,
        template: template.clone(),
        pattern: pattern.to_vec(),
        dims,
    })
}

/// Evenly spaced grid with `n` points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub g: f64,
    pub energy: f64,
    pub parity_a: Parity,
    pub parity_b: Parity,
}

/// Points where another level of `parity` passes through the flat line at
/// `energy` (the line's sorted index changes), linearly interpolated.
pub fn line_crossings(
    table: &SpectrumTable,
    parity: Parity,
    energy: f64,
    tol: f64,
) -> Vec<Crossing> {
    let Some(levels) = table.sector_levels(parity) else {
        return vec![];
    };
    let index_of_line = |lv: &Vec<f64>| lv.iter().position(|e| (e - energy).abs() < tol);
    let mut out = Vec::new();
    for w in 1..levels.len() {
        let (Some(a), Some(b)) = (index_of_line(levels[w - 1]), index_of_line(levels[w])) else {
            continue;
        };
        if a == b {
            continue;
        }
        // The crossing level sits at index b on the left and a on the right.
        let (g0, g1) = (table.sweep_values[w - 1], table.sweep_values[w]);
        let (e0, e1) = (levels[w - 1][b], levels[w][a]);
        let t = if e1 != e0 {
            (energy - e0) / (e1 - e0)
        } else {
            0.5
        };
        out.push(Crossing {
            g: g0 + t.clamp(0.0, 1.0) * (g1 - g0),
            energy,
            parity_a: parity,
            parity_b: parity,
        });
    }
    out
}

/// Crossings between levels of two different sectors, linearly interpolated.
pub fn sector_crossings(table: &SpectrumTable, a: Parity, b: Parity) -> Vec<Crossing> {
    let (Some(la), Some(lb)) = (table.sector_levels(a), table.sector_levels(b)) else {
        return vec![];
    };
    let mut out = Vec::new();
    for w in 1..la.len() {
        let (g0, g1) = (table.sweep_values[w - 1], table.sweep_values[w]);
        for i in 0..la[w].len() {
            for j in 0..lb[w].len() {
                let d0 = la[w - 1][i] - lb[w - 1][j];
                let d1 = la[w][i] - lb[w][j];
                if d0 != 0.0 && d0.signum() != d1.signum() {
                    let t = d0 / (d0 - d1);
                    out.push(Crossing {
                        g: g0 + t * (g1 - g0),
                        energy: la[w - 1][i] + t * (la[w][i] - la[w - 1][i]),
                        parity_a: a,
                        parity_b: b,
                    });
                }
            }
        }
    }
    out.sort_by(|x, y| x.g.total_cmp(&y.g));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Probe {
    /// Lowest eigenvalue.
    GroundEnergy,
    /// Eigenvalue closest to the given energy.
    NearestLevel(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub cutoffs: Vec<usize>,
    pub values: Vec<f64>,
    /// `values[k+1] − values[k]`.
    pub differences: Vec<f64>,
    /// Absolute differences never grow.
    pub monotone: bool,
}

/// Evaluates `probe` at each cutoff (ascending) in the given sector.
pub fn convergence_report(
    params: &RabiParams,
    sector: Option<Parity>,
    cutoffs: &[usize],
    probe: Probe,
) -> Result<ConvergenceReport> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "cutoffs must be strictly ascending".into(),
        ));
    }
    let values = cutoffs
        .par_iter()
        .map(|&c| {
            let dims = ModelDims::new(params.modes(), params.qubits(), c)?;
            let space = Arc::new(enumerate_basis(dims, sector));
            let h = build_hamiltonian(params, &space)?;
            let all = if space.dim() <= DENSE_THRESHOLD {
                dense_hermitian_eigen(&h.to_dense()).values
            } else {
                eigenspectrum(&h, 16)?.values
            };
            Ok(match probe {
                Probe::GroundEnergy => all[0],
                Probe::NearestLevel(t) => all
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
                    .unwrap(),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let differences: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let monotone = differences
        .windows(2)
        .all(|w| w[1].abs() <= w[0].abs() + 1e-14);
    Ok(ConvergenceReport {
        cutoffs: cutoffs.to_vec(),
        values,
        differences,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_spectrum_is_closed_form() {
        let dims = ModelDims::new(2, 2, 2).unwrap();
        let space = Arc::new(enumerate_basis(dims, None));
        let p = RabiParams::new(vec![1.0, 1.3], vec![0.2, 0.35], vec![vec![0.0; 2]; 2]).unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let ev = eigenspectrum(&h, space.dim()).unwrap();
        let mut expected: Vec<f64> = space
            .states()
            .iter()
            .map(|s| {
                s.occupations[0] as f64
                    + 1.3 * s.occupations[1] as f64
                    + s.spins[0].sign() * 0.2
                    + s.spins[1].sign() * 0.35
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in ev.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn one_point_sweep_is_a_single_solve() {
        let p = RabiParams::new(vec![1.0; 2], vec![0.9, 0.1], vec![vec![0.0; 2]; 2]).unwrap();
        let pattern = vec![vec![1.0; 2]; 2];
        let t = sweep_coupling(&p, &pattern, &[0.4], 3, &[Parity::Even], 5).unwrap();
        assert_eq!(t.levels.len(), 1);
        let direct = {
            let space = Arc::new(enumerate_basis(
                ModelDims::new(2, 2, 3).unwrap(),
                Some(Parity::Even),
            ));
            let q = RabiParams::with_pattern(1.0, vec![0.9, 0.1], &pattern, 0.4).unwrap();
            eigenspectrum(&build_hamiltonian(&q, &space).unwrap(), 5)
                .unwrap()
                .values
        };
        assert_eq!(t.levels[0][0], direct);
        assert!(t.to_csv().lines().count() == 6);
    }

    #[test]
    fn minimum_photon_vector_in_degenerate_cluster() {
        // At g = 0 the level ω holds |0,↑↑⟩ and |2,↓↓⟩-type states.
        let space = Arc::new(enumerate_basis(
            ModelDims::new(2, 2, 3).unwrap(),
            Some(Parity::Even),
        ));
        let p = RabiParams::new(vec![1.0; 2], vec![0.9, 0.1], vec![vec![0.0; 2]; 2]).unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let ev = dense_hermitian_eigen(&h.to_dense());
        let (e, _, w) = confined_level(&space, &ev, 1.0, 1e-8, 2).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        assert!(w < 1e-24);
    }

    #[test]
    fn convergence_single_cutoff() {
        let p = RabiParams::new(vec![1.0], vec![0.5], vec![vec![0.3]]).unwrap();
        let r = convergence_report(&p, None, &[4], Probe::GroundEnergy).unwrap();
        assert_eq!(r.values.len(), 1);
        assert!(r.differences.is_empty());
    }
}
