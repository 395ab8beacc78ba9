// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense Kronecker-product reference Hamiltonian shared by test targets.

use std::sync::Arc;

use mmrabi::hilbert::{enumerate_basis, BasisState, HilbertSpace, ModelDims, Parity};
use mmrabi::operators::{build_hamiltonian, build_jc_hamiltonian, RabiParams, C64};
use nalgebra::DMatrix;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `a` on a single mode with `d` Fock levels.
fn lowering(d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |r, col| {
        if col == r + 1 {
            c((col as f64).sqrt())
        } else {
            c(0.0)
        }
    })
}

fn identity(d: usize) -> DMatrix<C64> {
    DMatrix::identity(d, d)
}

/// Spin basis `(↑, ↓)`.
fn sigma_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

fn sigma_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// `σ⁺ = |↑⟩⟨↓|`.
fn sigma_plus() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])
}

/// `A_1 ⊗ … ⊗ A_M ⊗ S_1 ⊗ … ⊗ S_N` with `factors` replacing identities.
fn embed(m: usize, n: usize, d: usize, factors: &[(usize, DMatrix<C64>)]) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::identity(1, 1);
    for site in 0..m + n {
        let f = factors
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(|| identity(if site < m { d } else { 2 }));
        out = out.kronecker(&f);
    }
    out
}

/// Dense Hamiltonian on the untruncated product space (`d = n_max + 1` levels per mode).
fn kronecker_hamiltonian(p: &RabiParams, n_max: usize, rwa: bool) -> DMatrix<C64> {
    let (m, n) = (p.modes(), p.qubits());
    let d = n_max + 1;
    let a = lowering(d);
    let ad = a.adjoint();
    let num = &ad * &a;
    let mut h = embed(m, n, d, &[]) * c(0.0);
    for i in 0..m {
        h += embed(m, n, d, &[(i, num.clone())]) * c(p.omega[i]);
    }
    for j in 0..n {
        h += embed(m, n, d, &[(m + j, sigma_z())]) * c(p.delta[j]);
    }
    for i in 0..m {
        for j in 0..n {
            let g = c(p.g[i][j]);
            if rwa {
                h += embed(m, n, d, &[(i, a.clone()), (m + j, sigma_plus())]) * g;
                h += embed(m, n, d, &[(i, ad.clone()), (m + j, sigma_plus().adjoint())]) * g;
            } else {
                h += embed(m, n, d, &[(i, &a + &ad), (m + j, sigma_x())]) * g;
            }
        }
    }
    h
}

fn product_index(s: &BasisState, d: usize) -> usize {
    let photons = s.occupations.iter().fold(0usize, |acc, k| acc * d + k);
    (photons << s.spins.len()) | s.spin_bits()
}

fn max_deviation(space: &Arc<HilbertSpace>, sparse: &DMatrix<C64>, dense: &DMatrix<C64>) -> f64 {
    let d = space.dims().n_max + 1;
    let idx: Vec<usize> = space.states().iter().map(|s| product_index(s, d)).collect();
    let mut worst = 0.0f64;
    for (r, &pr) in idx.iter().enumerate() {
        for (col, &pc) in idx.iter().enumerate() {
            worst = worst.max((sparse[(r, col)] - dense[(pr, pc)]).norm());
        }
    }
    worst
}

fn params(m: usize, n: usize, vals: &[f64]) -> RabiParams {
    let mut it = vals.iter().copied().cycle();
    let omega = (0..m).map(|_| 0.5 + it.next().unwrap()).collect();
    let delta = (0..n).map(|_| it.next().unwrap() - 0.5).collect();
    let g = (0..m)
        .map(|_| (0..n).map(|_| 2.0 * it.next().unwrap() - 1.0).collect())
        .collect();
    RabiParams::new(omega, delta, g).unwrap()
}

pub fn check(m: usize, n: usize, n_max: usize, vals: &[f64]) -> f64 {
    let p = params(m, n, vals);
    let full = Arc::new(enumerate_basis(ModelDims::new(m, n, n_max).unwrap(), None));
    assert!(full.dim() <= 2000);
    let mut worst = 0.0f64;
    for rwa in [false, true] {
        let dense = kronecker_hamiltonian(&p, n_max, rwa);
        let build = if rwa {
            build_jc_hamiltonian
        } else {
            build_hamiltonian
        };
        worst = worst.max(max_deviation(
            &full,
            &build(&p, &full).unwrap().to_dense(),
            &dense,
        ));
        if !rwa {
            for parity in [Parity::Even, Parity::Odd] {
                let sector = Arc::new(enumerate_basis(full.dims(), Some(parity)));
                worst = worst.max(max_deviation(
                    &sector,
                    &build(&p, &sector).unwrap().to_dense(),
                    &dense,
                ));
            }
        }
    }
    worst
}
