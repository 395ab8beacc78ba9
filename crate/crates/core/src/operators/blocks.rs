// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Photon-number block structure of a parity sector.
//!
//! In a fixed sector the Hamiltonian is block tridiagonal in the total photon
//! number: `D_k` acts within the `k`-photon block and `O_k` maps block `k`
//! into block `k+1`.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{build_hamiltonian, RabiParams};
use crate::error::{Error, Result};
use crate::hilbert::{enumerate_basis, HilbertSpace, ModelDims, Parity};

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub parity: Parity,
    /// `D_0 ..= D_{k_max+1}`.
    pub diagonal: Vec<DMatrix<f64>>,
    /// `O_0 ..= O_{k_max}`; `O_k` has shape `(|k+1|, |k|)`.
    pub off_diagonal: Vec<DMatrix<f64>>,
    pub k_max: usize,
}

impl BlockDecomposition {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.diagonal.iter().map(|d| d.nrows()).collect()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = vec![0];
        for s in self.block_sizes() {
            acc.push(acc.last().unwrap() + s);
        }
        acc
    }

    /// Block-tridiagonal matrix on blocks `0 ..= k_max+1`.
    pub fn reassemble(&self) -> DMatrix<f64> {
        let off = self.offsets();
        let n = *off.last().unwrap();
        let mut h = DMatrix::zeros(n, n);
        for (k, d) in self.diagonal.iter().enumerate() {
            h.view_mut((off[k], off[k]), d.shape()).copy_from(d);
        }
        for (k, o) in self.off_diagonal.iter().enumerate() {
            h.view_mut((off[k + 1], off[k]), o.shape()).copy_from(o);
            h.view_mut((off[k], off[k + 1]), (o.ncols(), o.nrows()))
                .copy_from(&o.transpose());
        }
        h
    }

    /// Coefficient matrix of `(H − E)c = 0` for a state confined to blocks
    /// `0 ..= k_max`: rows run over blocks `0 ..= k_max+1`, columns over
    /// blocks `0 ..= k_max`.
    pub fn coefficient_matrix(&self, energy: f64) -> DMatrix<f64> {
        let off = self.offsets();
        let rows = off[self.k_max + 2];
        let cols = off[self.k_max + 1];
        let mut a = self.reassemble().view((0, 0), (rows, cols)).into_owned();
        for i in 0..cols {
            a[(i, i)] -= energy;
        }
        a
    }
}

/// Blocks of the sector Hamiltonian in an existing space (must carry a sector
/// and a cutoff of at least `k_max + 1`).
pub fn extract_blocks_in(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    k_max: usize,
) -> Result<BlockDecomposition> {
    let parity = space.sector().ok_or_else(|| {
        Error::InvalidParameter("block decomposition needs a parity-restricted space".into())
    })?;
    let n_max = space.dims().n_max;
    if k_max + 1 > n_max {
        return Err(Error::CutoffTooSmall(format!(
            "k_max = {k_max} needs a cutoff of at least {}, space has {n_max}",
            k_max + 1
        )));
    }
    let h = build_hamiltonian(params, space)?
        .to_dense_real()
        .ok_or_else(|| Error::InvalidParameter("Hamiltonian is not real".into()))?;
    let block = |k: usize| space.photon_block(k);
    let diagonal = (0..=k_max + 1)
        .map(|k| {
            let r = block(k);
            h.view((r.start, r.start), (r.len(), r.len())).into_owned()
        })
        .collect();
    let off_diagonal = (0..=k_max)
        .map(|k| {
            let (r, c) = (block(k + 1), block(k));
            h.view((r.start, c.start), (r.len(), c.len())).into_owned()
        })
        .collect();
    Ok(BlockDecomposition {
        parity,
        diagonal,
        off_diagonal,
        k_max,
    })
}

/// Blocks `D_0 ..= D_{k_max+1}`, `O_0 ..= O_{k_max}` of the `parity` sector.
pub fn extract_blocks(
    params: &RabiParams,
    parity: Parity,
    k_max: usize,
) -> Result<BlockDecomposition> {
    params.validate()?;
    let dims = ModelDims::new(params.modes(), params.qubits(), k_max + 1)?;
    let space = Arc::new(enumerate_basis(dims, Some(parity)));
    extract_blocks_in(params, &space, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: [[f64; 2]; 2], d1: f64, d2: f64, w1: f64, w2: f64) -> RabiParams {
        RabiParams::new(
            vec![w1, w2],
            vec![d1, d2],
            g.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn block_shapes_two_qubits_two_modes() {
        let p = params([[0.1, 0.2], [0.3, 0.4]], 0.6, 0.4, 1.0, 1.0);
        let b = extract_blocks(&p, Parity::Even, 1).unwrap();
        assert_eq!(b.block_sizes(), vec![2, 4, 6]);
        assert_eq!(b.off_diagonal[0].shape(), (4, 2));
        assert_eq!(b.off_diagonal[1].shape(), (6, 4));
        assert_eq!(b.coefficient_matrix(1.0).shape(), (12, 6));
    }

    #[test]
    fn coefficient_matrix_entries() {
        // Columns: |00↑↑⟩ |00↓↓⟩ |10↑↓⟩ |10↓↑⟩ |01↑↓⟩ |01↓↑⟩.
        let (g11, g12, g21, g22) = (0.11, 0.12, 0.21, 0.22);
        let (d1, d2, w1, w2, e) = (0.7, 0.2, 1.0, 1.3, 0.9);
        let p = params([[g11, g12], [g21, g22]], d1, d2, w1, w2);
        let a = extract_blocks(&p, Parity::Even, 1)
            .unwrap()
            .coefficient_matrix(e);
        let s2 = 2f64.sqrt();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(12, 6, &[
            d1 + d2 - e, 0.0, g12, g11, g22, g21,
            0.0, -d1 - d2 - e, g11, g12, g21, g22,
            g12, g11, w1 + d1 - d2 - e, 0.0, 0.0, 0.0,
            g11, g12, 0.0, w1 - d1 + d2 - e, 0.0, 0.0,
            g22, g21, 0.0, 0.0, w2 + d1 - d2 - e, 0.0,
            g21, g22, 0.0, 0.0, 0.0, w2 - d1 + d2 - e,
            0.0, 0.0, s2 * g12, s2 * g11, 0.0, 0.0,
            0.0, 0.0, s2 * g11, s2 * g12, 0.0, 0.0,
            0.0, 0.0, g22, g21, g12, g11,
            0.0, 0.0, g21, g22, g11, g12,
            0.0, 0.0, 0.0, 0.0, s2 * g22, s2 * g21,
            0.0, 0.0, 0.0, 0.0, s2 * g21, s2 * g22,
        ]);
        assert!((a - expected).abs().max() < 1e-15);
    }

    #[test]
    fn reassembly_matches_sector_hamiltonian() {
        let p = RabiParams::new(
            vec![1.0, 0.8, 1.2],
            vec![0.3, 0.45],
            vec![vec![0.2, -0.1], vec![0.05, 0.3], vec![0.4, 0.0]],
        )
        .unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let dims = ModelDims::new(3, 2, 4).unwrap();
            let space = Arc::new(enumerate_basis(dims, Some(parity)));
            let b = extract_blocks_in(&p, &space, 2).unwrap();
            let h = build_hamiltonian(&p, &space)
                .unwrap()
                .to_dense_real()
                .unwrap();
            let n = space.photon_block(3).end;
            assert_eq!(b.reassemble(), h.view((0, 0), (n, n)).into_owned());
        }
    }

    #[test]
    fn cutoff_too_small() {
        let p = params([[0.1, 0.1], [0.1, 0.1]], 0.5, 0.5, 1.0, 1.0);
        let space = Arc::new(enumerate_basis(
            ModelDims::new(2, 2, 2).unwrap(),
            Some(Parity::Odd),
        ));
        assert!(matches!(
            extract_blocks_in(&p, &space, 2),
            Err(Error::CutoffTooSmall(_))
        ));
        assert!(extract_blocks_in(&p, &space, 1).is_ok());
    }
}
