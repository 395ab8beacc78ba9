// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense and Krylov Hermitian eigensolvers, null spaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::operators::{SparseOperator, C64};

/// Eigenpairs sorted by ascending eigenvalue; eigenvectors are the columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }

    fn sorted(values: Vec<f64>, vectors: DMatrix<C64>, keep: usize) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        order.truncate(keep);
        let vals = order.iter().map(|&k| values[k]).collect();
        let vecs = DMatrix::from_fn(vectors.nrows(), order.len(), |i, j| vectors[(i, order[j])]);
        Self {
            values: vals,
            vectors: vecs,
        }
    }
}

/// Full eigendecomposition of a dense Hermitian matrix.
pub fn dense_hermitian_eigen(h: &DMatrix<C64>) -> EigenPairs {
    let n = h.nrows();
    let is_real = h.iter().all(|z| z.im == 0.0);
    if is_real {
        let hr = h.map(|z| z.re);
        let eig = SymmetricEigen::new(hr);
        let vecs = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        EigenPairs::sorted(eig.eigenvalues.iter().copied().collect(), vecs, n)
    } else {
        let eig = SymmetricEigen::new(h.clone());
        EigenPairs::sorted(
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors,
            n,
        )
    }
}

/// Full eigendecomposition of a real symmetric matrix.
pub fn dense_symmetric_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(h.nrows(), h.nrows(), |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Orthonormal basis of the null space of `a`, with the singular values.
/// Singular values below `rel_tol · σ_max` count as zero.
#[derive(Debug, Clone)]
pub struct NullSpace {
    pub basis: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> NullSpace {
    let (m, n) = a.shape();
    if n == 0 {
        return NullSpace {
            basis: DMatrix::zeros(0, 0),
            singular_values: vec![],
            rank: 0,
        };
    }
    // Pad to at least square so the SVD yields a full right basis.
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = rel_tol * smax;
    let null: Vec<usize> = (0..n)
        .filter(|&k| smax == 0.0 || sigma[k] <= threshold)
        .collect();
    let basis = DMatrix::from_fn(n, null.len(), |i, j| vt[(null[j], i)]);
    let mut singular_values = sigma;
    singular_values.sort_by(|a, b| b.total_cmp(a));
    NullSpace {
        rank: n - null.len(),
        basis,
        singular_values,
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass. Columns whose
/// residual norm falls below `drop_tol` are discarded.
pub fn orthonormalize(cols: &[DVector<C64>], drop_tol: f64) -> Vec<DVector<C64>> {
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = c.clone();
        let norm0 = v.norm();
        for _ in 0..2 {
            for q in &out {
                let p = q.dotc(&v);
                v.axpy(-p, q, C64::new(1.0, 0.0));
            }
        }
        let nv = v.norm();
        if nv > drop_tol * norm0.max(1.0) {
            out.push(v / C64::new(nv, 0.0));
        }
    }
    out
}

/// Deterministic pseudo-random start block (splitmix64).
fn start_block(n: usize, b: usize) -> DMatrix<C64> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    DMatrix::from_fn(n, b, |_, _| C64::new(next(), 0.0))
}

fn apply_block(h: &SparseOperator, v: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(v.nrows(), v.ncols());
    h.mul_dense_into(v.as_slice(), out.as_mut_slice());
    out
}

/// Appends the columns of `w` to the orthonormal basis `q` after two passes
/// of block Gram–Schmidt; returns the newly added columns.
fn extend_basis(q: &mut Vec<DVector<C64>>, w: &DMatrix<C64>) -> Vec<DVector<C64>> {
    let mut added = Vec::new();
    for j in 0..w.ncols() {
        let mut v = w.column(j).into_owned();
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in q.iter().chain(added.iter()) {
                let p = b.dotc(&v);
                v.axpy(-p, b, C64::new(1.0, 0.0));
            }
        }
        let nv = v.norm();
        if nv > 1e-10 * norm0 {
            added.push(v / C64::new(nv, 0.0));
        }
    }
    q.extend(added.iter().cloned());
    added
}

/// Lowest `k` eigenpairs of a large sparse Hermitian operator by restarted
/// block Krylov iteration with Rayleigh–Ritz extraction and full
/// orthogonalization. The block carries spare vectors so that degenerate
/// clusters up to the block size are resolved.
pub fn krylov_lowest(
    h: &SparseOperator,
    k: usize,
    tol: f64,
    max_restarts: usize,
) -> Result<EigenPairs> {
    let n = h.dim();
    if k == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: DMatrix::zeros(n, 0),
        });
    }
    let block = (k + 8).max(2 * k).min(n);
    let basis_max = (6 * block).min(n);
    let scale = h.max_abs().max(f64::MIN_POSITIVE) * (h.nnz() as f64 / n as f64).max(1.0);
    let mut x = start_block(n, block);
    let mut worst = f64::INFINITY;
    for _ in 0..max_restarts {
        let mut q: Vec<DVector<C64>> = Vec::with_capacity(basis_max);
        let mut frontier = extend_basis(&mut q, &x);
        while q.len() < basis_max && !frontier.is_empty() {
            let f = DMatrix::from_columns(&frontier);
            let w = apply_block(h, &f);
            let room = basis_max - q.len();
            let w = if w.ncols() > room {
                w.columns(0, room).into_owned()
            } else {
                w
            };
            frontier = extend_basis(&mut q, &w);
        }
        let qm = DMatrix::from_columns(&q);
        let hq = apply_block(h, &qm);
        let t = qm.adjoint() * &hq;
        let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
        let ritz = dense_hermitian_eigen(&t);
        let keep = block.min(ritz.len());
        let y = ritz.vectors.columns(0, keep).into_owned();
        x = &qm * &y;
        let hx = &hq * &y;
        worst = 0.0;
        for j in 0..k.min(keep) {
            let r = hx.column(j) - x.column(j) * C64::new(ritz.values[j], 0.0);
            worst = f64::max(worst, r.norm());
        }
        if worst <= tol * scale {
            return Ok(EigenPairs::sorted(ritz.values[..keep].to_vec(), x, k));
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "block Krylov: residual {worst:.3e} after {max_restarts} restarts (target {:.3e})",
        tol * scale
    )))
}

/// Lowest `k` eigenpairs: dense below `dense_threshold`, Krylov above.
pub fn lowest_eigenpairs(
    h: &SparseOperator,
    k: usize,
    dense_threshold: usize,
) -> Result<EigenPairs> {
    let n = h.dim();
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} levels from a {n}-dimensional operator"
        )));
    }
    if n <= dense_threshold {
        let all = dense_hermitian_eigen(&h.to_dense());
        let vecs = all.vectors.columns(0, k).into_owned();
        return Ok(EigenPairs {
            values: all.values[..k].to_vec(),
            vectors: vecs,
        });
    }
    krylov_lowest(h, k, 1e-11, 200)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::hilbert::{enumerate_basis, ModelDims, Parity};
    use crate::operators::{build_hamiltonian, RabiParams};

    #[test]
    fn null_space_of_wide_and_tall_matrices() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let ns = null_space(&a, 1e-10);
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.basis.ncols(), 2);
        assert!((&a * &ns.basis).abs().max() < 1e-14);
        let tall = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let ns = null_space(&tall, 1e-10);
        assert_eq!(ns.basis.ncols(), 1);
        assert!((&tall * &ns.basis).abs().max() < 1e-14);
    }

    #[test]
    fn krylov_matches_dense_on_a_random_instance() {
        let dims = ModelDims::new(2, 2, 6).unwrap();
        let space = Arc::new(enumerate_basis(dims, Some(Parity::Even)));
        let p = RabiParams::new(
            vec![1.0, 0.93],
            vec![0.41, 0.27],
            vec![vec![0.31, 0.12], vec![0.07, 0.22]],
        )
        .unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let dense = lowest_eigenpairs(&h, 6, usize::MAX).unwrap();
        let iter = krylov_lowest(&h, 6, 1e-11, 200).unwrap();
        for (a, b) in dense.values.iter().zip(&iter.values) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn krylov_resolves_degenerate_levels() {
        // Two decoupled copies of a spectrum give exact double degeneracy.
        let dims = ModelDims::new(1, 2, 5).unwrap();
        let space = Arc::new(enumerate_basis(dims, None));
        let p = RabiParams::new(vec![1.0], vec![0.3, 0.3], vec![vec![0.0, 0.0]]).unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let ev = krylov_lowest(&h, 4, 1e-11, 200).unwrap();
        let expected = [-0.6, 0.0, 0.0, 0.4];
        for (a, b) in ev.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{:?}", ev.values);
        }
    }
}
