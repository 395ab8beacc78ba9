// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Compressed-row complex operators tied to a [`HilbertSpace`].

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;

pub type C64 = Complex64;

/// Largest dimension for which `to_dense` is considered routine.
pub const DENSE_THRESHOLD: usize = 4096;

/// Sparse complex matrix in the canonical ordering of its space.
///
/// Entries are stored row by row with strictly increasing column indices,
/// so iteration order (and anything serialized from it) is deterministic.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    space: Arc<HilbertSpace>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    /// Build from `(row, col, value)` triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(space: Arc<HilbertSpace>, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        let dim = space.dim();
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            values.push(v);
        }
        let keep: Vec<bool> = values.iter().map(|v| *v != C64::new(0.0, 0.0)).collect();
        let mut k_rows = Vec::new();
        let mut k_cols = Vec::new();
        let mut k_vals = Vec::new();
        for i in 0..values.len() {
            if keep[i] {
                k_rows.push(rows[i]);
                k_cols.push(cols[i]);
                k_vals.push(values[i]);
            }
        }
        for &r in &k_rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            space,
            row_ptr,
            cols: k_cols,
            values: k_vals,
        }
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        Self::from_triplets(space, Vec::new())
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let dim = space.dim();
        Self::from_diagonal(space, &vec![1.0; dim])
    }

    pub fn from_diagonal(space: Arc<HilbertSpace>, diag: &[f64]) -> Self {
        let triplets = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, C64::new(d, 0.0)))
            .collect();
        Self::from_triplets(space, triplets)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, col, value)` in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    /// `y ← A x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// `y ← y + alpha · A x`.
    pub fn apply_add(&self, alpha: C64, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *out += alpha * acc;
        }
    }

    pub fn apply(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::zeros(self.dim());
        self.apply_into(x.as_slice(), y.as_mut_slice());
        y
    }

    /// `⟨x|A|x⟩`.
    pub fn expectation(&self, x: &DVector<C64>) -> C64 {
        x.dotc(&self.apply(x))
    }

    /// `⟨x|A|y⟩`.
    pub fn matrix_element(&self, x: &DVector<C64>, y: &DVector<C64>) -> C64 {
        x.dotc(&self.apply(y))
    }

    /// `Out ← A · M` for a column-major dense `M` (dim × dim), column by column.
    pub fn mul_dense_into(&self, m: &[C64], out: &mut [C64]) {
        let n = self.dim();
        for (col_in, col_out) in m.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            self.apply_into(col_in, col_out);
        }
    }

    /// `Tr(A · M)` for column-major dense `M`.
    pub fn trace_product(&self, m: &[C64]) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for (r, c, v) in self.entries() {
            // (A M)_{rr} = Σ_c A_{rc} M_{cr}
            acc += v * m[r * n + c];
        }
        acc
    }

    pub fn adjoint(&self) -> SparseOperator {
        let triplets = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.space.clone(), triplets)
    }

    pub fn scaled(&self, alpha: C64) -> SparseOperator {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `Σ_k c_k A_k` over operators on the same space.
    pub fn linear_combination(terms: &[(C64, &SparseOperator)]) -> Result<SparseOperator> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let space = first.1.space.clone();
        let mut triplets = Vec::new();
        for (c, op) in terms {
            check_same_space(&space, &op.space)?;
            triplets.extend(op.entries().map(|(r, col, v)| (r, col, *c * v)));
        }
        Ok(Self::from_triplets(space, triplets))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        let one = C64::new(1.0, 0.0);
        Self::linear_combination(&[(one, self), (one, other)])
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        check_same_space(&self.space, &other.space)?;
        let mut triplets = Vec::new();
        for r in 0..self.dim() {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Ok(Self::from_triplets(self.space.clone(), triplets))
    }

    /// `max |A − B|` entrywise.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        let diff =
            Self::linear_combination(&[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)])?;
        Ok(diff.max_abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A − A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }

    /// `max |[A, B]|` entrywise.
    pub fn commutator_max_norm(&self, other: &SparseOperator) -> Result<f64> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.max_abs_diff(&ba)
    }

    /// Frobenius norm, used as a cheap scale for relative tolerances.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Real part as a dense matrix; `None` if any entry has a nonzero imaginary part.
    pub fn to_dense_real(&self) -> Option<DMatrix<f64>> {
        if !self.is_real() {
            return None;
        }
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.re;
        }
        Some(m)
    }

    /// Coordinate-format dump: one `row col re im` line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        for (r, c, v) in self.entries() {
            let _ = writeln!(s, "{r} {c} {:.16e} {:.16e}", v.re, v.im);
        }
        s
    }
}

pub(crate) fn check_same_space(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!(
            "{} vs {}",
            a.describe(),
            b.describe()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{enumerate_basis, ModelDims};

    fn space() -> Arc<HilbertSpace> {
        Arc::new(enumerate_basis(ModelDims::new(1, 1, 1).unwrap(), None))
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let s = space();
        let one = C64::new(1.0, 0.0);
        let op = SparseOperator::from_triplets(
            s,
            vec![
                (1, 0, one),
                (0, 1, one),
                (1, 0, one),
                (2, 2, one),
                (2, 2, -one),
            ],
        );
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(1, 0), C64::new(2.0, 0.0));
        assert_eq!(op.get(2, 2), C64::new(0.0, 0.0));
    }

    #[test]
    fn dense_product_matches_sparse_apply() {
        let s = space();
        let op = SparseOperator::from_triplets(
            s,
            vec![
                (0, 1, C64::new(0.5, 1.0)),
                (3, 2, C64::new(-2.0, 0.0)),
                (1, 1, C64::new(1.0, 0.0)),
            ],
        );
        let m = DMatrix::from_fn(4, 4, |r, c| C64::new(r as f64 + 1.0, c as f64 - 0.5));
        let mut out = vec![C64::new(0.0, 0.0); 16];
        op.mul_dense_into(m.as_slice(), &mut out);
        let expected = op.to_dense() * &m;
        for (a, b) in out.iter().zip(expected.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
        let tr = op.trace_product(m.as_slice());
        assert!((tr - expected.trace()).norm() < 1e-12);
    }

    #[test]
    fn coordinate_dump_lists_entries() {
        let s = space();
        let op = SparseOperator::from_diagonal(s, &[1.0, 0.0, 2.0, 0.0]);
        let text = op.to_coordinate_text();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("0 0 1.0000000000000000e0 0.0000000000000000e0"));
    }
}
