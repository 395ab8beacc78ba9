// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Hamiltonians and auxiliary operators of the multiqubit multimode Rabi model
//!
//! ```text
//! H = Σ_i ω_i a_i†a_i + Σ_ij g_ij σ_jx (a_i + a_i†) + Σ_j Δ_j σ_jz
//! ```
//!
//! Couplings use the `σ_x` form. A circuit that produces `σ_y (a − a†)`
//! couplings maps onto this one by a fixed single-qubit rotation about `z`,
//! so [`crate::circuitmap`] only emits coupling strengths.
//!
//! Hard truncation: any matrix element that would take the total photon
//! number above `n_max` is dropped.

mod blocks;
mod sparse;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use blocks::{extract_blocks, extract_blocks_in, BlockDecomposition};
pub use sparse::{SparseOperator, C64, DENSE_THRESHOLD};

use crate::error::{Error, Result};
use crate::hilbert::{parity_of, BasisState, HilbertSpace, ModelDims, Spin};

/// Mode frequencies `ω_i`, half-splittings `Δ_j` and couplings `g_ij`
/// (row `i` = mode, column `j` = qubit), all in units of a reference frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    pub omega: Vec<f64>,
    pub delta: Vec<f64>,
    pub g: Vec<Vec<f64>>,
}

impl RabiParams {
    pub fn new(omega: Vec<f64>, delta: Vec<f64>, g: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self { omega, delta, g };
        p.validate()?;
        Ok(p)
    }

    /// Equal mode frequencies and a coupling matrix `g · pattern`.
    pub fn with_pattern(omega: f64, delta: Vec<f64>, pattern: &[Vec<f64>], g: f64) -> Result<Self> {
        let modes = pattern.len();
        let g = pattern
            .iter()
            .map(|row| row.iter().map(|p| p * g).collect())
            .collect();
        Self::new(vec![omega; modes], delta, g)
    }

    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    pub fn qubits(&self) -> usize {
        self.delta.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.is_empty() || self.delta.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one mode and one qubit".into(),
            ));
        }
        if let Some(w) = self.omega.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mode frequencies must be positive and finite, got {w}"
            )));
        }
        if self.delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidParameter(
                "qubit splittings must be finite".into(),
            ));
        }
        if self.g.len() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "coupling matrix has {} rows for {} modes",
                self.g.len(),
                self.modes()
            )));
        }
        for (i, row) in self.g.iter().enumerate() {
            if row.len() != self.qubits() {
                return Err(Error::DimensionMismatch(format!(
                    "coupling row {i} has {} entries for {} qubits",
                    row.len(),
                    self.qubits()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "coupling row {i} is not finite"
                )));
            }
        }
        Ok(())
    }

    pub fn check_dims(&self, dims: &ModelDims) -> Result<()> {
        self.validate()?;
        if self.modes() != dims.modes || self.qubits() != dims.qubits {
            return Err(Error::DimensionMismatch(format!(
                "params describe {} modes × {} qubits, space has {} × {}",
                self.modes(),
                self.qubits(),
                dims.modes,
                dims.qubits
            )));
        }
        Ok(())
    }

    /// Parameters restricted to a subset of qubits (keeps all modes).
    pub fn select_qubits(&self, qubits: &[usize]) -> Self {
        Self {
            omega: self.omega.clone(),
            delta: qubits.iter().map(|&j| self.delta[j]).collect(),
            g: self
                .g
                .iter()
                .map(|row| qubits.iter().map(|&j| row[j]).collect())
                .collect(),
        }
    }
}

/// Which interaction terms a Hamiltonian keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingKind {
    /// Full `σ_x (a + a†)` coupling.
    Rabi,
    /// Rotating-wave terms `a σ⁺ + a† σ⁻` only.
    JaynesCummings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitAxis {
    X,
    Y,
    Z,
    /// `σ⁻ = |↓⟩⟨↑|`
    Lower,
    /// `σ⁺ = |↑⟩⟨↓|`
    Raise,
}

/// Build an operator from its action on basis states. Images above the cutoff
/// are dropped; images outside a parity sector are an error.
fn build_from_action<F>(space: &Arc<HilbertSpace>, what: &str, action: F) -> Result<SparseOperator>
where
    F: Fn(&BasisState) -> Vec<(BasisState, C64)>,
{
    let n_max = space.dims().n_max;
    let mut triplets = Vec::new();
    for (col, state) in space.states().iter().enumerate() {
        for (image, amp) in action(state) {
            if image.total_photons() > n_max {
                continue;
            }
            match space.index_of(&image) {
                Some(row) => triplets.push((row, col, amp)),
                None => {
                    return Err(Error::ParityBreaking(format!(
                        "{what} maps {state} to {image} (parity {}) outside {}",
                        parity_of(&image),
                        space.describe()
                    )))
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(space.clone(), triplets))
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn lowered(state: &BasisState, mode: usize) -> Option<(BasisState, f64)> {
    let n = state.occupations[mode];
    if n == 0 {
        return None;
    }
    let mut s = state.clone();
    s.occupations[mode] -= 1;
    Some((s, (n as f64).sqrt()))
}

fn raised(state: &BasisState, mode: usize) -> (BasisState, f64) {
    let n = state.occupations[mode];
    let mut s = state.clone();
    s.occupations[mode] += 1;
    (s, ((n + 1) as f64).sqrt())
}

fn flipped(state: &BasisState, qubit: usize) -> BasisState {
    let mut s = state.clone();
    s.spins[qubit] = s.spins[qubit].flipped();
    s
}

fn check_mode(space: &HilbertSpace, mode: usize) -> Result<()> {
    let count = space.dims().modes;
    if mode >= count {
        return Err(Error::IndexOutOfRange {
            what: "mode",
            index: mode,
            count,
        });
    }
    Ok(())
}

fn check_qubit(space: &HilbertSpace, qubit: usize) -> Result<()> {
    let count = space.dims().qubits;
    if qubit >= count {
        return Err(Error::IndexOutOfRange {
            what: "qubit",
            index: qubit,
            count,
        });
    }
    Ok(())
}

/// `Σ_i ω_i n_i` (diagonal).
pub fn build_free_field(omega: &[f64], space: &Arc<HilbertSpace>) -> SparseOperator {
    let diag: Vec<f64> = space
        .states()
        .iter()
        .map(|s| {
            s.occupations
                .iter()
                .zip(omega)
                .map(|(&n, w)| n as f64 * w)
                .sum()
        })
        .collect();
    SparseOperator::from_diagonal(space.clone(), &diag)
}

/// `σ_jx (a_i + a_i†)`.
pub fn build_coupling_term(
    space: &Arc<HilbertSpace>,
    mode: usize,
    qubit: usize,
) -> Result<SparseOperator> {
    check_mode(space, mode)?;
    check_qubit(space, qubit)?;
    build_from_action(space, "coupling", |s| {
        let f = flipped(s, qubit);
        let mut out = Vec::with_capacity(2);
        if let Some((t, amp)) = lowered(&f, mode) {
            out.push((t, real(amp)));
        }
        let (t, amp) = raised(&f, mode);
        out.push((t, real(amp)));
        out
    })
}

/// `a_i σ_j⁺ + a_i† σ_j⁻`.
pub fn build_jc_coupling_term(
    space: &Arc<HilbertSpace>,
    mode: usize,
    qubit: usize,
) -> Result<SparseOperator> {
    check_mode(space, mode)?;
    check_qubit(space, qubit)?;
    build_from_action(space, "JC coupling", |s| {
        let f = flipped(s, qubit);
        match s.spins[qubit] {
            // σ⁺ raises ↓ → ↑, paired with photon absorption
            Spin::Down => lowered(&f, mode)
                .map(|(t, a)| vec![(t, real(a))])
                .unwrap_or_default(),
            Spin::Up => {
                let (t, a) = raised(&f, mode);
                vec![(t, real(a))]
            }
        }
    })
}

/// `σ_jx (a_i − a_i†)`; with `[H, Σ n] = Σ g_ij σ_jx (a_i − a_i†)` it gives the
/// photon exchange rate between qubits and modes.
pub fn build_exchange_term(
    space: &Arc<HilbertSpace>,
    mode: usize,
    qubit: usize,
) -> Result<SparseOperator> {
    check_mode(space, mode)?;
    check_qubit(space, qubit)?;
    build_from_action(space, "exchange", |s| {
        let f = flipped(s, qubit);
        let mut out = Vec::with_capacity(2);
        if let Some((t, amp)) = lowered(&f, mode) {
            out.push((t, real(amp)));
        }
        let (t, amp) = raised(&f, mode);
        out.push((t, real(-amp)));
        out
    })
}

fn check_params(params: &RabiParams, space: &HilbertSpace) -> Result<()> {
    params.check_dims(&space.dims())
}

/// Full Rabi Hamiltonian on `space`.
pub fn build_hamiltonian(params: &RabiParams, space: &Arc<HilbertSpace>) -> Result<SparseOperator> {
    build_hamiltonian_of(CouplingKind::Rabi, params, space)
}

/// Rotating-wave (Jaynes–Cummings) Hamiltonian on `space`.
pub fn build_jc_hamiltonian(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
) -> Result<SparseOperator> {
    build_hamiltonian_of(CouplingKind::JaynesCummings, params, space)
}

pub fn build_hamiltonian_of(
    kind: CouplingKind,
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
) -> Result<SparseOperator> {
    check_params(params, space)?;
    let (m, n) = (params.modes(), params.qubits());
    build_from_action(space, "Hamiltonian", |s| {
        let mut out = Vec::with_capacity(1 + 2 * m * n);
        let diag: f64 = s
            .occupations
            .iter()
            .zip(&params.omega)
            .map(|(&k, w)| k as f64 * w)
            .sum::<f64>()
            + s.spins
                .iter()
                .zip(&params.delta)
                .map(|(sp, d)| sp.sign() * d)
                .sum::<f64>();
        out.push((s.clone(), real(diag)));
        for i in 0..m {
            for j in 0..n {
                let g = params.g[i][j];
                if g == 0.0 {
                    continue;
                }
                let f = flipped(s, j);
                let absorb = lowered(&f, i);
                let emit = raised(&f, i);
                match kind {
                    CouplingKind::Rabi => {
                        if let Some((t, a)) = absorb {
                            out.push((t, real(g * a)));
                        }
                        out.push((emit.0, real(g * emit.1)));
                    }
                    CouplingKind::JaynesCummings => match s.spins[j] {
                        Spin::Down => {
                            if let Some((t, a)) = absorb {
                                out.push((t, real(g * a)));
                            }
                        }
                        Spin::Up => out.push((emit.0, real(g * emit.1))),
                    },
                }
            }
        }
        out
    })
}

/// `R = exp(iπ Σ a†a) Π σ_z` (diagonal ±1).
pub fn build_parity_operator(space: &Arc<HilbertSpace>) -> SparseOperator {
    let diag: Vec<f64> = space
        .states()
        .iter()
        .map(|s| parity_of(s).sign() as f64)
        .collect();
    SparseOperator::from_diagonal(space.clone(), &diag)
}

/// Excitation number `C = Σ a†a + Σ (σ_z + 1)/2`, conserved by the JC model.
pub fn build_excitation_operator(space: &Arc<HilbertSpace>) -> SparseOperator {
    let diag: Vec<f64> = space
        .states()
        .iter()
        .map(|s| (s.total_photons() + s.spins.iter().filter(|x| **x == Spin::Up).count()) as f64)
        .collect();
    SparseOperator::from_diagonal(space.clone(), &diag)
}

/// Photon number `a_i†a_i`.
pub fn build_mode_number(space: &Arc<HilbertSpace>, mode: usize) -> Result<SparseOperator> {
    check_mode(space, mode)?;
    let diag: Vec<f64> = space
        .states()
        .iter()
        .map(|s| s.occupations[mode] as f64)
        .collect();
    Ok(SparseOperator::from_diagonal(space.clone(), &diag))
}

/// Total photon number `Σ a_i†a_i`.
pub fn build_total_photon_number(space: &Arc<HilbertSpace>) -> SparseOperator {
    let diag: Vec<f64> = space
        .states()
        .iter()
        .map(|s| s.total_photons() as f64)
        .collect();
    SparseOperator::from_diagonal(space.clone(), &diag)
}

/// Lowering operator `a_i`. Changes parity, so only valid on an unrestricted space.
pub fn build_mode_lowering(space: &Arc<HilbertSpace>, mode: usize) -> Result<SparseOperator> {
    check_mode(space, mode)?;
    build_from_action(space, "a", |s| {
        lowered(s, mode)
            .map(|(t, a)| vec![(t, real(a))])
            .unwrap_or_default()
    })
}

/// Raising operator `a_i†` (truncated at the cutoff).
pub fn build_mode_raising(space: &Arc<HilbertSpace>, mode: usize) -> Result<SparseOperator> {
    check_mode(space, mode)?;
    build_from_action(space, "a†", |s| {
        let (t, a) = raised(s, mode);
        vec![(t, real(a))]
    })
}

/// Single-qubit Pauli or ladder operator on qubit `qubit`.
pub fn build_qubit_op(
    space: &Arc<HilbertSpace>,
    qubit: usize,
    axis: QubitAxis,
) -> Result<SparseOperator> {
    check_qubit(space, qubit)?;
    build_from_action(space, "qubit operator", |s| {
        let sp = s.spins[qubit];
        match axis {
            QubitAxis::Z => vec![(s.clone(), real(sp.sign()))],
            QubitAxis::X => vec![(flipped(s, qubit), real(1.0))],
            // σ_y|↑⟩ = i|↓⟩, σ_y|↓⟩ = −i|↑⟩
            QubitAxis::Y => vec![(flipped(s, qubit), C64::new(0.0, sp.sign()))],
            QubitAxis::Lower => match sp {
                Spin::Up => vec![(flipped(s, qubit), real(1.0))],
                Spin::Down => vec![],
            },
            QubitAxis::Raise => match sp {
                Spin::Down => vec![(flipped(s, qubit), real(1.0))],
                Spin::Up => vec![],
            },
        }
    })
}

/// Projector onto states with at least `k` photons (diagonal).
pub fn build_photon_threshold_projector(space: &Arc<HilbertSpace>, k: usize) -> SparseOperator {
    let diag: Vec<f64> = space
        .states()
        .iter()
        .map(|s| if s.total_photons() >= k { 1.0 } else { 0.0 })
        .collect();
    SparseOperator::from_diagonal(space.clone(), &diag)
}

/// The parameter-independent pieces of `H`, so that `H(t)` and `Ḣ(t)` can be
/// applied as `Σ c_k(t) A_k` without rebuilding the matrix.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub kind: CouplingKind,
    pub space: Arc<HilbertSpace>,
    /// `n_i` per mode.
    pub number: Vec<SparseOperator>,
    /// `σ_jz` per qubit.
    pub sigma_z: Vec<SparseOperator>,
    /// Interaction `[mode][qubit]`.
    pub coupling: Vec<Vec<SparseOperator>>,
}

impl HamiltonianTerms {
    pub fn new(kind: CouplingKind, space: &Arc<HilbertSpace>) -> Result<Self> {
        let dims = space.dims();
        let number = (0..dims.modes)
            .map(|i| build_mode_number(space, i))
            .collect::<Result<Vec<_>>>()?;
        let sigma_z = (0..dims.qubits)
            .map(|j| build_qubit_op(space, j, QubitAxis::Z))
            .collect::<Result<Vec<_>>>()?;
        let coupling = (0..dims.modes)
            .map(|i| {
                (0..dims.qubits)
                    .map(|j| match kind {
                        CouplingKind::Rabi => build_coupling_term(space, i, j),
                        CouplingKind::JaynesCummings => build_jc_coupling_term(space, i, j),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            space: space.clone(),
            number,
            sigma_z,
            coupling,
        })
    }

    fn weighted<'a>(&'a self, params: &RabiParams) -> Vec<(C64, &'a SparseOperator)> {
        let mut terms = Vec::new();
        for (w, op) in params.omega.iter().zip(&self.number) {
            terms.push((real(*w), op));
        }
        for (d, op) in params.delta.iter().zip(&self.sigma_z) {
            terms.push((real(*d), op));
        }
        for (row, ops) in params.g.iter().zip(&self.coupling) {
            for (g, op) in row.iter().zip(ops) {
                if *g != 0.0 {
                    terms.push((real(*g), op));
                }
            }
        }
        terms
    }

    /// Materialize `H(params)`.
    pub fn assemble(&self, params: &RabiParams) -> Result<SparseOperator> {
        check_params(params, &self.space)?;
        let terms = self.weighted(params);
        if terms.is_empty() {
            return Ok(SparseOperator::zeros(self.space.clone()));
        }
        SparseOperator::linear_combination(&terms)
    }

    /// `y ← y + alpha · H(params) x`; `params` may hold time derivatives
    /// (mode frequencies of zero are allowed there).
    pub fn apply_add(&self, params: &RabiParams, alpha: C64, x: &[C64], y: &mut [C64]) {
        for (c, op) in self.weighted(params) {
            op.apply_add(alpha * c, x, y);
        }
    }

    /// `Out ← Out + alpha · H(params) · M` for column-major dense `M`.
    pub fn mul_dense_add(&self, params: &RabiParams, alpha: C64, m: &[C64], out: &mut [C64]) {
        let n = self.space.dim();
        let terms = self.weighted(params);
        for (col_in, col_out) in m.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            for (c, op) in &terms {
                op.apply_add(alpha * c, col_in, col_out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{enumerate_basis, ModelDims, Parity};

    fn space(m: usize, n: usize, c: usize, sector: Option<Parity>) -> Arc<HilbertSpace> {
        Arc::new(enumerate_basis(ModelDims::new(m, n, c).unwrap(), sector))
    }

    #[test]
    fn decoupled_single_mode_single_qubit() {
        let s = space(1, 1, 1, None);
        let p = RabiParams::new(vec![1.0], vec![0.4], vec![vec![0.0]]).unwrap();
        let h = build_hamiltonian(&p, &s).unwrap();
        let mut diag: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        diag.sort_by(f64::total_cmp);
        assert_eq!(diag, vec![-0.4, 0.4, 0.6, 1.4]);
        assert!(h.is_diagonal());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = space(2, 2, 1, None);
        let p = RabiParams::new(vec![1.0], vec![0.4], vec![vec![0.1]]).unwrap();
        assert!(matches!(
            build_hamiltonian(&p, &s),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn parity_squares_to_identity() {
        let s = space(2, 2, 3, None);
        let r = build_parity_operator(&s);
        let rr = r.matmul(&r).unwrap();
        assert_eq!(rr.max_abs_diff(&SparseOperator::identity(s)).unwrap(), 0.0);
    }

    #[test]
    fn ladder_commutator_below_cutoff() {
        let s = space(2, 1, 3, None);
        for mode in 0..2 {
            let a = build_mode_lowering(&s, mode).unwrap();
            let ad = build_mode_raising(&s, mode).unwrap();
            assert!(a.adjoint().max_abs_diff(&ad).unwrap() < 1e-15);
            let comm = SparseOperator::linear_combination(&[
                (real(1.0), &a.matmul(&ad).unwrap()),
                (real(-1.0), &ad.matmul(&a).unwrap()),
            ])
            .unwrap();
            for (i, st) in s.states().iter().enumerate() {
                if st.total_photons() < 3 {
                    for j in 0..s.dim() {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!((comm.get(i, j).re - expected).abs() < 1e-12);
                        assert!((comm.get(j, i).re - expected).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn lowering_on_sector_space_is_parity_breaking() {
        let s = space(1, 1, 2, Some(Parity::Even));
        assert!(matches!(
            build_mode_lowering(&s, 0),
            Err(Error::ParityBreaking(_))
        ));
        assert!(matches!(
            build_qubit_op(&s, 3, QubitAxis::Z),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn pauli_algebra() {
        let s = space(1, 2, 1, None);
        let x = build_qubit_op(&s, 1, QubitAxis::X).unwrap();
        let y = build_qubit_op(&s, 1, QubitAxis::Y).unwrap();
        let z = build_qubit_op(&s, 1, QubitAxis::Z).unwrap();
        // σ_x σ_y = i σ_z
        let xy = x.matmul(&y).unwrap();
        assert!(xy.max_abs_diff(&z.scaled(C64::new(0.0, 1.0))).unwrap() < 1e-15);
        let lo = build_qubit_op(&s, 1, QubitAxis::Lower).unwrap();
        let hi = build_qubit_op(&s, 1, QubitAxis::Raise).unwrap();
        // σ⁺σ⁻ = (1 + σ_z)/2
        let pp = hi.matmul(&lo).unwrap();
        let expected = SparseOperator::linear_combination(&[
            (real(0.5), &SparseOperator::identity(s.clone())),
            (real(0.5), &z),
        ])
        .unwrap();
        assert!(pp.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn jc_with_zero_coupling_matches_rabi() {
        let s = space(2, 2, 2, None);
        let p = RabiParams::new(vec![1.0, 1.1], vec![0.3, 0.6], vec![vec![0.0; 2]; 2]).unwrap();
        let a = build_hamiltonian(&p, &s).unwrap();
        let b = build_jc_hamiltonian(&p, &s).unwrap();
        assert_eq!(a.max_abs_diff(&b).unwrap(), 0.0);
    }

    #[test]
    fn terms_reassemble_the_hamiltonian() {
        let s = space(2, 2, 3, Some(Parity::Odd));
        let p = RabiParams::new(
            vec![1.0, 0.9],
            vec![0.3, -0.2],
            vec![vec![0.1, 0.25], vec![-0.4, 0.05]],
        )
        .unwrap();
        for kind in [CouplingKind::Rabi, CouplingKind::JaynesCummings] {
            let terms = HamiltonianTerms::new(kind, &s).unwrap();
            let direct = build_hamiltonian_of(kind, &p, &s).unwrap();
            assert!(terms.assemble(&p).unwrap().max_abs_diff(&direct).unwrap() < 1e-15);
            let x: Vec<C64> = (0..s.dim()).map(|k| C64::new(k as f64, 1.0)).collect();
            let mut y = vec![C64::new(0.0, 0.0); s.dim()];
            terms.apply_add(&p, real(1.0), &x, &mut y);
            let mut z = vec![C64::new(0.0, 0.0); s.dim()];
            direct.apply_into(&x, &mut z);
            for (a, b) in y.iter().zip(&z) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
