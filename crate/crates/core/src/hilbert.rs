// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock ⊗ spin basis for M bosonic modes and N spin-1/2 qubits.
//!
//! The cutoff `n_max` bounds the *total* photon number. States are ordered by
//! total photon number, then by occupation vector in descending lexicographic
//! order (`|1,0⟩` before `|0,1⟩`), then by the spin bitstring read with
//! `↑ = 0` and qubit 1 as the most significant bit. Each fixed-photon-number
//! block is therefore contiguous, which is what the block-tridiagonal
//! parity form relies on.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mode count, qubit count and total-photon cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelDims {
    pub modes: usize,
    pub qubits: usize,
    pub n_max: usize,
}

impl ModelDims {
    pub fn new(modes: usize, qubits: usize, n_max: usize) -> Result<Self> {
        let dims = Self {
            modes,
            qubits,
            n_max,
        };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::InvalidDims("mode count must be at least 1".into()));
        }
        if self.qubits == 0 {
            return Err(Error::InvalidDims("qubit count must be at least 1".into()));
        }
        if self.qubits > 24 {
            return Err(Error::InvalidDims(format!(
                "{} qubits is beyond what a dense spin register can index",
                self.qubits
            )));
        }
        Ok(())
    }

    /// Number of photon configurations with exactly `k` photons: C(M+k−1, k).
    pub fn photon_states_with(&self, k: usize) -> usize {
        binomial(self.modes + k - 1, k)
    }

    /// Number of photon configurations with at most `n_max` photons.
    pub fn photon_states(&self) -> usize {
        (0..=self.n_max).map(|k| self.photon_states_with(k)).sum()
    }

    pub fn spin_states(&self) -> usize {
        1 << self.qubits
    }

    /// Dimension of the unrestricted truncated space.
    pub fn full_dim(&self) -> usize {
        self.photon_states() * self.spin_states()
    }

    pub fn with_cutoff(&self, n_max: usize) -> Self {
        Self { n_max, ..*self }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Spin label. `Up` is the `σ_z = +1` eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Up => 'u',
            Spin::Down => 'd',
        }
    }
}

/// ℤ₂ parity sector: eigenvalue of `exp(iπ Σ a†a) Π σ_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(Error::InvalidParameter(format!(
                "parity sign must be +1 or -1, got {other}"
            ))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "+1"),
            Parity::Odd => write!(f, "-1"),
        }
    }
}

/// One labelled configuration `|n_1..n_M, s_1..s_N⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub occupations: Vec<usize>,
    pub spins: Vec<Spin>,
}

impl BasisState {
    pub fn new(occupations: Vec<usize>, spins: Vec<Spin>) -> Self {
        Self { occupations, spins }
    }

    /// Vacuum with every qubit in the given spin.
    pub fn vacuum(modes: usize, spins: Vec<Spin>) -> Self {
        Self::new(vec![0; modes], spins)
    }

    pub fn total_photons(&self) -> usize {
        self.occupations.iter().sum()
    }

    /// Spin bitstring with `↓ = 1` and qubit 1 as the most significant bit.
    pub fn spin_bits(&self) -> usize {
        self.spins.iter().fold(0usize, |acc, s| {
            (acc << 1)
                | match s {
                    Spin::Up => 0,
                    Spin::Down => 1,
                }
        })
    }

    pub fn parity(&self) -> Parity {
        parity_of(self)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.occupations.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        for s in &self.spins {
            write!(f, ",{}", s.symbol())?;
        }
        write!(f, ">")
    }
}

/// Parity sign `(−1)^{Σ n_i} · Π_j s_j`.
pub fn parity_of(state: &BasisState) -> Parity {
    let downs = state.spins.iter().filter(|s| **s == Spin::Down).count();
    if (state.total_photons() + downs).is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Enumerated, indexed truncated basis, optionally restricted to one parity sector.
///
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct HilbertSpace {
    dims: ModelDims,
    sector: Option<Parity>,
    states: Vec<BasisState>,
    lookup: HashMap<BasisState, usize>,
    /// `blocks[k]` is the index range holding the k-photon states.
    blocks: Vec<Range<usize>>,
}

impl PartialEq for HilbertSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.sector == other.sector
    }
}

impl HilbertSpace {
    pub fn dims(&self) -> ModelDims {
        self.dims
    }

    pub fn sector(&self) -> Option<Parity> {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Option<&BasisState> {
        self.states.get(index)
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    /// Index range of the states carrying exactly `k` photons.
    pub fn photon_block(&self, k: usize) -> Range<usize> {
        self.blocks
            .get(k)
            .cloned()
            .unwrap_or(self.dim()..self.dim())
    }

    pub fn contains(&self, state: &BasisState) -> bool {
        self.lookup.contains_key(state)
    }

    /// Same dims, no sector restriction.
    pub fn full(&self) -> HilbertSpace {
        enumerate_basis(self.dims, None)
    }

    pub fn describe(&self) -> String {
        let sector = match self.sector {
            Some(p) => format!(", parity {p}"),
            None => String::new(),
        };
        format!(
            "M={} N={} n_max={}{} (dim {})",
            self.dims.modes,
            self.dims.qubits,
            self.dims.n_max,
            sector,
            self.dim()
        )
    }
}

/// Occupation vectors with exactly `total` photons over `modes` modes,
/// in descending lexicographic order.
pub fn photon_configurations(modes: usize, total: usize) -> Vec<Vec<usize>> {
    fn fill(slot: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let modes = current.len();
        if slot == modes - 1 {
            current[slot] = remaining;
            out.push(current.clone());
            return;
        }
        for n in (0..=remaining).rev() {
            current[slot] = n;
            fill(slot + 1, remaining - n, current, out);
        }
    }
    let mut out = Vec::new();
    let mut current = vec![0; modes];
    fill(0, total, &mut current, &mut out);
    out
}

/// All N-qubit spin configurations in bitstring order (`↑ = 0`, qubit 1 most significant).
pub fn spin_configurations(qubits: usize) -> Vec<Vec<Spin>> {
    (0..1usize << qubits)
        .map(|bits| {
            (0..qubits)
                .map(|j| {
                    if bits >> (qubits - 1 - j) & 1 == 0 {
                        Spin::Up
                    } else {
                        Spin::Down
                    }
                })
                .collect()
        })
        .collect()
}

/// Enumerate the truncated basis in canonical order.
pub fn enumerate_basis(dims: ModelDims, sector: Option<Parity>) -> HilbertSpace {
    let spins = spin_configurations(dims.qubits);
    let mut states = Vec::new();
    let mut blocks = Vec::with_capacity(dims.n_max + 1);
    for k in 0..=dims.n_max {
        let start = states.len();
        for occupations in photon_configurations(dims.modes, k) {
            for s in &spins {
                let state = BasisState::new(occupations.clone(), s.clone());
                if sector.is_none_or(|p| parity_of(&state) == p) {
                    states.push(state);
                }
            }
        }
        blocks.push(start..states.len());
    }
    let lookup = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    HilbertSpace {
        dims,
        sector,
        states,
        lookup,
        blocks,
    }
}

/// Index of `state` in `space`, or `StateNotInSpace` naming why it is absent.
pub fn state_index(space: &HilbertSpace, state: &BasisState) -> Result<usize> {
    if let Some(i) = space.index_of(state) {
        return Ok(i);
    }
    let dims = space.dims();
    let reason = if state.occupations.len() != dims.modes || state.spins.len() != dims.qubits {
        "wrong number of modes or qubits".to_string()
    } else if state.total_photons() > dims.n_max {
        format!(
            "{} photons exceeds cutoff {}",
            state.total_photons(),
            dims.n_max
        )
    } else if let Some(p) = space.sector() {
        format!("parity {} outside sector {}", parity_of(state), p)
    } else {
        "unknown".to_string()
    };
    Err(Error::StateNotInSpace(format!("{state}: {reason}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Spin::{Down, Up};

    fn dims(m: usize, n: usize, c: usize) -> ModelDims {
        ModelDims::new(m, n, c).unwrap()
    }

    #[test]
    fn two_by_two_cutoff_one_has_twelve_states() {
        let space = enumerate_basis(dims(2, 2, 1), None);
        assert_eq!(space.dim(), 12);
        assert_eq!(space.photon_block(0), 0..4);
        assert_eq!(space.photon_block(1), 4..12);
    }

    #[test]
    fn even_sector_matches_listed_one_photon_basis() {
        let space = enumerate_basis(dims(2, 2, 1), Some(Parity::Even));
        let expected = [
            BasisState::new(vec![0, 0], vec![Up, Up]),
            BasisState::new(vec![0, 0], vec![Down, Down]),
            BasisState::new(vec![1, 0], vec![Up, Down]),
            BasisState::new(vec![1, 0], vec![Down, Up]),
            BasisState::new(vec![0, 1], vec![Up, Down]),
            BasisState::new(vec![0, 1], vec![Down, Up]),
        ];
        assert_eq!(space.states(), &expected);
    }

    #[test]
    fn stars_and_bars_count() {
        // brute force: every occupation vector in [0, n_max]^M with sum <= n_max
        let d = dims(3, 2, 2);
        let mut brute = 0;
        for a in 0..=2 {
            for b in 0..=2 {
                for c in 0..=2 {
                    if a + b + c <= 2 {
                        brute += 4;
                    }
                }
            }
        }
        assert_eq!(brute, 40);
        assert_eq!(enumerate_basis(d, None).dim(), 40);
        assert_eq!(d.full_dim(), 40);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(
            parity_of(&BasisState::new(vec![0, 0], vec![Up, Up])),
            Parity::Even
        );
        assert_eq!(
            parity_of(&BasisState::new(vec![1, 0], vec![Down, Up])),
            Parity::Even
        );
        assert_eq!(
            parity_of(&BasisState::new(vec![1, 1], vec![Up, Up])),
            Parity::Even
        );
        assert_eq!(
            parity_of(&BasisState::new(vec![1, 0], vec![Up, Up])),
            Parity::Odd
        );
    }

    #[test]
    fn index_round_trip_exhaustive() {
        let space = enumerate_basis(dims(2, 2, 2), None);
        assert_eq!(state_index(&space, &space.states()[0]).unwrap(), 0);
        for (i, s) in space.states().iter().enumerate() {
            assert_eq!(state_index(&space, s).unwrap(), i);
            assert_eq!(space.state(i).unwrap(), s);
        }
    }

    #[test]
    fn state_outside_cutoff_or_sector_is_rejected() {
        let space = enumerate_basis(dims(2, 2, 1), None);
        let err = state_index(&space, &BasisState::new(vec![2, 0], vec![Up, Up])).unwrap_err();
        assert!(matches!(err, Error::StateNotInSpace(_)));

        let even = enumerate_basis(dims(2, 2, 1), Some(Parity::Even));
        let err = state_index(&even, &BasisState::new(vec![1, 0], vec![Up, Up])).unwrap_err();
        assert!(matches!(err, Error::StateNotInSpace(ref m) if m.contains("parity")));
    }

    #[test]
    fn sector_partition() {
        for (m, n, c) in [(1, 1, 3), (2, 2, 2), (3, 2, 2), (2, 3, 3)] {
            let d = dims(m, n, c);
            let full = enumerate_basis(d, None).dim();
            let even = enumerate_basis(d, Some(Parity::Even)).dim();
            let odd = enumerate_basis(d, Some(Parity::Odd)).dim();
            assert_eq!(even + odd, full);
        }
    }

    #[test]
    fn blocks_have_half_spin_dimension_in_sectors() {
        let d = dims(3, 2, 3);
        let space = enumerate_basis(d, Some(Parity::Odd));
        for k in 0..=3 {
            assert_eq!(space.photon_block(k).len(), 2 * d.photon_states_with(k));
        }
    }

    #[test]
    fn zero_modes_rejected() {
        assert!(ModelDims::new(0, 1, 1).is_err());
        assert!(ModelDims::new(1, 0, 1).is_err());
    }
}
