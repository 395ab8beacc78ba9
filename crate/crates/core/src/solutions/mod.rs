// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Coupling-independent one-photon dark states.
//!
//! Closed-form constructors return unit vectors together with the parameter
//! constraints under which they are exact eigenstates at `E = ω`. The
//! `*_unchecked` variants build the same vector without enforcing the
//! constraints, for sensitivity studies.

mod finder;

use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

pub use finder::{
    find_one_photon_solutions, find_one_photon_solutions_in, RankDiagnostics, SolutionReport,
};

use crate::error::{Error, Result};
use crate::hilbert::{parity_of, state_index, BasisState, HilbertSpace, Parity, Spin};
use crate::operators::{RabiParams, SparseOperator, C64};

/// Relative tolerance for parameter constraints.
pub const CONDITION_RTOL: f64 = 1e-9;

/// One parameter constraint and how far the parameters are from meeting it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub deviation: f64,
    pub satisfied: bool,
}

impl ConditionCheck {
    fn equal(name: impl Into<String>, lhs: f64, rhs: f64, scale: f64) -> Self {
        let deviation = (lhs - rhs).abs();
        Self {
            name: name.into(),
            deviation,
            satisfied: deviation <= CONDITION_RTOL * scale.max(1.0),
        }
    }

    fn nonzero(name: impl Into<String>, value: f64, scale: f64) -> Self {
        Self {
            name: name.into(),
            deviation: if value.abs() > CONDITION_RTOL * scale.max(1.0) {
                0.0
            } else {
                1.0
            },
            satisfied: value.abs() > CONDITION_RTOL * scale.max(1.0),
        }
    }
}

fn all_satisfied(checks: &[ConditionCheck]) -> bool {
    checks.iter().all(|c| c.satisfied)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OddVariant {
    /// `Δ₁ − Δ₂ = ω`
    A,
    /// `Δ₂ − Δ₁ = ω`
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DarkStateKind {
    TwoQubitEven,
    TwoQubitOdd(OddVariant),
    ThreeQubitOdd,
    Product {
        base: Box<DarkStateKind>,
        extra_pairs: usize,
    },
}

#[derive(Debug, Clone)]
pub struct DarkState {
    pub kind: DarkStateKind,
    pub space: Arc<HilbertSpace>,
    /// Unit vector in `space`.
    pub vector: DVector<C64>,
    pub energy: f64,
    pub parity: Parity,
    pub conditions: Vec<ConditionCheck>,
    /// Unnormalized coefficient pattern, as written in closed form.
    pub raw: Vec<(BasisState, f64)>,
}

impl DarkState {
    pub fn conditions_hold(&self) -> bool {
        all_satisfied(&self.conditions)
    }

    /// Normalized amplitude of a basis state (zero when absent).
    pub fn amplitude(&self, state: &BasisState) -> C64 {
        self.space
            .index_of(state)
            .map(|k| self.vector[k])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Total weight on states with at least `k` photons.
    pub fn weight_above(&self, k: usize) -> f64 {
        self.space
            .states()
            .iter()
            .zip(self.vector.iter())
            .filter(|(s, _)| s.total_photons() >= k)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Same state in another space (e.g. a larger cutoff).
    pub fn embed(&self, space: &Arc<HilbertSpace>) -> Result<DarkState> {
        let vector = assemble(space, &self.raw)?;
        Ok(DarkState {
            space: space.clone(),
            vector,
            raw: self.raw.clone(),
            conditions: self.conditions.clone(),
            kind: self.kind.clone(),
            energy: self.energy,
            parity: self.parity,
        })
    }
}

fn scale_of(params: &RabiParams) -> f64 {
    params
        .omega
        .iter()
        .chain(&params.delta)
        .chain(params.g.iter().flatten())
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

fn require_qubits(params: &RabiParams, n: usize, what: &str) -> Result<()> {
    if params.qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} needs {n} qubits, params have {}",
            params.qubits()
        )));
    }
    Ok(())
}

fn check_space(params: &RabiParams, space: &HilbertSpace) -> Result<()> {
    params.check_dims(&space.dims())?;
    if space.dims().n_max < 1 {
        return Err(Error::CutoffTooSmall(
            "one-photon states need a cutoff of at least 1".into(),
        ));
    }
    Ok(())
}

fn assemble(space: &HilbertSpace, raw: &[(BasisState, f64)]) -> Result<DVector<C64>> {
    let mut v = DVector::zeros(space.dim());
    for (state, amp) in raw {
        if *amp == 0.0 {
            continue;
        }
        let k = state_index(space, state)?;
        v[k] += C64::new(*amp, 0.0);
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter(
            "dark-state coefficients vanish".into(),
        ));
    }
    Ok(v / C64::new(norm, 0.0))
}

fn one_photon(modes: usize, mode: usize) -> Vec<usize> {
    let mut occ = vec![0; modes];
    occ[mode] = 1;
    occ
}

fn spins(pattern: &str) -> Vec<Spin> {
    pattern
        .chars()
        .map(|c| if c == 'u' { Spin::Up } else { Spin::Down })
        .collect()
}

/// `Σ_i w_i |1_i⟩ ⊗ Σ_s c_s |s⟩` plus vacuum terms.
fn pattern(
    modes: usize,
    w: &[f64],
    photon_spins: &[(&str, f64)],
    vacuum: &[(&str, f64)],
) -> Vec<(BasisState, f64)> {
    let mut raw: Vec<(BasisState, f64)> = vacuum
        .iter()
        .map(|(s, c)| (BasisState::vacuum(modes, spins(s)), *c))
        .collect();
    for (i, wi) in w.iter().enumerate() {
        for (s, c) in photon_spins {
            raw.push((BasisState::new(one_photon(modes, i), spins(s)), wi * c));
        }
    }
    raw
}

fn common_frequency_checks(params: &RabiParams, scale: f64) -> Vec<ConditionCheck> {
    let w = params.omega[0];
    (1..params.modes())
        .map(|i| ConditionCheck::equal(format!("omega[{i}] = omega[0]"), params.omega[i], w, scale))
        .collect()
}

fn equal_pair_coupling_checks(
    params: &RabiParams,
    a: usize,
    b: usize,
    scale: f64,
) -> Vec<ConditionCheck> {
    (0..params.modes())
        .map(|i| {
            ConditionCheck::equal(
                format!("g[{i}][{a}] = g[{i}][{b}]"),
                params.g[i][a],
                params.g[i][b],
                scale,
            )
        })
        .collect()
}

fn two_qubit_conditions(params: &RabiParams, variant: Option<OddVariant>) -> Vec<ConditionCheck> {
    let scale = scale_of(params);
    let w = params.omega[0];
    let (d1, d2) = (params.delta[0], params.delta[1]);
    let mut checks = common_frequency_checks(params, scale);
    checks.extend(equal_pair_coupling_checks(params, 0, 1, scale));
    checks.push(match variant {
        None => ConditionCheck::equal("delta[0] + delta[1] = omega", d1 + d2, w, scale),
        Some(OddVariant::A) => {
            ConditionCheck::equal("delta[0] - delta[1] = omega", d1 - d2, w, scale)
        }
        Some(OddVariant::B) => {
            ConditionCheck::equal("delta[1] - delta[0] = omega", d2 - d1, w, scale)
        }
    });
    checks
}

fn finish(
    kind: DarkStateKind,
    space: &Arc<HilbertSpace>,
    raw: Vec<(BasisState, f64)>,
    energy: f64,
    conditions: Vec<ConditionCheck>,
    enforce: bool,
) -> Result<DarkState> {
    if enforce && !all_satisfied(&conditions) {
        return Err(Error::ConditionsViolated(conditions));
    }
    let vector = assemble(space, &raw)?;
    let parity = raw
        .iter()
        .find(|(_, c)| *c != 0.0)
        .map(|(s, _)| parity_of(s))
        .expect("nonzero coefficients exist");
    Ok(DarkState {
        kind,
        space: space.clone(),
        vector,
        energy,
        parity,
        conditions,
        raw,
    })
}

fn dark_state_2q_impl(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    enforce: bool,
) -> Result<DarkState> {
    require_qubits(params, 2, "two-qubit dark state")?;
    check_space(params, space)?;
    let m = params.modes();
    let w: Vec<f64> = params.g.iter().map(|r| r[0]).collect();
    let (d1, d2) = (params.delta[0], params.delta[1]);
    let raw = pattern(m, &w, &[("du", 1.0), ("ud", -1.0)], &[("uu", d1 - d2)]);
    let conditions = two_qubit_conditions(params, None);
    finish(
        DarkStateKind::TwoQubitEven,
        space,
        raw,
        params.omega[0],
        conditions,
        enforce,
    )
}

/// Even-parity two-qubit dark state
/// `(Δ₁−Δ₂)|0,↑↑⟩ + |W⟩(|↓↑⟩ − |↑↓⟩)`, `|W⟩ = Σ g_i |1_i⟩`, at `E = ω`.
///
/// Requires `ω_i = ω`, `g_i1 = g_i2`, `Δ₁ + Δ₂ = ω`.
pub fn dark_state_2q(params: &RabiParams, space: &Arc<HilbertSpace>) -> Result<DarkState> {
    dark_state_2q_impl(params, space, true)
}

pub fn dark_state_2q_unchecked(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
) -> Result<DarkState> {
    dark_state_2q_impl(params, space, false)
}

fn dark_state_2q_odd_impl(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    variant: OddVariant,
    enforce: bool,
) -> Result<DarkState> {
    require_qubits(params, 2, "two-qubit dark state")?;
    check_space(params, space)?;
    let m = params.modes();
    let w: Vec<f64> = params.g.iter().map(|r| r[0]).collect();
    let sum = params.delta[0] + params.delta[1];
    let vac = match variant {
        OddVariant::A => "ud",
        OddVariant::B => "du",
    };
    let raw = pattern(m, &w, &[("dd", 1.0), ("uu", -1.0)], &[(vac, sum)]);
    let conditions = two_qubit_conditions(params, Some(variant));
    finish(
        DarkStateKind::TwoQubitOdd(variant),
        space,
        raw,
        params.omega[0],
        conditions,
        enforce,
    )
}

/// Odd-parity two-qubit dark states
/// `(Δ₁+Δ₂)|0,↑↓⟩ + |W⟩(|↓↓⟩ − |↑↑⟩)` (variant A, `Δ₁ − Δ₂ = ω`) and
/// `(Δ₁+Δ₂)|0,↓↑⟩ + |W⟩(|↓↓⟩ − |↑↑⟩)` (variant B, `Δ₂ − Δ₁ = ω`).
pub fn dark_state_2q_odd(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    variant: OddVariant,
) -> Result<DarkState> {
    dark_state_2q_odd_impl(params, space, variant, true)
}

pub fn dark_state_2q_odd_unchecked(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    variant: OddVariant,
) -> Result<DarkState> {
    dark_state_2q_odd_impl(params, space, variant, false)
}

fn three_qubit_conditions(params: &RabiParams) -> Vec<ConditionCheck> {
    let scale = scale_of(params);
    let w = params.omega[0];
    let mut checks = common_frequency_checks(params, scale);
    for j in 0..3 {
        checks.push(ConditionCheck::equal(
            format!("delta[{j}] = omega"),
            params.delta[j],
            w,
            scale,
        ));
    }
    let g = &params.g;
    for (i, row) in g.iter().enumerate() {
        checks.push(ConditionCheck::equal(
            format!("g[{i}][0] = g[{i}][1] + g[{i}][2]"),
            row[0],
            row[1] + row[2],
            scale,
        ));
    }
    checks.push(ConditionCheck::nonzero("g[0][1] != 0", g[0][1], scale));
    checks.push(ConditionCheck::nonzero("g[0][2] != 0", g[0][2], scale));
    // Coupling rows proportional to the first one.
    for (i, row) in g.iter().enumerate().skip(1) {
        checks.push(ConditionCheck::equal(
            format!("g[{i}][1] g[0][2] = g[{i}][2] g[0][1]"),
            row[1] * g[0][2],
            row[2] * g[0][1],
            scale * scale,
        ));
    }
    checks
}

fn dark_state_3q_impl(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    enforce: bool,
) -> Result<DarkState> {
    require_qubits(params, 3, "three-qubit dark state")?;
    check_space(params, space)?;
    let conditions = three_qubit_conditions(params);
    if enforce && !all_satisfied(&conditions) {
        return Err(Error::ConditionsViolated(conditions));
    }
    let m = params.modes();
    let w = params.omega[0];
    let (g1, g2, g3) = (params.g[0][0], params.g[0][1], params.g[0][2]);
    if g2 == 0.0 || g3 == 0.0 {
        return Err(Error::ConditionsViolated(conditions));
    }
    let wv: Vec<f64> = params.g.iter().map(|r| r[0]).collect();
    let raw = pattern(
        m,
        &wv,
        &[("udd", 1.0), ("dud", -1.0), ("ddu", -1.0), ("uuu", 1.0)],
        &[
            ("uud", w * g3 / g2),
            ("udu", w * g2 / g3),
            ("duu", -w * g1 * g1 / (g2 * g3)),
        ],
    );
    finish(
        DarkStateKind::ThreeQubitOdd,
        space,
        raw,
        w,
        conditions,
        false,
    )
}

/// Odd-parity three-qubit dark state at `E = ω`:
///
/// ```text
/// |W⟩(|↑↓↓⟩ − |↓↑↓⟩ − |↓↓↑⟩ + |↑↑↑⟩)
///   + ω g₁₃/g₁₂ |0,↑↑↓⟩ + ω g₁₂/g₁₃ |0,↑↓↑⟩ − ω g₁₁²/(g₁₂ g₁₃) |0,↓↑↑⟩
/// ```
///
/// with `|W⟩ = Σ g_i1 |1_i⟩`. Requires `Δ_j = ω_i = ω`, `g_i1 = g_i2 + g_i3`,
/// nonzero `g₁₂, g₁₃`, and (for several modes) coupling rows proportional to
/// the first.
pub fn dark_state_3q(params: &RabiParams, space: &Arc<HilbertSpace>) -> Result<DarkState> {
    dark_state_3q_impl(params, space, true)
}

pub fn dark_state_3q_unchecked(
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
) -> Result<DarkState> {
    dark_state_3q_impl(params, space, false)
}

fn base_qubits(kind: &DarkStateKind) -> usize {
    match kind {
        DarkStateKind::TwoQubitEven | DarkStateKind::TwoQubitOdd(_) => 2,
        DarkStateKind::ThreeQubitOdd => 3,
        DarkStateKind::Product { base, extra_pairs } => base_qubits(base) + 2 * extra_pairs,
    }
}

fn product_impl(
    base: &DarkState,
    extra_pairs: usize,
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
    enforce: bool,
) -> Result<DarkState> {
    let nb = base.space.dims().qubits;
    if nb != base_qubits(&base.kind) {
        return Err(Error::DimensionMismatch(
            "base state kind and space disagree".into(),
        ));
    }
    require_qubits(params, nb + 2 * extra_pairs, "product dark state")?;
    check_space(params, space)?;
    let scale = scale_of(params);
    let base_params = params.select_qubits(&(0..nb).collect::<Vec<_>>());
    let mut conditions = match &base.kind {
        DarkStateKind::TwoQubitEven => two_qubit_conditions(&base_params, None),
        DarkStateKind::TwoQubitOdd(v) => two_qubit_conditions(&base_params, Some(*v)),
        DarkStateKind::ThreeQubitOdd => three_qubit_conditions(&base_params),
        DarkStateKind::Product { .. } => {
            return Err(Error::InvalidParameter(
                "base must be a two- or three-qubit dark state".into(),
            ))
        }
    };
    // Base energy must be the one the full parameters give.
    conditions.push(ConditionCheck::equal(
        "base energy = omega[0]",
        base.energy,
        params.omega[0],
        scale,
    ));
    for p in 0..extra_pairs {
        let (a, b) = (nb + 2 * p, nb + 2 * p + 1);
        conditions.push(ConditionCheck::equal(
            format!("delta[{a}] = delta[{b}]"),
            params.delta[a],
            params.delta[b],
            scale,
        ));
        conditions.extend(equal_pair_coupling_checks(params, a, b, scale));
    }
    if enforce && !all_satisfied(&conditions) {
        return Err(Error::ConditionsViolated(conditions));
    }
    // Singlet ⊗k expansion: each pair contributes |↓↑⟩ − |↑↓⟩.
    let mut pair_terms: Vec<(Vec<Spin>, f64)> = vec![(vec![], 1.0)];
    for _ in 0..extra_pairs {
        let mut next = Vec::with_capacity(2 * pair_terms.len());
        for (s, c) in &pair_terms {
            for (tail, sign) in [
                ([Spin::Down, Spin::Up], 1.0),
                ([Spin::Up, Spin::Down], -1.0),
            ] {
                let mut t = s.clone();
                t.extend(tail);
                next.push((t, c * sign));
            }
        }
        pair_terms = next;
    }
    let raw: Vec<(BasisState, f64)> = base
        .raw
        .iter()
        .flat_map(|(st, c)| {
            pair_terms.iter().map(move |(tail, sign)| {
                let mut spins = st.spins.clone();
                spins.extend(tail.iter().copied());
                (BasisState::new(st.occupations.clone(), spins), c * sign)
            })
        })
        .collect();
    let kind = DarkStateKind::Product {
        base: Box::new(base.kind.clone()),
        extra_pairs,
    };
    finish(kind, space, raw, base.energy, conditions, false)
}

/// `|ψ_base⟩ ⊗ |ψ_B⟩^{⊗ extra_pairs}` with singlets
/// `|ψ_B⟩ ∝ |↓↑⟩ − |↑↓⟩` on the trailing qubit pairs.
///
/// Sufficient pairing conditions: both qubits of an extra pair share `Δ` and
/// each mode couples equally to both of them.
pub fn product_dark_state(
    base: &DarkState,
    extra_pairs: usize,
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
) -> Result<DarkState> {
    product_impl(base, extra_pairs, params, space, true)
}

pub fn product_dark_state_unchecked(
    base: &DarkState,
    extra_pairs: usize,
    params: &RabiParams,
    space: &Arc<HilbertSpace>,
) -> Result<DarkState> {
    product_impl(base, extra_pairs, params, space, false)
}

/// `‖(H − E)v‖ / ‖v‖` without support checks.
pub fn eigen_residual(h: &SparseOperator, v: &DVector<C64>, energy: f64) -> Result<f64> {
    if v.len() != h.dim() {
        return Err(Error::SpaceMismatch(format!(
            "vector of length {} against a {}-dimensional operator",
            v.len(),
            h.dim()
        )));
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("zero vector".into()));
    }
    let mut r = h.apply(v);
    r.axpy(C64::new(-energy, 0.0), v, C64::new(1.0, 0.0));
    Ok(r.norm() / norm)
}

/// `‖(H − E)v‖ / ‖v‖`. Rejects vectors with weight on the cutoff shell,
/// where truncation would hide part of `Hv`.
pub fn verify_eigenstate(h: &SparseOperator, v: &DVector<C64>, energy: f64) -> Result<f64> {
    let residual = eigen_residual(h, v, energy)?;
    let space = h.space();
    let n_max = space.dims().n_max;
    let boundary: f64 = space
        .states()
        .iter()
        .zip(v.iter())
        .filter(|(s, _)| s.total_photons() == n_max)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if boundary > 1e-12 * v.norm() {
        return Err(Error::CutoffTooSmall(format!(
            "vector has weight {boundary:.3e} on the {n_max}-photon cutoff shell"
        )));
    }
    Ok(residual)
}

/// Verifies a dark state against the Hamiltonian of `params` on its space.
pub fn dark_state_residual(state: &DarkState, params: &RabiParams) -> Result<f64> {
    let h = crate::operators::build_hamiltonian(params, &state.space)?;
    verify_eigenstate(&h, &state.vector, state.energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{enumerate_basis, ModelDims};
    use crate::operators::{build_hamiltonian, build_qubit_op, QubitAxis};

    fn space(m: usize, n: usize, c: usize, sector: Option<Parity>) -> Arc<HilbertSpace> {
        Arc::new(enumerate_basis(ModelDims::new(m, n, c).unwrap(), sector))
    }

    fn params2(d1: f64, d2: f64, g: &[f64]) -> RabiParams {
        RabiParams::new(
            vec![1.0; g.len()],
            vec![d1, d2],
            g.iter().map(|&x| vec![x, x]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_qubit_even_residual_and_parity() {
        let s = space(2, 2, 2, Some(Parity::Even));
        for g in [0.1, 0.5, 1.0] {
            let p = params2(0.9, 0.1, &[g, g]);
            let d = dark_state_2q(&p, &s).unwrap();
            assert_eq!(d.parity, Parity::Even);
            assert!(dark_state_residual(&d, &p).unwrap() < 1e-10);
            assert_eq!(d.weight_above(2), 0.0);
        }
    }

    #[test]
    fn equal_splittings_leave_no_vacuum() {
        let s = space(3, 2, 2, None);
        let p = params2(0.5, 0.5, &[0.1, 0.2, 0.3]);
        let d = dark_state_2q(&p, &s).unwrap();
        let vac = BasisState::vacuum(3, vec![Spin::Up, Spin::Up]);
        assert_eq!(d.amplitude(&vac), C64::new(0.0, 0.0));
        let a1 = d.amplitude(&BasisState::new(vec![1, 0, 0], vec![Spin::Down, Spin::Up]));
        let a3 = d.amplitude(&BasisState::new(vec![0, 0, 1], vec![Spin::Down, Spin::Up]));
        assert!((a1.re / a3.re - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_limit_is_vacuum() {
        let s = space(2, 2, 1, None);
        let p = params2(0.7, 0.3, &[0.0, 0.0]);
        let d = dark_state_2q(&p, &s).unwrap();
        let vac = BasisState::vacuum(2, vec![Spin::Up, Spin::Up]);
        assert!((d.amplitude(&vac).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn violated_conditions_are_itemized() {
        let s = space(2, 2, 2, None);
        let p = params2(0.7, 0.5, &[0.2, 0.2]);
        match dark_state_2q(&p, &s) {
            Err(Error::ConditionsViolated(c)) => {
                let bad: Vec<_> = c.iter().filter(|x| !x.satisfied).collect();
                assert_eq!(bad.len(), 1);
                assert!((bad[0].deviation - 0.2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_variants() {
        let s = space(2, 2, 2, Some(Parity::Odd));
        let pa = params2(1.2, 0.2, &[0.3, 0.3]);
        let a = dark_state_2q_odd(&pa, &s, OddVariant::A).unwrap();
        assert!(dark_state_residual(&a, &pa).unwrap() < 1e-10);
        let pb = params2(0.2, 1.2, &[0.3, 0.6]);
        let b = dark_state_2q_odd(&pb, &s, OddVariant::B).unwrap();
        assert!(dark_state_residual(&b, &pb).unwrap() < 1e-10);
        assert!(s.states().iter().all(|st| parity_of(st) == Parity::Odd));
    }

    #[test]
    fn three_qubit_figure_couplings() {
        let s = space(2, 3, 2, Some(Parity::Odd));
        let g = 0.37;
        let p = RabiParams::new(vec![1.0; 2], vec![1.0; 3], vec![vec![2.0 * g, g, g]; 2]).unwrap();
        let d = dark_state_3q(&p, &s).unwrap();
        assert_eq!(d.parity, Parity::Odd);
        assert!(dark_state_residual(&d, &p).unwrap() < 1e-10);
    }

    #[test]
    fn three_qubit_forced_off_condition() {
        let s = space(2, 3, 2, None);
        let g = 0.3;
        let p = RabiParams::new(vec![1.0; 2], vec![1.0; 3], vec![vec![2.2 * g, g, g]; 2]).unwrap();
        assert!(matches!(
            dark_state_3q(&p, &s),
            Err(Error::ConditionsViolated(_))
        ));
        let forced = dark_state_3q_unchecked(&p, &s).unwrap();
        assert!(
            eigen_residual(&build_hamiltonian(&p, &s).unwrap(), &forced.vector, 1.0).unwrap()
                > 1e-3
        );
    }

    #[test]
    fn products_with_singlets() {
        let s4 = space(2, 4, 2, None);
        let p2 = RabiParams::new(
            vec![1.0; 2],
            vec![0.8, 0.2],
            vec![vec![0.3, 0.3], vec![0.1, 0.1]],
        )
        .unwrap();
        let base = dark_state_2q(&p2, &space(2, 2, 2, None)).unwrap();
        let p4 = RabiParams::new(
            vec![1.0; 2],
            vec![0.8, 0.2, 0.45, 0.45],
            vec![vec![0.3, 0.3, 0.2, 0.2], vec![0.1, 0.1, 0.5, 0.5]],
        )
        .unwrap();
        let d = product_dark_state(&base, 1, &p4, &s4).unwrap();
        assert!(dark_state_residual(&d, &p4).unwrap() < 1e-10);
        assert_eq!(d.parity, Parity::Odd);
        // Singlet annihilated by the symmetric σ_x and σ_z sums of its pair.
        for axis in [QubitAxis::X, QubitAxis::Z] {
            let a = build_qubit_op(&s4, 2, axis).unwrap().apply(&d.vector);
            let b = build_qubit_op(&s4, 3, axis).unwrap().apply(&d.vector);
            assert!((a + b).norm() < 1e-14);
        }
    }

    #[test]
    fn residual_rejects_cutoff_support() {
        let s = space(1, 1, 1, None);
        let p = RabiParams::new(vec![1.0], vec![0.2], vec![vec![0.0]]).unwrap();
        let h = build_hamiltonian(&p, &s).unwrap();
        let mut v = DVector::zeros(s.dim());
        v[s.dim() - 1] = C64::new(1.0, 0.0);
        assert!(matches!(
            verify_eigenstate(&h, &v, 0.8),
            Err(Error::CutoffTooSmall(_))
        ));
        assert!(eigen_residual(&h, &v, 0.8).unwrap() < 1e-15);
    }
}
