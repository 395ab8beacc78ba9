// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-linear parameter schedules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::RabiParams;

/// Piecewise-linear curve through `(times[k], values[k])`, constant outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let c = Self { times, values };
        c.validate()?;
        Ok(c)
    }

    pub fn constant(value: f64) -> Self {
        Self {
            times: vec![0.0],
            values: vec![value],
        }
    }

    pub fn ramp(t0: f64, t1: f64, v0: f64, v1: f64) -> Self {
        Self {
            times: vec![t0, t1],
            values: vec![v0, v1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times.len() != self.values.len() {
            return Err(Error::InvalidSchedule(format!(
                "curve needs matching nonempty times/values, got {} and {}",
                self.times.len(),
                self.values.len()
            )));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSchedule(
                "curve times must be strictly increasing".into(),
            ));
        }
        if self
            .times
            .iter()
            .chain(&self.values)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidSchedule(
                "curve contains non-finite values".into(),
            ));
        }
        Ok(())
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let n = self.times.len();
        if n < 2 || t < self.times[0] || t >= self.times[n - 1] {
            return None;
        }
        Some(self.times.partition_point(|&x| x <= t) - 1)
    }

    pub fn value(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let k = self.segment(t).unwrap();
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Right derivative.
    pub fn rate(&self, t: f64) -> f64 {
        match self.segment(t) {
            Some(k) => (self.values[k + 1] - self.values[k]) / (self.times[k + 1] - self.times[k]),
            None => 0.0,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `t ↦ self(T − t)`.
    pub fn reversed(&self, duration: f64) -> Self {
        let times: Vec<f64> = self.times.iter().rev().map(|t| duration - t).collect();
        let values = self.values.iter().rev().copied().collect();
        Self { times, values }
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// Constraint that a schedule must satisfy at every breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScheduleConstraint {
    /// `Σ_{j ∈ qubits} Δ_j = value`.
    SplittingSum { qubits: Vec<usize>, value: f64 },
    /// `g_{i a} = g_{i b}` for every mode.
    EqualCouplings { a: usize, b: usize },
}

impl ScheduleConstraint {
    pub fn describe(&self) -> String {
        match self {
            Self::SplittingSum { qubits, value } => {
                let terms: Vec<String> = qubits.iter().map(|j| format!("delta[{j}]")).collect();
                format!("{} = {value}", terms.join(" + "))
            }
            Self::EqualCouplings { a, b } => format!("g[i][{a}] = g[i][{b}]"),
        }
    }
}

/// Time-dependent model parameters on `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub duration: f64,
    /// Mode frequencies (fixed).
    pub omega: Vec<f64>,
    /// `Δ_j(t)`.
    pub delta: Vec<PiecewiseLinear>,
    /// `g_ij(t)`, row = mode.
    pub g: Vec<Vec<PiecewiseLinear>>,
    /// Coupler decay `κ_c,i(t)` per mode.
    pub kappa_c: Vec<PiecewiseLinear>,
    pub constraints: Vec<ScheduleConstraint>,
}

impl ProtocolSchedule {
    /// All curves constant at `params`, no coupler decay.
    pub fn frozen(params: &RabiParams, duration: f64) -> Result<Self> {
        let s = Self {
            duration,
            omega: params.omega.clone(),
            delta: params
                .delta
                .iter()
                .map(|d| PiecewiseLinear::constant(*d))
                .collect(),
            g: params
                .g
                .iter()
                .map(|row| row.iter().map(|g| PiecewiseLinear::constant(*g)).collect())
                .collect(),
            kappa_c: vec![PiecewiseLinear::constant(0.0); params.modes()],
            constraints: vec![],
        };
        s.validate()?;
        Ok(s)
    }

    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    pub fn qubits(&self) -> usize {
        self.delta.len()
    }

    fn curves(&self) -> impl Iterator<Item = &PiecewiseLinear> {
        self.delta
            .iter()
            .chain(self.g.iter().flatten())
            .chain(&self.kappa_c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if self.omega.is_empty() || self.delta.is_empty() {
            return Err(Error::InvalidSchedule(
                "schedule needs modes and qubits".into(),
            ));
        }
        if self.g.len() != self.modes() || self.g.iter().any(|r| r.len() != self.qubits()) {
            return Err(Error::InvalidSchedule(
                "coupling curves must form a modes × qubits grid".into(),
            ));
        }
        if self.kappa_c.len() != self.modes() {
            return Err(Error::InvalidSchedule(
                "one coupler-decay curve per mode".into(),
            ));
        }
        for c in self.curves() {
            c.validate()?;
        }
        if self
            .kappa_c
            .iter()
            .flat_map(|c| &c.values)
            .any(|k| *k < 0.0)
        {
            return Err(Error::InvalidSchedule(
                "decay rates must be non-negative".into(),
            ));
        }
        if self.omega.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidSchedule(
                "mode frequencies must be positive".into(),
            ));
        }
        for c in &self.constraints {
            self.check_constraint(c)?;
        }
        Ok(())
    }

    fn check_constraint(&self, c: &ScheduleConstraint) -> Result<()> {
        for t in self.breakpoints() {
            let p = self.params_at(t);
            let ok = match c {
                ScheduleConstraint::SplittingSum { qubits, value } => {
                    let s: f64 = qubits.iter().map(|&j| p.delta[j]).sum();
                    (s - value).abs() <= 1e-12 * value.abs().max(1.0)
                }
                ScheduleConstraint::EqualCouplings { a, b } => {
                    p.g.iter()
                        .all(|row| (row[*a] - row[*b]).abs() <= 1e-12 * row[*a].abs().max(1.0))
                }
            };
            if !ok {
                return Err(Error::InvalidSchedule(format!(
                    "constraint {} fails at t = {t}",
                    c.describe()
                )));
            }
        }
        Ok(())
    }

    /// Sorted union of all curve breakpoints inside `[0, duration]`, with both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .curves()
            .flat_map(|c| c.times.iter().copied())
            .filter(|t| *t > 0.0 && *t < self.duration)
            .collect();
        ts.push(0.0);
        ts.push(self.duration);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * self.duration);
        ts
    }

    pub fn params_at(&self, t: f64) -> RabiParams {
        RabiParams {
            omega: self.omega.clone(),
            delta: self.delta.iter().map(|c| c.value(t)).collect(),
            g: self
                .g
                .iter()
                .map(|r| r.iter().map(|c| c.value(t)).collect())
                .collect(),
        }
    }

    /// `d/dt` of the parameters (right derivative); mode frequencies are fixed.
    pub fn params_rate(&self, t: f64) -> RabiParams {
        RabiParams {
            omega: vec![0.0; self.modes()],
            delta: self.delta.iter().map(|c| c.rate(t)).collect(),
            g: self
                .g
                .iter()
                .map(|r| r.iter().map(|c| c.rate(t)).collect())
                .collect(),
        }
    }

    pub fn kappa_c_at(&self, t: f64) -> Vec<f64> {
        self.kappa_c.iter().map(|c| c.value(t)).collect()
    }

    /// True when nothing changes in time.
    pub fn is_frozen(&self) -> bool {
        self.curves().all(PiecewiseLinear::is_constant)
    }

    /// Same curves traversed backwards in time.
    pub fn reversed(&self) -> Self {
        let d = self.duration;
        Self {
            duration: d,
            omega: self.omega.clone(),
            delta: self.delta.iter().map(|c| c.reversed(d)).collect(),
            g: self
                .g
                .iter()
                .map(|r| r.iter().map(|c| c.reversed(d)).collect())
                .collect(),
            kappa_c: self.kappa_c.iter().map(|c| c.reversed(d)).collect(),
            constraints: self.constraints.clone(),
        }
    }

    /// Appends `other` after this schedule (mode frequencies must agree).
    pub fn then(&self, other: &ProtocolSchedule) -> Result<Self> {
        if self.omega != other.omega || self.qubits() != other.qubits() {
            return Err(Error::InvalidSchedule(
                "cannot join schedules of different models".into(),
            ));
        }
        let d = self.duration;
        let join = |a: &PiecewiseLinear, b: &PiecewiseLinear| {
            let mut times = a.times.clone();
            let mut values = a.values.clone();
            if *times.last().unwrap() < d {
                times.push(d);
                values.push(a.value(d));
            }
            for (t, v) in b.times.iter().zip(&b.values) {
                let tt = (t.max(0.0)) + d;
                if tt > *times.last().unwrap() {
                    times.push(tt);
                    values.push(*v);
                } else if *t <= 0.0 && b.value(0.0) != a.value(d) {
                    // Discontinuity at the join: step just after.
                    let eps = 1e-9 * d.max(1.0);
                    times.push(d + eps);
                    values.push(b.value(0.0));
                }
            }
            PiecewiseLinear { times, values }
        };
        let s = Self {
            duration: d + other.duration,
            omega: self.omega.clone(),
            delta: self
                .delta
                .iter()
                .zip(&other.delta)
                .map(|(a, b)| join(a, b))
                .collect(),
            g: self
                .g
                .iter()
                .zip(&other.g)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| join(a, b)).collect())
                .collect(),
            kappa_c: self
                .kappa_c
                .iter()
                .zip(&other.kappa_c)
                .map(|(a, b)| join(a, b))
                .collect(),
            constraints: vec![],
        };
        s.validate()?;
        Ok(s)
    }
}

/// Per-mode weights `w_i` for the coupling ramps `g_i: 0 → g_max·w_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModeWeights {
    /// All ones (prototype W state).
    Uniform,
    /// Explicit weights, used as given.
    Custom(Vec<f64>),
}

impl ModeWeights {
    pub fn resolve(&self, modes: usize) -> Result<Vec<f64>> {
        match self {
            Self::Uniform => Ok(vec![1.0; modes]),
            Self::Custom(w) if w.len() == modes => Ok(w.clone()),
            Self::Custom(w) => Err(Error::InvalidSchedule(format!(
                "{} weights for {modes} modes",
                w.len()
            ))),
        }
    }

    /// Weights `(1, …, 1, √2)` rescaled to `Σ w² = M`, so the last mode carries
    /// half of the photon and the peak coupling stays comparable to the
    /// uniform case.
    pub fn perfect_w(modes: usize) -> Self {
        let mut w = vec![1.0; modes];
        if let Some(last) = w.last_mut() {
            *last = 2f64.sqrt();
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>();
        let s = (modes as f64 / norm).sqrt();
        Self::Custom(w.into_iter().map(|x| x * s).collect())
    }
}

/// Linear W-generation ramp for two qubits and `modes` modes at `ω = 1`:
/// `Δ₁: (1+δ₀)/2 → 1/2`, `Δ₂: (1−δ₀)/2 → 1/2`, `g_i1 = g_i2: 0 → g_max·w_i`.
pub fn make_w_generation_schedule(
    modes: usize,
    duration: f64,
    g_max: f64,
    delta_split_initial: f64,
    weights: &ModeWeights,
) -> Result<ProtocolSchedule> {
    let omega = 1.0;
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidSchedule(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(g_max > 0.0) {
        return Err(Error::InvalidSchedule(format!(
            "g_max must be positive, got {g_max}"
        )));
    }
    if !(delta_split_initial > 0.0 && delta_split_initial <= omega) {
        return Err(Error::InvalidSchedule(format!(
            "initial splitting must lie in (0, ω], got {delta_split_initial}"
        )));
    }
    if modes == 0 {
        return Err(Error::InvalidSchedule("need at least one mode".into()));
    }
    let w = weights.resolve(modes)?;
    let half = omega / 2.0;
    let s = ProtocolSchedule {
        duration,
        omega: vec![omega; modes],
        delta: vec![
            PiecewiseLinear::ramp(0.0, duration, half + delta_split_initial / 2.0, half),
            PiecewiseLinear::ramp(0.0, duration, half - delta_split_initial / 2.0, half),
        ],
        g: w.iter()
            .map(|wi| vec![PiecewiseLinear::ramp(0.0, duration, 0.0, g_max * wi); 2])
            .collect(),
        kappa_c: vec![PiecewiseLinear::constant(0.0); modes],
        constraints: vec![
            ScheduleConstraint::SplittingSum {
                qubits: vec![0, 1],
                value: omega,
            },
            ScheduleConstraint::EqualCouplings { a: 0, b: 1 },
        ],
    };
    s.validate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_values_and_rates() {
        let c = PiecewiseLinear::new(vec![0.0, 2.0, 3.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.value(1.0), 0.5);
        assert_eq!(c.rate(1.0), 0.5);
        assert_eq!(c.rate(2.5), 0.0);
        assert_eq!(c.value(10.0), 1.0);
        let r = c.reversed(3.0);
        assert_eq!(r.value(0.0), 1.0);
        assert_eq!(r.value(3.0), 0.0);
    }

    #[test]
    fn w_schedule_keeps_splitting_sum() {
        let s = make_w_generation_schedule(3, 100.0, 0.25, 0.8, &ModeWeights::Uniform).unwrap();
        for t in [0.0, 13.0, 50.0, 100.0] {
            let p = s.params_at(t);
            assert!((p.delta[0] + p.delta[1] - 1.0).abs() < 1e-15);
        }
        let p0 = s.params_at(0.0);
        assert!((p0.delta[0] - 0.9).abs() < 1e-15 && (p0.delta[1] - 0.1).abs() < 1e-15);
        assert!((s.params_at(100.0).g[2][1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_duration_rejected() {
        assert!(matches!(
            make_w_generation_schedule(2, 0.0, 0.25, 0.8, &ModeWeights::Uniform),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn perfect_w_weights() {
        let ModeWeights::Custom(w) = ModeWeights::perfect_w(3) else {
            unreachable!()
        };
        let n: f64 = w.iter().map(|x| x * x).sum();
        assert!((n - 3.0).abs() < 1e-12);
        assert!((w[2] * w[2] / n - 0.5).abs() < 1e-12);
    }

    #[test]
    fn joined_schedules() {
        let gen = make_w_generation_schedule(2, 10.0, 0.25, 0.8, &ModeWeights::Uniform).unwrap();
        let mut hold = ProtocolSchedule::frozen(&gen.params_at(10.0), 5.0).unwrap();
        hold.kappa_c[0] = PiecewiseLinear::ramp(1.0, 2.0, 0.0, 0.1);
        let all = gen.then(&hold).unwrap();
        assert_eq!(all.duration, 15.0);
        assert_eq!(all.kappa_c_at(11.5)[0], 0.05);
        assert!((all.params_at(12.0).g[1][0] - 0.25).abs() < 1e-15);
        assert_eq!(all.breakpoints(), vec![0.0, 10.0, 11.0, 12.0, 15.0]);
    }
}
