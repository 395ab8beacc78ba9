// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 5(4) with continuous (dense) output.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl IntegratorOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            atol: rtol,
            ..Self::default()
        }
    }
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-9,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
    pub last_step: f64,
}

impl IntegrationStats {
    fn absorb(&mut self, other: IntegrationStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evaluations += other.rhs_evaluations;
        self.last_step = other.last_step;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Workspace {
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    y_new: Vec<C64>,
    err: Vec<C64>,
    cont: [Vec<C64>; 5],
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = || vec![C64::new(0.0, 0.0); n];
        Self {
            k: [z(), z(), z(), z(), z(), z(), z()],
            stage: z(),
            y_new: z(),
            err: z(),
            cont: [z(), z(), z(), z(), z()],
        }
    }
}

fn combine(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            if *c != 0.0 {
                acc += k[i] * *c;
            }
        }
        *o = y[i] + acc * h;
    }
}

fn scaled_norm(v: &[C64], y0: &[C64], y1: &[C64], opts: &IntegratorOptions) -> f64 {
    let n = v.len().max(1) as f64;
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &[C64],
    f0: &[C64],
    span: f64,
    opts: &IntegratorOptions,
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let d0 = scaled_norm(y0, y0, y0, opts);
    let d1 = scaled_norm(f0, y0, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1: Vec<C64> = y0.iter().zip(f0).map(|(y, k)| y + k * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y0.len()];
    f(t0 + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y0, y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).min(opts.h_max)
}

/// Integrates `y' = f(t, y)` over `[t0, t1]` (smooth right-hand side).
/// `on_sample` is called at every time in `samples` (ascending, inside the
/// interval) with the interpolated state.
pub fn integrate<F, S>(
    f: &mut F,
    t0: f64,
    t1: f64,
    y: &mut [C64],
    opts: &IntegratorOptions,
    samples: &[f64],
    on_sample: &mut S,
) -> Result<IntegrationStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    S: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let mut stats = IntegrationStats::default();
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] <= t0 {
        on_sample(samples[next_sample], y)?;
        next_sample += 1;
    }
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(stats);
    }
    let mut ws = Workspace::new(n);
    f(t0, y, &mut ws.k[0]);
    stats.rhs_evaluations += 1;
    let mut h = initial_step(f, t0, y, &ws.k[0].clone(), span, opts);
    stats.rhs_evaluations += 1;
    let mut t = t0;
    let mut last_stiffness = 0.0;
    let mut sample_buf = vec![C64::new(0.0, 0.0); n];

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepFailure {
                t,
                step: h,
                stiffness: last_stiffness,
            });
        }
        let last = t + h >= t1 - 1e-14 * t1.abs().max(1.0);
        if last {
            h = t1 - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure {
                t,
                step: h,
                stiffness: last_stiffness,
            });
        }
        let Workspace {
            k,
            stage,
            y_new,
            err,
            cont,
        } = &mut ws;
        let [k1, k2, k3, k4, k5, k6, k7] = k;
        combine(stage, y, h, &[(A21, k1)]);
        f(t + C2 * h, stage, k2);
        combine(stage, y, h, &[(A31, k1), (A32, k2)]);
        f(t + C3 * h, stage, k3);
        combine(stage, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        f(t + C4 * h, stage, k4);
        combine(stage, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        f(t + C5 * h, stage, k5);
        combine(
            stage,
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        );
        let t_new = if last { t1 } else { t + h };
        f(t_new, stage, k6);
        combine(
            y_new,
            y,
            h,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
        );
        f(t_new, y_new, k7);
        stats.rhs_evaluations += 6;
        for i in 0..n {
            err[i] =
                (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        let e = scaled_norm(err, y, y_new, opts);
        // Stiffness estimate h·|k7 − k6| / |y_new − stage6|.
        let num: f64 = k7
            .iter()
            .zip(k6.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = y_new
            .iter()
            .zip(stage.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        if den > 0.0 {
            last_stiffness = h * (num / den).sqrt();
        }
        if !e.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            continue;
        }
        if e <= 1.0 {
            stats.accepted += 1;
            stats.last_step = h;
            let mut have_cont = false;
            while next_sample < samples.len() && samples[next_sample] <= t_new {
                let ts = samples[next_sample];
                if ts >= t_new {
                    on_sample(ts, y_new)?;
                } else {
                    if !have_cont {
                        for i in 0..n {
                            let ydiff = y_new[i] - y[i];
                            let bspl = k1[i] * h - ydiff;
                            cont[0][i] = y[i];
                            cont[1][i] = ydiff;
                            cont[2][i] = bspl;
                            cont[3][i] = ydiff - k7[i] * h - bspl;
                            cont[4][i] = (k1[i] * D1
                                + k3[i] * D3
                                + k4[i] * D4
                                + k5[i] * D5
                                + k6[i] * D6
                                + k7[i] * D7)
                                * h;
                        }
                        have_cont = true;
                    }
                    let th = (ts - t) / h;
                    let th1 = 1.0 - th;
                    for i in 0..n {
                        sample_buf[i] = cont[0][i]
                            + (cont[1][i]
                                + (cont[2][i] + (cont[3][i] + cont[4][i] * th1) * th) * th1)
                                * th;
                    }
                    on_sample(ts, &sample_buf)?;
                }
                next_sample += 1;
            }
            y.copy_from_slice(y_new);
            std::mem::swap(k1, k7);
            t = t_new;
            let fac = (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = (h * fac).min(opts.h_max);
            if last {
                break;
            }
        } else {
            stats.rejected += 1;
            let fac = (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            h *= fac;
        }
    }
    while next_sample < samples.len() {
        on_sample(samples[next_sample], y)?;
        next_sample += 1;
    }
    Ok(stats)
}

/// Integrates across `breakpoints` (ascending, first = start, last = end),
/// restarting the step sequence at each so that kinks in the right-hand side
/// never fall inside a step. Samples on a breakpoint are emitted once.
pub fn integrate_piecewise<F, S>(
    f: &mut F,
    breakpoints: &[f64],
    y: &mut [C64],
    opts: &IntegratorOptions,
    samples: &[f64],
    on_sample: &mut S,
) -> Result<IntegrationStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    S: FnMut(f64, &[C64]) -> Result<()>,
{
    let mut stats = IntegrationStats::default();
    if breakpoints.len() < 2 {
        for &s in samples {
            on_sample(s, y)?;
        }
        return Ok(stats);
    }
    let mut start = 0;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut end = start;
        while end < samples.len() && samples[end] <= b {
            end += 1;
        }
        let seg_stats = integrate(f, a, b, y, opts, &samples[start..end], on_sample)?;
        stats.absorb(seg_stats);
        start = end;
    }
    for &s in &samples[start..] {
        on_sample(s, y)?;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_rotation_with_dense_output() {
        // y' = −i ω y, y(0) = 1.
        let w = 1.7;
        let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = C64::new(0.0, -w) * y[0];
        let mut y = vec![C64::new(1.0, 0.0)];
        let samples: Vec<f64> = (0..=50).map(|k| k as f64 * 0.2).collect();
        let mut worst: f64 = 0.0;
        let opts = IntegratorOptions::with_rtol(1e-10);
        integrate(&mut f, 0.0, 10.0, &mut y, &opts, &samples, &mut |t, y| {
            let exact = C64::new(0.0, -w * t).exp();
            worst = worst.max((y[0] - exact).norm());
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn piecewise_kink_is_exact_for_linear_growth() {
        // y' = |t − 1|; y(2) = 1.
        let mut f = |t: f64, _y: &[C64], dy: &mut [C64]| dy[0] = C64::new((t - 1.0).abs(), 0.0);
        let mut y = vec![C64::new(0.0, 0.0)];
        let mut seen = Vec::new();
        integrate_piecewise(
            &mut f,
            &[0.0, 1.0, 2.0],
            &mut y,
            &IntegratorOptions::default(),
            &[0.0, 1.0, 2.0],
            &mut |t, y| {
                seen.push((t, y[0].re));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen.len(), 3);
        assert!((seen[1].1 - 0.5).abs() < 1e-12);
        assert!((y[0].re - 1.0).abs() < 1e-12);
    }
}
