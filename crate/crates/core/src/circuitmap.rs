// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Superconducting-circuit parameters to effective two-qubit two-mode Rabi
//! couplings.
//!
//! Two charge qubits and two resonators are joined by four SQUID couplers
//! `k = 1..4` linking (qubit, resonator) = (1,1), (1,2), (2,1), (2,2). With
//! `C̄_J = C_J + 2C_c`, `C̄_r = C_r + 2C_c`, `Ē_k = E_Js cos φ_DC,k`:
//!
//! ```text
//! γ_r   = Σ_{k→r} 1/Ē_k · C_c² Φ₀² / (16π² C̄_r² L_r²)
//! L̄_r   = 1 / (1/L_r + 2γ_r),        ω_r = 1/√(C̄_r L̄_r)
//! g0_k  = Φ₀ C_c² E_J,q √(ħ ω_r L̄_r / 2) / (8π C̄_r C̄_J,q L_r Ē_k)
//! g1_k  = g0_k tan φ_DC,k,           rabi_k = A_k g1_k / 2
//! ```
//!
//! The drive phases (π, 2π) turn the `σ_y(a − a†)` interaction into
//! `σ_x(a + a†)`. Interface units: fF, nH, GHz (energies as `E/h`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::RabiParams;

/// Magnetic flux quantum `h/2e` in Wb.
pub const FLUX_QUANTUM: f64 = 2.067_833_848_461_929e-15;
/// Planck constant in J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge in C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

const FEMTO: f64 = 1e-15;
const NANO: f64 = 1e-9;
const GIGA: f64 = 1e9;

/// Below this `|cos φ_DC|` the static SQUID energy is treated as divergent.
pub const COS_DC_MIN: f64 = 1e-3;
/// AC/DC flux ratio above which the small-signal expansion is flagged.
pub const AC_RATIO_WARN: f64 = 0.1;
/// `E_J/E_C` above which the charge-regime assumption is flagged.
pub const CHARGE_RATIO_WARN: f64 = 1.0;

/// (qubit, resonator) joined by coupler `k`.
pub const COUPLER_MAP: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerDrive {
    /// AC flux amplitude `A` (rad), shared by both tones.
    pub amplitude: f64,
    /// Tone frequencies (GHz).
    pub frequencies: [f64; 2],
    /// Tone phases (rad).
    pub phases: [f64; 2],
}

impl CouplerDrive {
    /// Amplitude `a` with the phase choice (π, 2π).
    pub fn standard(amplitude: f64, frequencies: [f64; 2]) -> Self {
        Self {
            amplitude,
            frequencies,
            phases: [std::f64::consts::PI, 2.0 * std::f64::consts::PI],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    /// Gate capacitances (fF).
    pub c_gate: [f64; 2],
    /// Qubit junction capacitances (fF).
    pub c_qubit: [f64; 2],
    /// Coupler capacitance (fF).
    pub c_coupler: f64,
    /// SQUID capacitance (fF).
    pub c_squid: f64,
    /// Resonator capacitances (fF).
    pub c_resonator: [f64; 2],
    /// Resonator inductances (nH).
    pub l_resonator: [f64; 2],
    /// Qubit Josephson energies (GHz).
    pub e_j: [f64; 2],
    /// SQUID junction energy (GHz).
    pub e_js: f64,
    /// Static flux per coupler (rad).
    pub phi_dc: [f64; 4],
    pub drive: [CouplerDrive; 4],
}

impl CircuitParams {
    /// Identical qubits, resonators and couplers.
    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        c_qubit: f64,
        c_coupler: f64,
        c_resonator: f64,
        l_resonator: f64,
        e_j: f64,
        e_js: f64,
        phi_dc: f64,
        drive: CouplerDrive,
    ) -> Self {
        Self {
            c_gate: [1.0; 2],
            c_qubit: [c_qubit; 2],
            c_coupler,
            c_squid: 1.0,
            c_resonator: [c_resonator; 2],
            l_resonator: [l_resonator; 2],
            e_j: [e_j; 2],
            e_js,
            phi_dc: [phi_dc; 4],
            drive: [drive.clone(), drive.clone(), drive.clone(), drive],
        }
    }

    fn check_positive(&self) -> Result<()> {
        let named: [(&str, &[f64]); 8] = [
            ("c_gate", &self.c_gate),
            ("c_qubit", &self.c_qubit),
            ("c_coupler", std::slice::from_ref(&self.c_coupler)),
            ("c_squid", std::slice::from_ref(&self.c_squid)),
            ("c_resonator", &self.c_resonator),
            ("l_resonator", &self.l_resonator),
            ("e_j", &self.e_j),
            ("e_js", std::slice::from_ref(&self.e_js)),
        ];
        for (name, vals) in named {
            if vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive"
                )));
            }
        }
        let finite = self.phi_dc.iter().all(|p| p.is_finite())
            && self.drive.iter().all(|d| {
                d.amplitude.is_finite()
                    && d.frequencies.iter().all(|f| f.is_finite())
                    && d.phases.iter().all(|p| p.is_finite())
            });
        if !finite {
            return Err(Error::InvalidParameter(
                "flux and drive parameters must be finite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveRabiParams {
    /// `E_J/h` per qubit (GHz).
    pub qubit_frequencies: [f64; 2],
    /// Dressed resonator frequencies `ω_r/2π` (GHz).
    pub resonator_frequencies: [f64; 2],
    /// Static couplings per coupler (GHz).
    pub g0: [f64; 4],
    /// Flux-tunable couplings per coupler (GHz per rad).
    pub g1: [f64; 4],
    /// Effective Rabi couplings `A g1 / 2` per coupler (GHz).
    pub rabi_couplings: [f64; 4],
}

impl EffectiveRabiParams {
    /// Couplings arranged as `[mode][qubit]`.
    pub fn coupling_matrix(&self) -> Vec<Vec<f64>> {
        let mut g = vec![vec![0.0; 2]; 2];
        for (k, &(q, r)) in COUPLER_MAP.iter().enumerate() {
            g[r][q] = self.rabi_couplings[k];
        }
        g
    }

    /// Rotating-frame model in units of `reference` (GHz): the couplings
    /// come from the circuit, the frame frequencies `omega` and `delta` (in
    /// the same units) are set by the drive detunings.
    pub fn to_rabi_params(
        &self,
        reference: f64,
        omega: Vec<f64>,
        delta: Vec<f64>,
    ) -> Result<RabiParams> {
        if !(reference > 0.0) {
            return Err(Error::InvalidParameter(
                "reference frequency must be positive".into(),
            ));
        }
        let g = self
            .coupling_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|x| x / reference).collect())
            .collect();
        RabiParams::new(omega, delta, g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    /// `E_J/E_C` per qubit with `E_C = e²/2C̄_J`.
    pub charge_ratios: [f64; 2],
    /// `|A| / |φ_DC|` per coupler (infinite when `φ_DC = 0` and `A ≠ 0`).
    pub ac_ratios: [f64; 4],
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl RegimeReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

fn dressed_capacitances(c: &CircuitParams) -> ([f64; 2], [f64; 2]) {
    let cc = c.c_coupler * FEMTO;
    (
        c.c_qubit.map(|x| x * FEMTO + 2.0 * cc),
        c.c_resonator.map(|x| x * FEMTO + 2.0 * cc),
    )
}

/// Flags the approximations behind [`effective_couplings`]; never fails.
pub fn validate_regime(circuit: &CircuitParams) -> RegimeReport {
    let (cj, _) = dressed_capacitances(circuit);
    let charge_ratios = [0, 1].map(|q| {
        let e_c = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * cj[q]);
        circuit.e_j[q] * GIGA * PLANCK / e_c
    });
    let ac_ratios = [0, 1, 2, 3].map(|k| {
        let a = circuit.drive[k].amplitude.abs();
        let p = circuit.phi_dc[k].abs();
        if a == 0.0 {
            0.0
        } else if p == 0.0 {
            f64::INFINITY
        } else {
            a / p
        }
    });
    let mut warnings = Vec::new();
    for (q, r) in charge_ratios.iter().enumerate() {
        if *r > CHARGE_RATIO_WARN {
            warnings.push(format!(
                "qubit {}: E_J/E_C = {r:.3} exceeds {CHARGE_RATIO_WARN}; charge-regime two-level approximation is questionable",
                q + 1
            ));
        }
    }
    for (k, r) in ac_ratios.iter().enumerate() {
        if *r > AC_RATIO_WARN && circuit.phi_dc[k] != 0.0 {
            warnings.push(format!(
                "coupler {}: |A|/|φ_DC| = {r:.3} exceeds {AC_RATIO_WARN}; small-signal flux expansion is questionable",
                k + 1
            ));
        }
    }
    for (k, phi) in circuit.phi_dc.iter().enumerate() {
        if phi.cos().abs() < COS_DC_MIN {
            warnings.push(format!(
                "coupler {}: cos φ_DC ≈ 0, SQUID energy diverges",
                k + 1
            ));
        }
    }
    let standard = [std::f64::consts::PI, 2.0 * std::f64::consts::PI];
    for (k, d) in circuit.drive.iter().enumerate() {
        let off = d.phases.iter().zip(standard).any(|(p, s)| {
            ((p - s).rem_euclid(2.0 * std::f64::consts::PI))
                .min((s - p).rem_euclid(2.0 * std::f64::consts::PI))
                > 1e-9
        });
        if off {
            warnings.push(format!(
                "coupler {}: drive phases differ from (π, 2π); the interaction is not of pure σ_x(a + a†) form",
                k + 1
            ));
        }
    }
    RegimeReport {
        charge_ratios,
        ac_ratios,
        warnings,
        notes: vec![
            "two-level truncation of each charge qubit assumed; sin²φ term absorbed into a frequency shift".into(),
            "interaction picture with rotating-wave approximation assumed".into(),
        ],
    }
}

/// Closed-form couplings of the driven circuit.
pub fn effective_couplings(circuit: &CircuitParams) -> Result<EffectiveRabiParams> {
    circuit.check_positive()?;
    for (k, phi) in circuit.phi_dc.iter().enumerate() {
        if phi.cos().abs() < COS_DC_MIN {
            return Err(Error::RegimeViolation(format!(
                "coupler {}: |cos φ_DC| = {:.3e} below {COS_DC_MIN}",
                k + 1,
                phi.cos().abs()
            )));
        }
        let a = circuit.drive[k].amplitude.abs();
        if *phi != 0.0 && a >= phi.abs() {
            return Err(Error::RegimeViolation(format!(
                "coupler {}: AC amplitude {a} is not small against φ_DC = {phi}",
                k + 1
            )));
        }
    }
    let hbar = PLANCK / (2.0 * std::f64::consts::PI);
    let (cj, cr) = dressed_capacitances(circuit);
    let cc = circuit.c_coupler * FEMTO;
    let lr = circuit.l_resonator.map(|x| x * NANO);
    let to_joule = |ghz: f64| ghz * GIGA * PLANCK;
    let e_bar: [f64; 4] = circuit.phi_dc.map(|phi| to_joule(circuit.e_js) * phi.cos());
    let pi = std::f64::consts::PI;

    let mut gamma_r = [0.0; 2];
    for (k, &(_, r)) in COUPLER_MAP.iter().enumerate() {
        gamma_r[r] += 1.0 / e_bar[k];
    }
    for r in 0..2 {
        gamma_r[r] *= cc * cc * FLUX_QUANTUM * FLUX_QUANTUM
            / (16.0 * pi * pi * cr[r] * cr[r] * lr[r] * lr[r]);
    }
    let l_bar = [0, 1].map(|r| 1.0 / (1.0 / lr[r] + 2.0 * gamma_r[r]));
    if l_bar.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::RegimeViolation(
            "dressed resonator inductance is not positive".into(),
        ));
    }
    let omega_r = [0, 1].map(|r| 1.0 / (cr[r] * l_bar[r]).sqrt());

    let mut g0 = [0.0; 4];
    let mut g1 = [0.0; 4];
    let mut rabi = [0.0; 4];
    for (k, &(q, r)) in COUPLER_MAP.iter().enumerate() {
        let zpf = (hbar * omega_r[r] * l_bar[r] / 2.0).sqrt();
        let g0_joule = FLUX_QUANTUM * cc * cc * to_joule(circuit.e_j[q]) * zpf
            / (8.0 * pi * cr[r] * cj[q] * lr[r] * e_bar[k]);
        g0[k] = g0_joule / PLANCK / GIGA;
        g1[k] = g0[k] * circuit.phi_dc[k].tan();
        rabi[k] = circuit.drive[k].amplitude * g1[k] / 2.0;
    }
    Ok(EffectiveRabiParams {
        qubit_frequencies: circuit.e_j,
        resonator_frequencies: omega_r.map(|w| w / (2.0 * pi) / GIGA),
        g0,
        g1,
        rabi_couplings: rabi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CircuitParams {
        CircuitParams::symmetric(
            1.0,
            2.0,
            400.0,
            2.0,
            3.0,
            300.0,
            0.6,
            CouplerDrive::standard(0.03, [3.0, 6.0]),
        )
    }

    #[test]
    fn zero_dc_flux_kills_tunable_coupling() {
        let mut c = sample();
        c.phi_dc = [0.0; 4];
        let e = effective_couplings(&c).unwrap();
        assert!(e.g1.iter().all(|g| *g == 0.0));
        assert!(e.g0.iter().all(|g| *g > 0.0));
    }

    #[test]
    fn quarter_flux_is_rejected() {
        let mut c = sample();
        c.phi_dc[2] = std::f64::consts::FRAC_PI_2;
        assert!(matches!(
            effective_couplings(&c),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn symmetric_circuit_gives_equal_couplings() {
        let e = effective_couplings(&sample()).unwrap();
        for k in 1..4 {
            assert!(
                (e.rabi_couplings[k] - e.rabi_couplings[0]).abs()
                    <= 1e-15 * e.rabi_couplings[0].abs()
            );
        }
        assert!(e.rabi_couplings[0] > 0.0);
    }

    #[test]
    fn vanishing_coupler_restores_bare_resonator() {
        let mut c = sample();
        c.c_coupler = 1e-9;
        let e = effective_couplings(&c).unwrap();
        let bare = 1.0 / (2.0 * std::f64::consts::PI * (400.0 * FEMTO * 2.0 * NANO).sqrt()) / GIGA;
        assert!((e.resonator_frequencies[0] - bare).abs() < 1e-9 * bare);
        assert!(e.rabi_couplings.iter().all(|g| g.abs() < 1e-20));
    }

    #[test]
    fn regime_flags() {
        let mut c = sample();
        let clean = validate_regime(&c);
        assert!(clean.is_clean(), "{:?}", clean.warnings);
        c.drive[1].amplitude = 0.3;
        let r = validate_regime(&c);
        assert!((r.ac_ratios[1] - 0.5).abs() < 1e-12);
        assert!(r.warnings.iter().any(|w| w.starts_with("coupler 2")));
        c.e_j = [300.0, 300.0];
        assert!(validate_regime(&c)
            .warnings
            .iter()
            .any(|w| w.contains("E_J/E_C")));
    }
}
