// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Structural invariants under randomized parameters (fixed proptest seed).

use std::sync::Arc;

use mmrabi::dynamics::{
    evolve_lindblad, evolve_schrodinger, initial_up_up, EvolveOptions, NoiseModel, PiecewiseLinear,
    ProtocolSchedule,
};
use mmrabi::hilbert::{binomial, enumerate_basis, HilbertSpace, ModelDims, Parity};
use mmrabi::operators::{
    build_excitation_operator, build_hamiltonian, build_jc_hamiltonian, build_parity_operator,
    CouplingKind, HamiltonianTerms, RabiParams, C64,
};
use mmrabi::spectra::{linspace, sweep_coupling};
use nalgebra::DVector;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        ..Config::default()
    }
}

fn space(m: usize, n: usize, c: usize, sector: Option<Parity>) -> Arc<HilbertSpace> {
    Arc::new(enumerate_basis(ModelDims::new(m, n, c).unwrap(), sector))
}

fn model() -> impl Strategy<Value = (usize, usize, usize, RabiParams)> {
    (1usize..=3, 1usize..=3, 0usize..=4).prop_flat_map(|(m, n, c)| {
        (
            Just(m),
            Just(n),
            Just(c),
            prop::collection::vec(0.2f64..2.0, m),
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), m),
        )
            .prop_map(|(m, n, c, omega, delta, g)| {
                (m, n, c, RabiParams::new(omega, delta, g).unwrap())
            })
    })
}

/// Random linear ramps between two parameter sets.
fn ramped(a: &RabiParams, b: &RabiParams, duration: f64) -> ProtocolSchedule {
    let mut s = ProtocolSchedule::frozen(a, duration).unwrap();
    for (j, d) in s.delta.iter_mut().enumerate() {
        *d = PiecewiseLinear::ramp(0.0, duration, a.delta[j], b.delta[j]);
    }
    for (i, row) in s.g.iter_mut().enumerate() {
        for (j, g) in row.iter_mut().enumerate() {
            *g = PiecewiseLinear::ramp(0.0, duration, a.g[i][j], b.g[i][j]);
        }
    }
    s
}

proptest! {
    #![proptest_config(config(64, 0x1a7e_0010))]

    #[test]
    fn basis_dimensions_and_lookup((m, n, c, _p) in model()) {
        let full = space(m, n, c, None);
        let expected: usize = (0..=c).map(|k| binomial(m + k - 1, k)).sum::<usize>() << n;
        prop_assert_eq!(full.dim(), expected);
        let even = space(m, n, c, Some(Parity::Even));
        let odd = space(m, n, c, Some(Parity::Odd));
        prop_assert_eq!(even.dim() + odd.dim(), full.dim());
        for (k, s) in full.states().iter().enumerate() {
            prop_assert_eq!(full.index_of(s), Some(k));
            prop_assert!(s.total_photons() <= c);
        }
        for w in full.states().windows(2) {
            prop_assert!(w[0].total_photons() <= w[1].total_photons());
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_parity_symmetric((m, n, c, p) in model()) {
        let full = space(m, n, c, None);
        let h = build_hamiltonian(&p, &full).unwrap();
        prop_assert!(h.hermiticity_error() < 1e-14);
        prop_assert!(h.commutator_max_norm(&build_parity_operator(&full)).unwrap() < 1e-12);
        let jc = build_jc_hamiltonian(&p, &full).unwrap();
        prop_assert!(jc.hermiticity_error() < 1e-14);
        prop_assert!(jc.commutator_max_norm(&build_excitation_operator(&full)).unwrap() < 1e-12);
    }

    #[test]
    fn sector_blocks_reassemble_the_full_spectrum((m, n, c, p) in model()) {
        let full = space(m, n, c, None);
        let mut all = mmrabi::linalg::dense_hermitian_eigen(&build_hamiltonian(&p, &full).unwrap().to_dense()).values;
        let mut parts = Vec::new();
        for parity in [Parity::Even, Parity::Odd] {
            let s = space(m, n, c, Some(parity));
            parts.extend(mmrabi::linalg::dense_hermitian_eigen(&build_hamiltonian(&p, &s).unwrap().to_dense()).values);
        }
        all.sort_by(f64::total_cmp);
        parts.sort_by(f64::total_cmp);
        for (a, b) in all.iter().zip(&parts) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(config(12, 0x1a7e_0020))]

    #[test]
    fn schrodinger_preserves_norm(
        m in 1usize..=2,
        omega in 0.5f64..1.5,
        d in prop::collection::vec(0.1f64..0.9, 4),
        g in prop::collection::vec(0.0f64..0.4, 8),
    ) {
        let n = 2;
        let a = RabiParams::new(vec![omega; m], d[..2].to_vec(), (0..m).map(|i| g[2 * i..2 * i + 2].to_vec()).collect()).unwrap();
        let b = RabiParams::new(vec![omega; m], d[2..].to_vec(), (0..m).map(|i| g[4 + 2 * i..6 + 2 * i].to_vec()).collect()).unwrap();
        let sp = space(m, n, 3, Some(Parity::Even));
        let terms = HamiltonianTerms::new(CouplingKind::Rabi, &sp).unwrap();
        let psi0 = initial_up_up(&sp).unwrap();
        let tr = evolve_schrodinger(&terms, &ramped(&a, &b, 15.0), &psi0, &EvolveOptions::new(1e-10, 11)).unwrap();
        for x in tr.series("norm").unwrap() {
            prop_assert!((x - 1.0).abs() < 1e-8, "norm {x}");
        }
    }

    #[test]
    fn lindblad_preserves_trace_positivity_and_ledger(
        d in prop::collection::vec(0.1f64..0.9, 2),
        g in prop::collection::vec(0.0f64..0.3, 2),
        rates in prop::collection::vec(0.0f64..0.05, 4),
    ) {
        let p = RabiParams::new(vec![1.0], d.clone(), vec![g.clone()]).unwrap();
        let sp = space(1, 2, 3, None);
        let terms = HamiltonianTerms::new(CouplingKind::Rabi, &sp).unwrap();
        let mut sched = ProtocolSchedule::frozen(&p, 20.0).unwrap();
        sched.kappa_c[0] = PiecewiseLinear::constant(rates[3]);
        let noise = NoiseModel {
            kappa_in: vec![rates[0]],
            gamma: vec![rates[1], rates[1] / 2.0],
            gamma_phi: vec![rates[2], rates[2] / 3.0],
        };
        let psi0 = initial_up_up(&sp).unwrap();
        let rho0 = &psi0 * psi0.adjoint();
        let tr = evolve_lindblad(&terms, &sched, &noise, &rho0, &EvolveOptions::new(1e-10, 11), true).unwrap();
        for x in tr.series("trace").unwrap() {
            prop_assert!((x - 1.0).abs() < 1e-9, "trace {x}");
        }
        for x in tr.series("ledger").unwrap() {
            prop_assert!(x.abs() < 1e-9, "ledger {x}");
        }
        for x in tr.series("min_eigenvalue").unwrap() {
            prop_assert!(*x > -1e-8, "min eigenvalue {x}");
        }
    }
}

#[test]
fn sweeps_and_runs_are_deterministic() {
    let p = RabiParams::with_pattern(1.0, vec![0.9, 0.1], &[vec![1.0, 1.0], vec![1.0, 1.0]], 0.0)
        .unwrap();
    let grid = linspace(0.0, 1.0, 9);
    let a = sweep_coupling(
        &p,
        &[vec![1.0, 1.0], vec![1.0, 0.5]],
        &grid,
        3,
        &[Parity::Even, Parity::Odd],
        6,
    )
    .unwrap();
    let b = sweep_coupling(
        &p,
        &[vec![1.0, 1.0], vec![1.0, 0.5]],
        &grid,
        3,
        &[Parity::Even, Parity::Odd],
        6,
    )
    .unwrap();
    assert_eq!(a.to_csv(), b.to_csv());

    let sp = space(2, 2, 3, Some(Parity::Even));
    let terms = HamiltonianTerms::new(CouplingKind::Rabi, &sp).unwrap();
    let s = mmrabi::dynamics::make_w_generation_schedule(
        2,
        20.0,
        0.25,
        0.8,
        &mmrabi::dynamics::ModeWeights::Uniform,
    )
    .unwrap();
    let psi0: DVector<C64> = initial_up_up(&sp).unwrap();
    let opts = EvolveOptions::new(1e-9, 5);
    let x = evolve_schrodinger(&terms, &s, &psi0, &opts).unwrap();
    let y = evolve_schrodinger(&terms, &s, &psi0, &opts).unwrap();
    assert_eq!(x.observables, y.observables);
    assert_eq!(x.final_state.density(), y.final_state.density());
}
