// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Sparse Hamiltonians against a dense Kronecker-product construction
//! restricted to the total-photon-truncated basis.

mod common;

use common::check;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn cases() -> impl Strategy<Value = (usize, usize, usize, Vec<f64>)> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(m, n)| {
            // Keep the untruncated product space small enough for dense Kronecker products.
            let cap = (1..=8usize)
                .take_while(|c| (c + 1).pow(m as u32) << n <= 1024)
                .last()
                .unwrap_or(1);
            (Just(m), Just(n), 0..=cap)
        })
        .prop_flat_map(|(m, n, c)| {
            (
                Just(m),
                Just(n),
                Just(c),
                prop::collection::vec(0.0f64..1.0, 12),
            )
        })
}

proptest! {
    #![proptest_config(Config { cases: 48, rng_seed: RngSeed::Fixed(0x5eed_0001), ..Config::default() })]

    #[test]
    fn sparse_matches_kronecker((m, n, n_max, vals) in cases()) {
        let dev = check(m, n, n_max, &vals);
        prop_assert!(dev < 1e-12, "M={m} N={n} n_max={n_max}: deviation {dev:e}");
    }
}

#[test]
fn largest_space_matches_kronecker() {
    // 78 photon configurations × 16 spin states = 1248 states.
    let dev = check(2, 4, 11, &[0.31, 0.77, 0.12, 0.58, 0.93, 0.44, 0.05, 0.69]);
    assert!(dev < 1e-12, "{dev:e}");
}
