// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-dependent protocols: schedules, closed and open evolution.

pub mod catch_release;
pub mod closed;
pub mod gap_monitor;
pub mod integrator;
pub mod lindblad;
pub mod markovian;
pub mod protocol;
pub mod schedule;

pub use catch_release::{
    catch_and_release, release_schedule, CatchRelease, EmissionReport, ReleaseConfig,
};
pub use closed::{
    basis_vector, evolve_schrodinger, fidelity, initial_up_up, photon_w_projector, trace_distance,
    w_bell_state, EvolveOptions, QuantumState, Trajectory,
};
pub use gap_monitor::{gap_monitor, GapSample, Tracking, GAP_WINDOW};
pub use integrator::{integrate, integrate_piecewise, IntegrationStats, IntegratorOptions};
pub use lindblad::{evolve_lindblad, min_eigenvalue, NoiseModel, POSITIVITY_TOL};
pub use markovian::{eigenbasis_populations, evolve_eigenbasis_markovian};
pub use protocol::{
    generation_fidelity, minimum_duration, run_generation, DurationSearch, GenerationSetup,
};
pub use schedule::{
    make_w_generation_schedule, ModeWeights, PiecewiseLinear, ProtocolSchedule, ScheduleConstraint,
};
