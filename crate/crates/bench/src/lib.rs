// SPDX-License-Identifier: Apache-2.0

//! Shared workloads for the criterion benches.

use twophoton_core::{AtomPreparation, ModelParams, Simulation};

/// `(alpha, nbar)` pairs spanning the weak- and strong-field regimes.
pub const REGIMES: [(f64, f64); 3] = [(0.1, 0.01), (0.1, 0.2), (0.1, 10.0)];

/// Coherent preparation `(|+>+|->)(|+>-|->)/2`.
pub fn coherent_prep() -> AtomPreparation {
    let q = std::f64::consts::FRAC_PI_4;
    AtomPreparation { theta1: q, phi1: 0.0, theta2: q, phi2: std::f64::consts::PI }
}

pub fn simulation(alpha: f64, nbar: f64) -> Simulation {
    let params = ModelParams::new(alpha, nbar, nbar).expect("valid bench parameters");
    Simulation::new(params, coherent_prep()).expect("valid bench simulation")
}
