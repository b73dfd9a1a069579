// SPDX-License-Identifier: Apache-2.0

//! Physical parameters, the two-mode thermal field and the product atomic
//! preparation.
//!
//! Time is measured in units of `1/g`; the only remaining couplings are the
//! dipole ratio `alpha = Omega / g` and the two mean thermal photon numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smallmat::{Complex, Mat4C};

pub const DEFAULT_CUTOFF_TAIL: f64 = 1e-8;
pub const DEFAULT_CUTOFF_CAP: u32 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Dipole-dipole strength relative to the atom-field coupling.
    pub alpha: f64,
    pub nbar1: f64,
    pub nbar2: f64,
    /// Largest thermal weight allowed outside the Fock cutoff, per mode.
    pub cutoff_tail: f64,
    /// Hard bound on the per-mode Fock cutoff.
    pub cutoff_cap: u32,
}

impl ModelParams {
    pub fn new(alpha: f64, nbar1: f64, nbar2: f64) -> Result<Self> {
        let p = Self {
            alpha,
            nbar1,
            nbar2,
            cutoff_tail: DEFAULT_CUTOFF_TAIL,
            cutoff_cap: DEFAULT_CUTOFF_CAP,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_cutoff(mut self, tail: f64, cap: u32) -> Result<Self> {
        self.cutoff_tail = tail;
        self.cutoff_cap = cap;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: String) -> Result<()> {
            Err(Error::InvalidParameter { field, reason })
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad("alpha", format!("must be finite and >= 0, got {}", self.alpha));
        }
        for (field, v) in [("nbar1", self.nbar1), ("nbar2", self.nbar2)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(field, format!("must be finite and >= 0, got {v}"));
            }
        }
        if !(self.cutoff_tail > 0.0 && self.cutoff_tail <= 1e-2) {
            return bad("cutoff_tail", format!("must lie in (0, 1e-2], got {}", self.cutoff_tail));
        }
        if self.cutoff_cap < 1 {
            return bad("cutoff_cap", "must be >= 1".into());
        }
        Ok(())
    }
}

/// Product preparation `(cos t1 |+> + e^{i p1} sin t1 |->) (x) (same for atom 2)`.
/// Angles in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomPreparation {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
}

impl AtomPreparation {
    pub fn new(theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Result<Self> {
        let p = Self { theta1, phi1, theta2, phi2 };
        for (field, v) in [("theta1", theta1), ("phi1", phi1), ("theta2", theta2), ("phi2", phi2)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { field, reason: format!("must be finite, got {v}") });
            }
        }
        Ok(p)
    }

    /// Both atoms in definite levels: `true` = excited.
    pub fn basis(atom1_excited: bool, atom2_excited: bool) -> Self {
        let t = |e: bool| if e { 0.0 } else { std::f64::consts::FRAC_PI_2 };
        Self { theta1: t(atom1_excited), phi1: 0.0, theta2: t(atom2_excited), phi2: 0.0 }
    }

    /// Same preparation with the two atoms exchanged.
    pub fn swapped(&self) -> Self {
        Self { theta1: self.theta2, phi1: self.phi2, theta2: self.theta1, phi2: self.phi1 }
    }

    /// Amplitude moduli and phase angles on `{|++>, |+->, |-+>, |-->}`.
    fn polar_amplitudes(&self) -> ([f64; 4], [f64; 4]) {
        let (s1, c1) = quarter_exact_sin_cos(self.theta1);
        let (s2, c2) = quarter_exact_sin_cos(self.theta2);
        (
            [c1 * c2, c1 * s2, s1 * c2, s1 * s2],
            [0.0, self.phi2, self.phi1, self.phi1 + self.phi2],
        )
    }

    /// Amplitudes on `{|++>, |+->, |-+>, |-->}`.
    pub fn amplitudes(&self) -> [Complex; 4] {
        let (m, a) = self.polar_amplitudes();
        std::array::from_fn(|i| unit_phase(a[i]) * m[i])
    }

    /// Amplitudes up to a global phase, chosen so the first nonzero one is
    /// real and positive.
    pub fn canonical_amplitudes(&self) -> [Complex; 4] {
        let (m, a) = self.polar_amplitudes();
        let lead = m.iter().position(|&x| x != 0.0).map_or(0.0, |i| a[i]);
        std::array::from_fn(|i| unit_phase(a[i] - lead) * m[i])
    }
}

/// `sin_cos` that returns exact 0/±1 at integer multiples of pi/2, so basis
/// preparations carry no stray coherences.
fn quarter_exact_sin_cos(x: f64) -> (f64, f64) {
    let quarters = x / std::f64::consts::FRAC_PI_2;
    let k = quarters.round();
    if (quarters - k).abs() <= 8.0 * f64::EPSILON * quarters.abs().max(1.0) {
        match (k as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        x.sin_cos()
    }
}

fn unit_phase(phi: f64) -> Complex {
    let (s, c) = quarter_exact_sin_cos(phi);
    Complex::new(c, s)
}

/// `nbar^n / (1 + nbar)^(n+1)`, evaluated in log space.
pub fn thermal_weight(nbar: f64, n: u32) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let log_ratio = log_thermal_ratio(nbar);
    (f64::from(n) * log_ratio - nbar.ln_1p()).exp()
}

/// `ln(nbar / (1 + nbar))` without the cancellation of `ln nbar - ln(1 + nbar)`.
fn log_thermal_ratio(nbar: f64) -> f64 {
    -(1.0 / nbar).ln_1p()
}

/// Thermal weight mass beyond Fock index `cutoff`: `(nbar/(1+nbar))^(cutoff+1)`.
pub fn thermal_tail(nbar: f64, cutoff: u32) -> f64 {
    if nbar == 0.0 {
        return 0.0;
    }
    let log_ratio = log_thermal_ratio(nbar);
    ((f64::from(cutoff) + 1.0) * log_ratio).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalWeights {
    pub nbar: f64,
    /// Largest retained Fock index.
    pub cutoff: u32,
    pub weights: Vec<f64>,
    /// `1 - sum(weights)`, from the closed form.
    pub tail: f64,
    /// Set when `cutoff_cap` stopped the cutoff before the tail target was met.
    pub truncation_warning: bool,
}

impl ThermalWeights {
    /// Weights for an explicit cutoff, ignoring any tail target.
    pub fn with_cutoff(nbar: f64, cutoff: u32) -> Self {
        let weights = (0..=cutoff).map(|n| thermal_weight(nbar, n)).collect();
        Self { nbar, cutoff, weights, tail: thermal_tail(nbar, cutoff), truncation_warning: false }
    }

    pub fn retained(&self) -> f64 {
        1.0 - self.tail
    }
}

/// Smallest cutoff whose tail is below `cutoff_tail`, clamped to `cutoff_cap`.
pub fn build_thermal_weights(nbar: f64, cutoff_tail: f64, cutoff_cap: u32) -> ThermalWeights {
    if nbar == 0.0 {
        return ThermalWeights::with_cutoff(0.0, 0);
    }
    let estimate = (cutoff_tail.ln() / log_thermal_ratio(nbar)).ceil() - 1.0;
    let mut n = if estimate.is_finite() && estimate > 0.0 {
        estimate.min(f64::from(u32::MAX - 1)) as u32
    } else {
        0
    };
    // the log estimate can be off by one either way
    while n > 0 && thermal_tail(nbar, n - 1) <= cutoff_tail {
        n -= 1;
    }
    while thermal_tail(nbar, n) > cutoff_tail && n < u32::MAX - 1 {
        n += 1;
    }
    if n > cutoff_cap {
        let mut w = ThermalWeights::with_cutoff(nbar, cutoff_cap);
        w.truncation_warning = true;
        return w;
    }
    ThermalWeights::with_cutoff(nbar, n)
}

/// Bose-Einstein occupancy `1 / (e^x - 1)` for `x = hbar omega / (k_B T)`.
pub fn thermal_occupation(freq_over_temp: f64) -> Result<f64> {
    if !(freq_over_temp > 0.0) || !freq_over_temp.is_finite() {
        return Err(Error::NonPositiveRatio(freq_over_temp));
    }
    Ok(1.0 / freq_over_temp.exp_m1())
}

/// Initial two-atom density matrix, the projector onto the product state.
pub fn initial_atomic_density(prep: &AtomPreparation) -> Mat4C {
    // moduli and phases kept apart so the diagonal carries no phase rounding
    let (moduli, phases) = prep.polar_amplitudes();
    let mut rho = Mat4C::zeros(4);
    for i in 0..4 {
        rho[(i, i)] = Complex::new(moduli[i] * moduli[i], 0.0);
        for j in (i + 1)..4 {
            let z = unit_phase(phases[i] - phases[j]) * (moduli[i] * moduli[j]);
            rho[(i, j)] = z;
            rho[(j, i)] = z.conj();
        }
    }
    rho
}
