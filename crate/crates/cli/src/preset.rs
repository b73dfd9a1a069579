// SPDX-License-Identifier: Apache-2.0

//! Named parameter sets.

use clap::ValueEnum;
use serde::Serialize;

/// Physics of one curve. Angles are in units of pi.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Physics {
    pub alpha: f64,
    pub nbar1: f64,
    pub nbar2: f64,
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
}

impl Physics {
    const fn new(alpha: f64, nbar: f64, (theta1, phi1, theta2, phi2): (f64, f64, f64, f64)) -> Self {
        Self { alpha, nbar1: nbar, nbar2: nbar, theta1, phi1, theta2, phi2 }
    }
}

/// `|+>|->`
const UP_DOWN: (f64, f64, f64, f64) = (0.0, 0.0, 0.5, 0.0);
/// `(|+> + |->)(|+> - |->)/2`
const PLUS_MINUS: (f64, f64, f64, f64) = (0.25, 0.0, 0.25, 1.0);
/// `(|+> + e^{i dphi}|->)(|+> + |->)/2`
const fn dphi(d: f64) -> (f64, f64, f64, f64) {
    (0.25, d, 0.25, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig1a,
    Fig1bSolid,
    Fig1bDashed,
    Fig2a,
    Fig2bSolid,
    Fig2bDashed,
    Fig3a,
    Fig3aDashed,
    Fig3b,
    Fig3bDashed,
    Fig4a,
    Fig4aDashed,
    Fig4b,
    Fig4bDashed,
}

impl Preset {
    pub const ALL: [Preset; 14] = [
        Preset::Fig1a,
        Preset::Fig1bSolid,
        Preset::Fig1bDashed,
        Preset::Fig2a,
        Preset::Fig2bSolid,
        Preset::Fig2bDashed,
        Preset::Fig3a,
        Preset::Fig3aDashed,
        Preset::Fig3b,
        Preset::Fig3bDashed,
        Preset::Fig4a,
        Preset::Fig4aDashed,
        Preset::Fig4b,
        Preset::Fig4bDashed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1bSolid => "fig1b_solid",
            Preset::Fig1bDashed => "fig1b_dashed",
            Preset::Fig2a => "fig2a",
            Preset::Fig2bSolid => "fig2b_solid",
            Preset::Fig2bDashed => "fig2b_dashed",
            Preset::Fig3a => "fig3a",
            Preset::Fig3aDashed => "fig3a_dashed",
            Preset::Fig3b => "fig3b",
            Preset::Fig3bDashed => "fig3b_dashed",
            Preset::Fig4a => "fig4a",
            Preset::Fig4aDashed => "fig4a_dashed",
            Preset::Fig4b => "fig4b",
            Preset::Fig4bDashed => "fig4b_dashed",
        }
    }

    pub fn physics(self) -> Physics {
        match self {
            Preset::Fig1a => Physics::new(0.1, 0.01, UP_DOWN),
            Preset::Fig1bSolid => Physics::new(0.1, 0.01, PLUS_MINUS),
            Preset::Fig1bDashed => Physics::new(0.1, 0.01, dphi(0.0)),
            Preset::Fig2a => Physics::new(0.1, 0.2, dphi(0.0)),
            Preset::Fig2bSolid => Physics::new(0.1, 0.2, dphi(1.0)),
            Preset::Fig2bDashed => Physics::new(0.1, 0.2, dphi(1.0 / 6.0)),
            Preset::Fig3a => Physics::new(0.1, 10.0, PLUS_MINUS),
            Preset::Fig3aDashed => Physics::new(0.1, 10.0, UP_DOWN),
            Preset::Fig3b => Physics::new(0.1, 40.0, PLUS_MINUS),
            Preset::Fig3bDashed => Physics::new(0.1, 40.0, UP_DOWN),
            Preset::Fig4a => Physics::new(0.3, 20.0, PLUS_MINUS),
            Preset::Fig4aDashed => Physics::new(0.3, 20.0, UP_DOWN),
            Preset::Fig4b => Physics::new(1.0, 20.0, PLUS_MINUS),
            Preset::Fig4bDashed => Physics::new(1.0, 20.0, UP_DOWN),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_str(p.name(), false).unwrap(), p);
            assert_eq!(p.to_possible_value().unwrap().get_name(), p.name());
        }
        assert_eq!(Preset::Fig1bSolid.name(), "fig1b_solid");
    }

    #[test]
    fn caption_values() {
        let f = Preset::Fig1a.physics();
        assert_eq!((f.alpha, f.nbar1, f.nbar2), (0.1, 0.01, 0.01));
        assert_eq!((f.theta1, f.theta2), (0.0, 0.5));
        let f = Preset::Fig3b.physics();
        assert_eq!((f.alpha, f.nbar1, f.nbar2), (0.1, 40.0, 40.0));
        assert_eq!((f.theta1, f.phi1, f.theta2, f.phi2), (0.25, 0.0, 0.25, 1.0));
        assert_eq!(Preset::Fig4a.physics().alpha, 0.3);
        assert_eq!(Preset::Fig4b.physics().nbar2, 20.0);
        let solid = Preset::Fig2bSolid.physics();
        assert_eq!(solid.phi1 - solid.phi2, 1.0);
        let dashed = Preset::Fig2bDashed.physics();
        assert_eq!(dashed.phi1 - dashed.phi2, 1.0 / 6.0);
    }
}
