//! Built-in figure schedules.

use std::f64::consts::{E, FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use openphase::holonomy::ThetaGrid;
use openphase::stirap::PulseParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Number of abscissa points per curve.
pub const CURVE_POINTS: usize = 20;

/// Collisional rate added to equal-emission points so the two emission channels
/// are not exactly interchangeable.
pub const SYMMETRY_BREAKING: f64 = 1e-6;

/// Abscissa `x_i = 0.1 + 0.095·i`, `i = 1..=20`, covering (0.1, 2.0].
pub fn abscissa() -> [f64; CURVE_POINTS] {
    std::array::from_fn(|i| 0.1 + 0.095 * (i + 1) as f64)
}

/// One rate setting of a schedule, in units of 1/τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePoint {
    /// Curve name; points of one curve share it.
    #[serde(default)]
    pub curve: String,
    /// Plot abscissa.
    pub x: f64,
    #[serde(default)]
    pub gamma13: f64,
    #[serde(default)]
    pub gamma23: f64,
    #[serde(default)]
    pub gamma12: f64,
    #[serde(default)]
    pub gamma21: f64,
}

/// What a figure computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// Phases of selected labels along a rate schedule.
    Phases,
    /// ln of the adiabaticity left-hand side over the time window.
    Adiabaticity,
    /// β₁ on the full window minus β₁ on the adiabatic window.
    Restricted,
}

/// Curve name and its rates `[γ13, γ23, γ12, γ21]` as a function of the abscissa.
type CurveSpec<'a> = (&'a str, &'a dyn Fn(f64) -> [f64; 4]);

/// Built-in figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Emission,
    Reversed,
    Collision,
    PairTwoG13,
    PairHalfG13,
    PairCollisionTwo,
    PairCollisionHalf,
    Combined,
    Adiabaticity,
    Restricted,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::Emission,
        FigureId::Reversed,
        FigureId::Collision,
        FigureId::PairTwoG13,
        FigureId::PairHalfG13,
        FigureId::PairCollisionTwo,
        FigureId::PairCollisionHalf,
        FigureId::Combined,
        FigureId::Adiabaticity,
        FigureId::Restricted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Emission => "emission",
            FigureId::Reversed => "reversed",
            FigureId::Collision => "collision",
            FigureId::PairTwoG13 => "pair-2g13",
            FigureId::PairHalfG13 => "pair-g13/2",
            FigureId::PairCollisionTwo => "pair-coll-2",
            FigureId::PairCollisionHalf => "pair-coll-1/2",
            FigureId::Combined => "combined",
            FigureId::Adiabaticity => "adiabaticity",
            FigureId::Restricted => "restricted",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|id| id.name()).collect()
    }

    /// File stem for outputs (`/` is not allowed in file names).
    pub fn file_stem(self) -> String {
        self.name().replace('/', "_")
    }

    pub fn kind(self) -> FigureKind {
        match self {
            FigureId::Adiabaticity => FigureKind::Adiabaticity,
            FigureId::Restricted => FigureKind::Restricted,
            _ => FigureKind::Phases,
        }
    }

    /// Pulse parameters: g01τ = g02τ = 15, τ = 1, t0 = 4τ/3 (−4τ/3 when reversed).
    pub fn pulse(self) -> PulseParams {
        let p = PulseParams::reference();
        if self == FigureId::Reversed {
            p.reversed()
        } else {
            p
        }
    }

    pub fn labels(self) -> Vec<u8> {
        match self {
            FigureId::PairTwoG13 | FigureId::PairHalfG13 | FigureId::PairCollisionTwo | FigureId::PairCollisionHalf => {
                vec![2, 3, 7, 8]
            }
            FigureId::Restricted => vec![1],
            _ => vec![1, 9],
        }
    }

    /// Time window of the phase integration.
    pub fn window(self) -> (f64, f64) {
        match self {
            FigureId::PairTwoG13 | FigureId::PairHalfG13 | FigureId::PairCollisionTwo | FigureId::PairCollisionHalf => {
                ThetaGrid::ADIABATIC_WINDOW
            }
            _ => ThetaGrid::DEFAULT_WINDOW,
        }
    }

    /// Axis label of the abscissa.
    pub fn x_label(self) -> &'static str {
        match self {
            FigureId::Collision | FigureId::PairCollisionTwo | FigureId::PairCollisionHalf => "gamma12 tau",
            FigureId::Adiabaticity => "t / tau",
            _ => "gamma23 tau",
        }
    }

    /// Sign applied to Re β of `label` in the plot script (−Re β₉ in the
    /// emission and collision figures).
    pub fn plot_sign(self, label: u8) -> f64 {
        match (self, label) {
            (FigureId::Emission | FigureId::Reversed | FigureId::Collision, 9) => -1.0,
            _ => 1.0,
        }
    }

    /// Rate schedule, curve by curve; empty for the adiabaticity figure.
    pub fn schedule(self) -> Vec<RatePoint> {
        let xs = abscissa();
        let curves = |specs: &[CurveSpec]| -> Vec<RatePoint> {
            specs
                .iter()
                .flat_map(|&(curve, rates)| {
                    xs.iter().map(move |&x| {
                        let [gamma13, gamma23, gamma12, gamma21] = rates(x);
                        RatePoint { curve: curve.to_string(), x, gamma13, gamma23, gamma12, gamma21 }
                    })
                })
                .collect()
        };
        match self {
            FigureId::Emission | FigureId::Reversed | FigureId::Restricted => curves(&[
                ("g23=g13", &|x| [x, x, SYMMETRY_BREAKING, 0.0]),
                ("g23=2g13", &|x| [x / 2.0, x, 0.0, 0.0]),
                ("g23=g13/2", &|x| [2.0 * x, x, 0.0, 0.0]),
            ]),
            FigureId::Collision => curves(&[
                ("g12=g21", &|x| [0.0, 0.0, x, x]),
                ("g12=2g21", &|x| [0.0, 0.0, x, x / 2.0]),
                ("g12=g21/2", &|x| [0.0, 0.0, x, 2.0 * x]),
            ]),
            FigureId::PairTwoG13 => curves(&[("g23=2g13", &|x| [x / 2.0, x, 0.0, 0.0])]),
            FigureId::PairHalfG13 => curves(&[("g23=g13/2", &|x| [2.0 * x, x, 0.0, 0.0])]),
            FigureId::PairCollisionTwo => curves(&[("g12=2g21", &|x| [0.0, 0.0, x, x / 2.0])]),
            FigureId::PairCollisionHalf => curves(&[("g12=g21/2", &|x| [0.0, 0.0, x, 2.0 * x])]),
            FigureId::Combined => curves(&[
                ("g12=sqrt2*g21", &|x| [x / E, x, SQRT_2 * x / E, x / E]),
                ("g12=g21/sqrt2", &|x| [x / E, x, FRAC_1_SQRT_2 * x / E, x / E]),
                ("g12=(pi/2)*g21", &|x| [x / E, x, FRAC_PI_2 * x / E, x / E]),
            ]),
            FigureId::Adiabaticity => Vec::new(),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| CliError::UnknownFigure(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abscissa_spans_the_open_interval() {
        let xs = abscissa();
        assert!((xs[0] - 0.195).abs() < 1e-15);
        assert!((xs[CURVE_POINTS - 1] - 2.0).abs() < 1e-12);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn names_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!(matches!("fig9".parse::<FigureId>(), Err(CliError::UnknownFigure(_))));
    }

    #[test]
    fn emission_schedule_ratios() {
        let points = FigureId::Emission.schedule();
        assert_eq!(points.len(), 3 * CURVE_POINTS);
        for p in &points {
            assert_eq!(p.x, p.gamma23);
            let ratio = p.gamma23 / p.gamma13;
            let expected = match p.curve.as_str() {
                "g23=g13" => 1.0,
                "g23=2g13" => 2.0,
                _ => 0.5,
            };
            assert!((ratio - expected).abs() < 1e-12);
            assert_eq!(p.gamma21, 0.0);
        }
    }

    #[test]
    fn combined_schedule_uses_irrational_ratios() {
        for p in FigureId::Combined.schedule() {
            assert!((p.gamma23 / p.gamma13 - E).abs() < 1e-12);
            assert_eq!(p.gamma21, p.gamma13);
        }
    }

    #[test]
    fn reversed_pulses_swap_the_delay() {
        assert_eq!(FigureId::Reversed.pulse().t0, -FigureId::Emission.pulse().t0);
        assert_eq!(FigureId::Reversed.schedule(), FigureId::Emission.schedule());
    }
}
