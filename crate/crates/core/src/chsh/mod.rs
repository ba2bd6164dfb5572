//! CHSH inequality: exact S, sampled counts and the noncontextual bound.
//!
//! `S = E(χ_A, χ_B) + E(χ_A, χ'_B) − E(χ'_A, χ_B) + E(χ'_A, χ'_B)`. Any
//! noncontextual hidden-variable model obeys `|S| ≤ 2`; the heralded
//! spin–orbit state reaches `2√2`.

mod sampling;
mod simulation;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap_tau;
use crate::experiment::ExperimentError;

pub use sampling::{estimate_e, sample_counts, CountRecord, RngSeed, GENERATOR_ID, PROB_SUM_TOL};
pub use simulation::{
    chsh_monte_carlo, is_circle_setting, sweep, AngleGrid, MonteCarloS, Simulation, SweepRow, CIRCLE_SETTINGS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChshError {
    #[error("{0} is not finite")]
    NonFinite(&'static str),
    #[error("invalid probability vector {0}")]
    InvalidProbabilities(String),
    #[error("no counts recorded")]
    ZeroCounts,
    #[error("{shots} shots given, at least {min} required")]
    TooFewShots { shots: u64, min: u64 },
    #[error("invalid angle grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

/// The four analyzer phases entering S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub chi_a: f64,
    pub chi_a_prime: f64,
    pub chi_b: f64,
    pub chi_b_prime: f64,
}

/// Sign of each term of S, in [`ChshSettings::pairs`] order.
pub const CHSH_SIGNS: [f64; 4] = [1.0, 1.0, -1.0, 1.0];

impl ChshSettings {
    pub fn new(chi_a: f64, chi_a_prime: f64, chi_b: f64, chi_b_prime: f64) -> Result<Self, ChshError> {
        for (v, name) in [
            (chi_a, "chi_a"),
            (chi_a_prime, "chi_a_prime"),
            (chi_b, "chi_b"),
            (chi_b_prime, "chi_b_prime"),
        ] {
            if !v.is_finite() {
                return Err(ChshError::NonFinite(name));
            }
        }
        Ok(ChshSettings {
            chi_a,
            chi_a_prime,
            chi_b,
            chi_b_prime,
        })
    }

    /// `χ_A = π/2, χ'_A = −π, χ_B = π/4, χ'_B = −π/4`, where `S = 2√2`.
    pub fn optimal() -> Self {
        ChshSettings {
            chi_a: FRAC_PI_2,
            chi_a_prime: -PI,
            chi_b: FRAC_PI_4,
            chi_b_prime: -FRAC_PI_4,
        }
    }

    /// Each angle uniform in `[−π, π)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut draw = || rng.random_range(-PI..PI);
        ChshSettings {
            chi_a: draw(),
            chi_a_prime: draw(),
            chi_b: draw(),
            chi_b_prime: draw(),
        }
    }

    /// `(χ_A, χ_B), (χ_A, χ'_B), (χ'_A, χ_B), (χ'_A, χ'_B)`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.chi_a, self.chi_b),
            (self.chi_a, self.chi_b_prime),
            (self.chi_a_prime, self.chi_b),
            (self.chi_a_prime, self.chi_b_prime),
        ]
    }
}

/// Combines four correlation values, given in [`ChshSettings::pairs`] order.
pub fn combine_s(e: [f64; 4]) -> f64 {
    e.iter().zip(CHSH_SIGNS).map(|(e, s)| s * e).sum()
}

pub fn chsh_s(settings: &ChshSettings, e: impl Fn(f64, f64) -> f64) -> f64 {
    combine_s(settings.pairs().map(|(a, b)| e(a, b)))
}

/// Deterministic ±1 outcomes: `a` at (χ_A, χ'_A), `b` at (χ_B, χ'_B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub a: [i8; 2],
    pub b: [i8; 2],
}

impl Assignment {
    pub fn s(&self) -> f64 {
        let [a, a2] = self.a.map(f64::from);
        let [b, b2] = self.b.map(f64::from);
        combine_s([a * b, a * b2, a2 * b, a2 * b2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NchvBound {
    pub max_s: f64,
    pub argmax: Assignment,
    pub min_s: f64,
    pub argmin: Assignment,
    /// Assignments enumerated (16 when all four phases are distinct).
    pub enumerated: usize,
}

/// Equal mod 2π.
pub(crate) fn same_phase(x: f64, y: f64) -> bool {
    let d = wrap_tau(x - y);
    d.min(TAU - d) < 1e-12
}

/// Exhaustive search over noncontextual deterministic assignments.
///
/// An outcome is a function of the phase setting alone, so when
/// `χ_A ≡ χ'_A` (mod 2π) only assignments with `a(χ_A) = a(χ'_A)` are
/// admissible, and likewise for Bob.
pub fn nchv_max_s(settings: &ChshSettings) -> NchvBound {
    let a_tied = same_phase(settings.chi_a, settings.chi_a_prime);
    let b_tied = same_phase(settings.chi_b, settings.chi_b_prime);
    let signs = [1i8, -1];
    let mut best: Option<NchvBound> = None;
    for a0 in signs {
        for a1 in signs {
            for b0 in signs {
                for b1 in signs {
                    if (a_tied && a0 != a1) || (b_tied && b0 != b1) {
                        continue;
                    }
                    let asg = Assignment {
                        a: [a0, a1],
                        b: [b0, b1],
                    };
                    let s = asg.s();
                    let b = best.get_or_insert(NchvBound {
                        max_s: s,
                        argmax: asg,
                        min_s: s,
                        argmin: asg,
                        enumerated: 0,
                    });
                    b.enumerated += 1;
                    if s > b.max_s {
                        b.max_s = s;
                        b.argmax = asg;
                    }
                    if s < b.min_s {
                        b.min_s = s;
                        b.argmin = asg;
                    }
                }
            }
        }
    }
    best.expect("at least the all-plus assignment")
}
