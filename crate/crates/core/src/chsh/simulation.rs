use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sampling::{estimate_e, sample_counts, CountRecord, RngSeed};
use super::{combine_s, same_phase, ChshError, ChshSettings};
use crate::angle::parse_angle;
use crate::elements::QPlateSpec;
use crate::experiment::{AnalyzerScheme, Experiment, JointProbabilities};
use crate::parallel::{map_indexed, Execution};

/// The four `(χ_A, χ_B)` pairs at which the CHSH optimum is measured.
pub const CIRCLE_SETTINGS: [(f64, f64); 4] = [
    (FRAC_PI_2, FRAC_PI_4),
    (FRAC_PI_2, -FRAC_PI_4),
    (-PI, FRAC_PI_4),
    (-PI, -FRAC_PI_4),
];

pub fn is_circle_setting(chi_a: f64, chi_b: f64) -> bool {
    CIRCLE_SETTINGS
        .iter()
        .any(|&(a, b)| same_phase(a, chi_a) && same_phase(b, chi_b))
}

/// Evenly spaced angles from `start` toward `stop`.
///
/// Half-open `[start, stop)` by default, which suits periodic sweeps;
/// `closed` includes `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub closed: bool,
}

impl AngleGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self, ChshError> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(ChshError::InvalidGrid("endpoints must be finite".into()));
        }
        if points == 0 {
            return Err(ChshError::InvalidGrid("at least one point required".into()));
        }
        Ok(AngleGrid {
            start,
            stop,
            points,
            closed: false,
        })
    }

    pub fn closed(start: f64, stop: f64, points: usize) -> Result<Self, ChshError> {
        Ok(AngleGrid {
            closed: true,
            ..Self::new(start, stop, points)?
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let intervals = if self.closed {
            self.points.saturating_sub(1).max(1)
        } else {
            self.points
        };
        let step = (self.stop - self.start) / intervals as f64;
        (0..self.points)
            .map(|k| {
                if self.closed && k + 1 == self.points && k > 0 {
                    self.stop
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

/// `start:stop:points` (half-open) or `start:stop:points:closed`, endpoints
/// in any form accepted by [`parse_angle`].
impl FromStr for AngleGrid {
    type Err = ChshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let (start, stop, points, closed) = match parts[..] {
            [a, b, n] => (a, b, n, false),
            [a, b, n, "closed"] => (a, b, n, true),
            _ => {
                return Err(ChshError::InvalidGrid(format!(
                    "expected start:stop:points[:closed], got {s:?}"
                )))
            }
        };
        let angle = |t: &str| parse_angle(t).map_err(|e| ChshError::InvalidGrid(e.to_string()));
        let points = points
            .trim()
            .parse()
            .map_err(|_| ChshError::InvalidGrid(format!("bad point count {points:?}")))?;
        if closed {
            AngleGrid::closed(angle(start)?, angle(stop)?, points)
        } else {
            AngleGrid::new(angle(start)?, angle(stop)?, points)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub chi_a: f64,
    pub chi_b: f64,
    pub probabilities: JointProbabilities,
    /// `None` in exact-only sweeps (zero shots).
    pub counts: Option<CountRecord>,
    pub e_exact: f64,
    pub e_estimated: Option<f64>,
    /// One of [`CIRCLE_SETTINGS`].
    pub circle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloS {
    pub s_est: f64,
    pub standard_error: f64,
    pub s_exact: f64,
    /// Estimated correlations in [`ChshSettings::pairs`] order.
    pub correlations: [f64; 4],
    pub counts: [CountRecord; 4],
    pub shots_per_setting: u64,
}

/// An experiment with a fixed analyzer model and execution strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub experiment: Experiment,
    pub scheme: AnalyzerScheme,
    pub exec: Execution,
}

impl Default for Simulation {
    fn default() -> Self {
        Simulation::new(Experiment::new(QPlateSpec::unit()).expect("unit plate is valid"))
    }
}

impl Simulation {
    pub fn new(experiment: Experiment) -> Self {
        Simulation {
            experiment,
            scheme: AnalyzerScheme::default(),
            exec: Execution::default(),
        }
    }

    pub fn with_scheme(mut self, scheme: AnalyzerScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn probabilities(&self, chi_a: f64, chi_b: f64) -> Result<JointProbabilities, ChshError> {
        Ok(self.experiment.probabilities(chi_a, chi_b, self.scheme)?)
    }

    pub fn correlation(&self, chi_a: f64, chi_b: f64) -> Result<f64, ChshError> {
        Ok(self.probabilities(chi_a, chi_b)?.expectation())
    }

    pub fn exact_s(&self, settings: &ChshSettings) -> Result<f64, ChshError> {
        let mut e = [0.0; 4];
        for (slot, (a, b)) in e.iter_mut().zip(settings.pairs()) {
            *slot = self.correlation(a, b)?;
        }
        Ok(combine_s(e))
    }

    /// Row `i` samples from `seed.substream(i)`; zero shots gives exact rows only.
    pub fn sweep(&self, chi_b: f64, grid: &[f64], shots: u64, seed: RngSeed) -> Result<Vec<SweepRow>, ChshError> {
        if grid.is_empty() {
            return Err(ChshError::InvalidGrid("empty grid".into()));
        }
        map_indexed(self.exec, grid.len(), |i| {
            let chi_a = grid[i];
            let probabilities = self.probabilities(chi_a, chi_b)?;
            let counts = match shots {
                0 => None,
                n => Some(sample_counts(&probabilities, n, seed.substream(i as u64))?),
            };
            Ok(SweepRow {
                index: i,
                chi_a,
                chi_b,
                probabilities,
                counts,
                e_exact: probabilities.expectation(),
                e_estimated: counts.as_ref().map(estimate_e).transpose()?,
                circle: is_circle_setting(chi_a, chi_b),
            })
        })
        .into_iter()
        .collect()
    }

    /// Four independent runs; setting `k` samples from `seed.substream(k)`.
    ///
    /// Standard error `√(Σ(1 − E_k²)/shots)` with the estimated `E_k`.
    pub fn monte_carlo(&self, settings: &ChshSettings, shots: u64, seed: RngSeed) -> Result<MonteCarloS, ChshError> {
        if shots < 2 {
            return Err(ChshError::TooFewShots { shots, min: 2 });
        }
        let pairs = settings.pairs();
        let runs: Vec<Result<(f64, CountRecord), ChshError>> = map_indexed(self.exec, 4, |k| {
            let (a, b) = pairs[k];
            let p = self.probabilities(a, b)?;
            Ok((p.expectation(), sample_counts(&p, shots, seed.substream(k as u64))?))
        });
        let mut exact = [0.0; 4];
        let mut counts = [CountRecord::default(); 4];
        let mut correlations = [0.0; 4];
        for (k, run) in runs.into_iter().enumerate() {
            let (e, c) = run?;
            exact[k] = e;
            counts[k] = c;
            correlations[k] = estimate_e(&c)?;
        }
        let var: f64 = correlations.iter().map(|e| 1.0 - e * e).sum();
        Ok(MonteCarloS {
            s_est: combine_s(correlations),
            standard_error: (var / shots as f64).sqrt(),
            s_exact: combine_s(exact),
            correlations,
            counts,
            shots_per_setting: shots,
        })
    }
}

/// Sweep of `χ_A` at fixed `χ_B` for the unit plate.
pub fn sweep(chi_b: f64, grid: &[f64], shots: u64, seed: RngSeed) -> Result<Vec<SweepRow>, ChshError> {
    Simulation::default().sweep(chi_b, grid, shots, seed)
}

/// Sampled S for the unit plate.
pub fn chsh_monte_carlo(settings: &ChshSettings, shots: u64, seed: RngSeed) -> Result<MonteCarloS, ChshError> {
    Simulation::default().monte_carlo(settings, shots, seed)
}
