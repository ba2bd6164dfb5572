use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::ChshError;
use crate::experiment::JointProbabilities;

/// Tolerance on `Σp = 1` for a sampling distribution.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// Recorded in output metadata so count records can be regenerated.
pub const GENERATOR_ID: &str =
    "ChaCha8Rng/rand_chacha-0.9 seed_from_u64+set_stream; multinomial by conditional Binomial/rand_distr-0.5";

/// Seed plus stream index; each stream is an independent ChaCha sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    /// Sub-stream `offset` positions after this one.
    pub fn substream(&self, offset: u64) -> Self {
        RngSeed {
            seed: self.seed,
            stream: self.stream.wrapping_add(offset),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Coincidence counts per detector pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountRecord {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl CountRecord {
    pub fn from_array([n_pp, n_pm, n_mp, n_mm]: [u64; 4]) -> Self {
        CountRecord { n_pp, n_pm, n_mp, n_mm }
    }

    /// `[pp, pm, mp, mm]`.
    pub fn as_array(&self) -> [u64; 4] {
        [self.n_pp, self.n_pm, self.n_mp, self.n_mm]
    }

    pub fn total(&self) -> u64 {
        self.as_array().iter().sum()
    }
}

/// `[N₊₊ + N₋₋ − N₊₋ − N₋₊] / ΣN`.
pub fn estimate_e(counts: &CountRecord) -> Result<f64, ChshError> {
    let total = counts.total();
    if total == 0 {
        return Err(ChshError::ZeroCounts);
    }
    let agree = (counts.n_pp + counts.n_mm) as f64;
    let disagree = (counts.n_pm + counts.n_mp) as f64;
    Ok((agree - disagree) / total as f64)
}

fn checked_probs(probs: [f64; 4]) -> Result<[f64; 4], ChshError> {
    if probs.iter().any(|p| !p.is_finite() || *p < -PROB_SUM_TOL) {
        return Err(ChshError::InvalidProbabilities(format!("{probs:?}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(ChshError::InvalidProbabilities(format!("{probs:?} sums to {sum}")));
    }
    Ok(probs.map(|p| p.max(0.0)))
}

/// Multinomial draw of `shots` events over `[pp, pm, mp, mm]`.
pub fn sample_counts(probs: &JointProbabilities, shots: u64, seed: RngSeed) -> Result<CountRecord, ChshError> {
    if shots == 0 {
        return Err(ChshError::TooFewShots { shots, min: 1 });
    }
    let p = checked_probs(probs.as_array())?;
    let mut rng = seed.rng();
    let mut out = [0u64; 4];
    let mut left = shots;
    let mut mass = 1.0;
    for k in 0..3 {
        if left == 0 {
            break;
        }
        let cond = if mass > 0.0 { (p[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, cond).expect("p clamped to [0, 1]").sample(&mut rng);
        out[k] = draw;
        left -= draw;
        mass -= p[k];
    }
    out[3] = left;
    Ok(CountRecord::from_array(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs(a: [f64; 4]) -> JointProbabilities {
        JointProbabilities::from_array(a)
    }

    #[test]
    fn estimator_examples() {
        let e = |a| estimate_e(&CountRecord::from_array(a)).unwrap();
        assert_eq!(e([500, 0, 0, 500]), 1.0);
        assert_eq!(e([250, 250, 250, 250]), 0.0);
        assert!((e([427, 73, 73, 427]) - 0.708).abs() < 1e-15);
        assert_eq!(estimate_e(&CountRecord::default()), Err(ChshError::ZeroCounts));
    }

    #[test]
    fn degenerate_distribution() {
        for shots in [1, 7, 1_000_000] {
            let c = sample_counts(&probs([1.0, 0.0, 0.0, 0.0]), shots, RngSeed::new(3)).unwrap();
            assert_eq!(c.as_array(), [shots, 0, 0, 0]);
        }
        let c = sample_counts(&probs([0.0, 0.0, 0.0, 1.0]), 99, RngSeed::new(3)).unwrap();
        assert_eq!(c.as_array(), [0, 0, 0, 99]);
    }

    #[test]
    fn uniform_within_five_sigma() {
        let n = 1_000_000u64;
        let c = sample_counts(&probs([0.25; 4]), n, RngSeed::new(11)).unwrap();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for k in c.as_array() {
            assert!((k as f64 - 250_000.0).abs() < 5.0 * sigma, "{c:?}");
        }
        assert_eq!(c.total(), n);
    }

    #[test]
    fn deterministic_per_stream() {
        let p = probs([0.4, 0.1, 0.1, 0.4]);
        let a = sample_counts(&p, 10_000, RngSeed { seed: 5, stream: 2 }).unwrap();
        let b = sample_counts(&p, 10_000, RngSeed { seed: 5, stream: 2 }).unwrap();
        let c = sample_counts(&p, 10_000, RngSeed { seed: 5, stream: 3 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            sample_counts(&probs([0.5, 0.5, 0.5, 0.0]), 10, RngSeed::new(0)),
            Err(ChshError::InvalidProbabilities(_))
        ));
        assert!(matches!(
            sample_counts(&probs([1.5, -0.5, 0.0, 0.0]), 10, RngSeed::new(0)),
            Err(ChshError::InvalidProbabilities(_))
        ));
        assert!(matches!(
            sample_counts(&probs([f64::NAN, 0.0, 0.0, 1.0]), 10, RngSeed::new(0)),
            Err(ChshError::InvalidProbabilities(_))
        ));
        assert!(matches!(
            sample_counts(&probs([0.25; 4]), 0, RngSeed::new(0)),
            Err(ChshError::TooFewShots { .. })
        ));
    }

    #[test]
    fn rounding_noise_accepted() {
        let c = sample_counts(&probs([0.5 + 1e-12, -1e-17, 0.0, 0.5]), 100, RngSeed::new(0)).unwrap();
        assert_eq!(c.total(), 100);
        assert_eq!(c.n_pm, 0);
    }
}
