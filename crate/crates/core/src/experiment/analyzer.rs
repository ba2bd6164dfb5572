use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::qstate::{Basis, OamBasis, OamState, PhotonState, Projector, SpinBasis, SpinState, State, Subsystem};

/// Lost weight tolerated outside the analyzer's two OAM modes.
pub const LOST_WEIGHT_TOL: f64 = 1e-9;

/// Analyzer phases and the element rotations that realize them.
///
/// `chi_a = 2·order·alpha` (Dove-prism angle), `chi_b = 2·beta` (wave-plate
/// phase), with `order = 2q` the OAM carried by each branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerSettings {
    pub chi_a: f64,
    pub chi_b: f64,
    pub order: i32,
}

impl AnalyzerSettings {
    /// Phases for the unit plate, order 2.
    pub fn new(chi_a: f64, chi_b: f64) -> Self {
        AnalyzerSettings { chi_a, chi_b, order: 2 }
    }

    pub fn with_order(chi_a: f64, chi_b: f64, order: i32) -> Result<Self, ExperimentError> {
        if order == 0 {
            return Err(ExperimentError::DegenerateAnalyzer);
        }
        Ok(AnalyzerSettings { chi_a, chi_b, order })
    }

    pub fn from_rotations(alpha: f64, beta: f64, order: i32) -> Result<Self, ExperimentError> {
        Self::with_order(2.0 * f64::from(order) * alpha, 2.0 * beta, order)
    }

    pub fn alpha(&self) -> f64 {
        self.chi_a / (2.0 * f64::from(self.order))
    }

    pub fn beta(&self) -> f64 {
        self.chi_b / 2.0
    }
}

/// Two-outcome observable `P₊ − P₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<B: Basis> {
    pub plus: Projector<B>,
    pub minus: Projector<B>,
}

impl<B: Basis> Observable<B> {
    /// Eigenstate for outcome `+1` (`true`) or `−1`.
    pub fn eigenstate(&self, plus: bool) -> &State<B> {
        if plus {
            self.plus.target()
        } else {
            self.minus.target()
        }
    }
}

/// `[(1+i)|−order⟩ ± (1−i)e^{iχ}|+order⟩]/2`.
///
/// The `(1+i)` coefficient sits on the mode that travels with `|L⟩`.
pub fn observable_a(chi_a: f64, order: i32, m_max: u32) -> Result<Observable<OamBasis>, ExperimentError> {
    if order == 0 {
        return Err(ExperimentError::DegenerateAnalyzer);
    }
    let lower = OamState::mode(-order, m_max)?;
    let upper = OamState::mode(order, m_max)?;
    let a = Complex64::new(0.5, 0.5);
    let b = Complex64::new(0.5, -0.5) * Complex64::from_polar(1.0, chi_a);
    let plus = lower.scaled(a).add(&upper.scaled(b))?;
    let minus = lower.scaled(a).add(&upper.scaled(-b))?;
    Ok(Observable {
        plus: Projector::new(plus, Subsystem::Oam)?,
        minus: Projector::new(minus, Subsystem::Oam)?,
    })
}

/// `(|L⟩ ± e^{iχ}|R⟩)/√2`.
pub fn observable_b(chi_b: f64) -> Observable<SpinBasis> {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let l = SpinState::spin(crate::qstate::Spin::L).scaled(s);
    let r = SpinState::spin(crate::qstate::Spin::R).scaled(s * Complex64::from_polar(1.0, chi_b));
    let plus = l.add(&r).expect("same basis");
    let minus = l.add(&r.scaled(Complex64::new(-1.0, 0.0))).expect("same basis");
    Observable {
        plus: Projector::new(plus, Subsystem::Spin).expect("unit norm"),
        minus: Projector::new(minus, Subsystem::Spin).expect("unit norm"),
    }
}

/// Probabilities of the four joint outcomes, indexed (A, B).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilities {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointProbabilities {
    /// `[pp, pm, mp, mm]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }

    pub fn from_array([pp, pm, mp, mm]: [f64; 4]) -> Self {
        JointProbabilities { pp, pm, mp, mm }
    }

    pub fn total(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// `p₊₊ + p₋₋ − p₊₋ − p₋₊`.
    pub fn expectation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }

    pub fn marginal_a_plus(&self) -> f64 {
        self.pp + self.pm
    }

    pub fn marginal_b_plus(&self) -> f64 {
        self.pp + self.mp
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `p_ij = ‖(P_A^i ⊗ P_B^j)|bob⟩‖²` with the OAM analyzer at `±settings.order`.
pub fn joint_probabilities(
    bob: &PhotonState,
    settings: &AnalyzerSettings,
) -> Result<JointProbabilities, ExperimentError> {
    if !bob.is_normalized() {
        return Err(crate::qstate::StateError::NotNormalized(bob.norm_sqr()).into());
    }
    let order = settings.order;
    if order.unsigned_abs() > bob.m_max() {
        return Err(ExperimentError::LostWeight(1.0));
    }
    let lost = bob.weight_outside(&[-order, order]);
    if lost > LOST_WEIGHT_TOL {
        return Err(ExperimentError::LostWeight(lost));
    }
    let obs_a = observable_a(settings.chi_a, order, bob.m_max())?;
    let obs_b = observable_b(settings.chi_b);
    let p = |a: bool, b: bool| -> Result<f64, ExperimentError> {
        let oam = bob.contract_first(obs_b.eigenstate(b))?;
        Ok(obs_a.eigenstate(a).inner(&oam).norm_sqr())
    };
    Ok(JointProbabilities {
        pp: p(true, true)?,
        pm: p(true, false)?,
        mp: p(false, true)?,
        mm: p(false, false)?,
    })
}

/// `⟨Â(χ_A) B̂(χ_B)⟩`.
pub fn expectation(bob: &PhotonState, settings: &AnalyzerSettings) -> Result<f64, ExperimentError> {
    Ok(joint_probabilities(bob, settings)?.expectation())
}
