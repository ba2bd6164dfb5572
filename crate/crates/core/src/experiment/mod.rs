//! The heralded spin–orbit experiment.
//!
//! A polarization Bell pair is produced, Bob's photon passes a single-mode
//! fiber and a q-plate, and Alice's detection in `|H⟩` heralds Bob's
//! spin–orbit entangled state. Bob's state is then analyzed either with the
//! ideal projectors ([`joint_probabilities`]) or with the full two-arm
//! interferometer ([`interferometer_detect`]); the two agree on the heralded
//! state.

mod analyzer;
mod interferometer;
mod preparation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::{ElementError, QPlateSpec};
use crate::qstate::{SpinState, StateError};

pub use analyzer::{
    expectation, joint_probabilities, observable_a, observable_b, AnalyzerSettings, JointProbabilities, Observable,
    LOST_WEIGHT_TOL,
};
pub use interferometer::{
    analyzer_chain, analyzer_op, detector_probabilities, interferometer_detect, Placement, A_PLUS_PORT, B_PLUS_POL,
};
pub use preparation::{apply_bob, herald, prepare_hybrid, qplate_on_bob, spdc_source, HeraldOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error("herald outcome has zero probability")]
    HeraldFailed,
    #[error("weight {0:.3e} lies outside the analyzer's OAM modes")]
    LostWeight(f64),
    #[error("q = 0 carries no OAM; the OAM analyzer is undefined")]
    DegenerateAnalyzer,
}

/// How Bob's photon is analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyzerScheme {
    /// Ideal projectors onto the observable eigenstates.
    #[default]
    Projector,
    /// Element-by-element two-arm interferometer.
    Interferometer,
}

/// Source, plate and herald fixed; analyzer settings vary.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    plate: QPlateSpec,
    m_max: u32,
    alice_basis: SpinState,
    heralded: HeraldOutcome,
}

impl Experiment {
    /// Heralds on `|H⟩` with the plate's default truncation.
    pub fn new(plate: QPlateSpec) -> Result<Self, ExperimentError> {
        Self::with(plate, plate.default_m_max(), SpinState::h())
    }

    pub fn with(plate: QPlateSpec, m_max: u32, alice_basis: SpinState) -> Result<Self, ExperimentError> {
        if plate.two_q() == 0 {
            return Err(ExperimentError::DegenerateAnalyzer);
        }
        let heralded = herald(&prepare_hybrid(&plate, m_max)?, &alice_basis)?;
        Ok(Experiment {
            plate,
            m_max,
            alice_basis,
            heralded,
        })
    }

    pub fn plate(&self) -> &QPlateSpec {
        &self.plate
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn alice_basis(&self) -> &SpinState {
        &self.alice_basis
    }

    pub fn heralded(&self) -> &HeraldOutcome {
        &self.heralded
    }

    /// Settings `(χ_A, χ_B)` at this plate's OAM order.
    pub fn settings(&self, chi_a: f64, chi_b: f64) -> AnalyzerSettings {
        AnalyzerSettings::with_order(chi_a, chi_b, self.plate.two_q()).expect("two_q checked nonzero")
    }

    pub fn probabilities(
        &self,
        chi_a: f64,
        chi_b: f64,
        scheme: AnalyzerScheme,
    ) -> Result<JointProbabilities, ExperimentError> {
        let s = self.settings(chi_a, chi_b);
        match scheme {
            AnalyzerScheme::Projector => joint_probabilities(&self.heralded.state, &s),
            AnalyzerScheme::Interferometer => interferometer_detect(&self.heralded.state, s.alpha(), s.beta()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::tensor;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_experiment() {
        let e = Experiment::new(QPlateSpec::unit()).unwrap();
        assert!((e.heralded().herald_probability - 0.5).abs() < 1e-15);
        let p = e
            .probabilities(PI / 2.0, PI / 4.0, AnalyzerScheme::Interferometer)
            .unwrap();
        assert!((p.expectation() - (3.0 * PI / 4.0).sin()).abs() < 1e-10);
    }

    #[test]
    fn zero_charge_rejected() {
        let plate = QPlateSpec::from_two_q(0, 0.0).unwrap();
        assert_eq!(Experiment::new(plate), Err(ExperimentError::DegenerateAnalyzer));
    }

    #[test]
    fn higher_charge_follows_sine_law() {
        for two_q in [-2, 1, 3, 4] {
            let e = Experiment::new(QPlateSpec::from_two_q(two_q, 0.0).unwrap()).unwrap();
            for (a, b) in [(0.3, -1.2), (PI / 2.0, PI / 4.0)] {
                for scheme in [AnalyzerScheme::Projector, AnalyzerScheme::Interferometer] {
                    let ex = e.probabilities(a, b, scheme).unwrap().expectation();
                    assert!((ex - (a + b).sin()).abs() < 1e-10, "2q={two_q} {scheme:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn marginals_are_half(a in -PI..PI, b in -PI..PI) {
            let e = Experiment::new(QPlateSpec::unit()).unwrap();
            let p = e.probabilities(a, b, AnalyzerScheme::Projector).unwrap();
            prop_assert!((p.marginal_a_plus() - 0.5).abs() < 1e-12);
            prop_assert!((p.marginal_b_plus() - 0.5).abs() < 1e-12);
            prop_assert!((p.total() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn schemes_agree(alpha in -PI..PI, beta in -PI..PI) {
            let e = Experiment::new(QPlateSpec::unit()).unwrap();
            let s = AnalyzerSettings::from_rotations(alpha, beta, 2).unwrap();
            let bob = &e.heralded().state;
            let shortcut = joint_probabilities(bob, &s).unwrap();
            let chain = interferometer_detect(bob, alpha, beta).unwrap();
            prop_assert!(chain.max_abs_diff(&shortcut) < 1e-10);
        }

        #[test]
        fn herald_idempotent(a in -PI..PI) {
            let e = Experiment::new(QPlateSpec::new(1.0, a).unwrap()).unwrap();
            let bob = &e.heralded().state;
            let again = herald(&tensor(&SpinState::h(), bob), &SpinState::h()).unwrap();
            prop_assert!((again.herald_probability - 1.0).abs() < 1e-12);
            prop_assert!(again.state.max_abs_diff(bob) < 1e-12);
        }

        #[test]
        fn settings_round_trip(k in -64i32..64, l in -64i32..64) {
            let chi_a = f64::from(k) * PI / 16.0;
            let chi_b = f64::from(l) * PI / 16.0;
            let s = AnalyzerSettings::new(chi_a, chi_b);
            prop_assert_eq!(4.0 * s.alpha(), chi_a);
            prop_assert_eq!(2.0 * s.beta(), chi_b);
        }
    }
}
