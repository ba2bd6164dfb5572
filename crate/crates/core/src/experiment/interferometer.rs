use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::analyzer::JointProbabilities;
use super::ExperimentError;
use crate::elements::{in_arm, Element};
use crate::qstate::{
    arm_photon_basis, tensor, Arm, ArmPhotonBasis, LinearOp, PathBasis, PhotonState, Pol, SpinState, State, StateError,
};

/// Where an element sits in the two-arm analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Placement {
    /// Two-port elements, or single-path elements repeated in both arms.
    Across,
    Arm(Arm),
}

/// The analyzer in optical order.
///
/// QWP@45° → PBS → Dove pair (α) → mirror in arm 0 → BS → QWP@−45° → HWP@0 →
/// HWP@β/2 → detection behind a PBS in each BS output.
///
/// The mirror inverts the transverse image (`m → −m`). Without it the two
/// arms carry opposite OAM and never interfere at unresolving detectors.
/// HWP2 sits at β/2 because a half-wave pair at relative angle θ writes a
/// relative circular phase 4θ, and the analyzer needs `χ_B = 2β`.
pub fn analyzer_chain(alpha: f64, beta: f64) -> Result<Vec<(Placement, Element)>, ExperimentError> {
    Ok(vec![
        (Placement::Across, Element::qwp(FRAC_PI_4)?),
        (Placement::Across, Element::Pbs),
        (Placement::Across, Element::dove_pair(alpha)?),
        (Placement::Arm(Arm::Zero), Element::Mirror),
        (Placement::Across, Element::Bs),
        (Placement::Across, Element::qwp(-FRAC_PI_4)?),
        (Placement::Across, Element::hwp(0.0)?),
        (Placement::Across, Element::hwp(beta / 2.0)?),
    ])
}

fn placed_op(placement: Placement, element: &Element, m_max: u32) -> Result<LinearOp<ArmPhotonBasis>, ExperimentError> {
    Ok(match placement {
        Placement::Across => element.arm_op(m_max),
        Placement::Arm(arm) => in_arm(arm, &element.photon_op(m_max)?, m_max),
    })
}

/// Single operator for the whole analyzer up to the detectors.
pub fn analyzer_op(alpha: f64, beta: f64, m_max: u32) -> Result<LinearOp<ArmPhotonBasis>, ExperimentError> {
    let mut total = LinearOp::identity(&arm_photon_basis(m_max));
    for (placement, element) in analyzer_chain(alpha, beta)? {
        total = total.then(&placed_op(placement, &element, m_max)?)?;
    }
    Ok(total)
}

/// BS output carrying outcome A⁺.
pub const A_PLUS_PORT: Arm = Arm::One;
/// Final-PBS output carrying outcome B⁺.
pub const B_PLUS_POL: Pol = Pol::H;

/// Detector click probabilities, summed over OAM (detectors do not resolve m).
pub fn detector_probabilities(out: &State<ArmPhotonBasis>) -> Result<JointProbabilities, StateError> {
    let click = |a_plus: bool, b_plus: bool| -> Result<f64, StateError> {
        let port = if a_plus { A_PLUS_PORT } else { A_PLUS_PORT.other() };
        let pol = if b_plus { B_PLUS_POL } else { other_pol(B_PLUS_POL) };
        let path = State::basis_state(PathBasis, port)?;
        let photon = out.contract_first(&path)?;
        Ok(photon.contract_first(&SpinState::linear(pol))?.norm_sqr())
    };
    Ok(JointProbabilities {
        pp: click(true, true)?,
        pm: click(true, false)?,
        mp: click(false, true)?,
        mm: click(false, false)?,
    })
}

fn other_pol(p: Pol) -> Pol {
    match p {
        Pol::H => Pol::V,
        Pol::V => Pol::H,
    }
}

/// Sends Bob's photon into arm 0 of the analyzer and returns the four
/// detector probabilities `D(A^±B^±)`.
pub fn interferometer_detect(bob: &PhotonState, alpha: f64, beta: f64) -> Result<JointProbabilities, ExperimentError> {
    if !bob.is_normalized() {
        return Err(StateError::NotNormalized(bob.norm_sqr()).into());
    }
    let m_max = bob.m_max();
    let input = tensor(&State::basis_state(PathBasis, Arm::Zero)?, bob);
    let out = analyzer_op(alpha, beta, m_max)?.apply(&input)?;
    Ok(detector_probabilities(&out)?)
}
