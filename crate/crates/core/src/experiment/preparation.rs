use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::ExperimentError;
use crate::elements::{qplate_op, smf_filter_op, QPlateSpec};
use crate::qstate::{
    bipartite_basis, BipartiteState, LinearOp, PhotonBasis, PhotonState, Spin, SpinBasis, SpinState, StateError,
};

/// Bob's heralded photon.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldOutcome {
    pub state: PhotonState,
    pub herald_probability: f64,
}

/// Polarization Bell state `(|H⟩_A|H⟩_B + |V⟩_A|V⟩_B)/√2` with Bob in m = 0.
pub fn spdc_source(m_max: u32) -> BipartiteState {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut out = BipartiteState::zero(bipartite_basis(m_max));
    for (alice, bob) in [(SpinState::h(), SpinState::h()), (SpinState::v(), SpinState::v())] {
        for a in Spin::ALL {
            for b in Spin::ALL {
                let amp = out.amp((a, (b, 0))) + s * alice.amp(a) * bob.amp(b);
                out.set((a, (b, 0)), amp).expect("m = 0 is always retained");
            }
        }
    }
    out
}

/// Applies a Bob-side operator, `I_A ⊗ op`.
pub fn apply_bob(state: &BipartiteState, op: &LinearOp<PhotonBasis>) -> Result<BipartiteState, StateError> {
    op.on_second(&SpinBasis).apply(state)
}

/// Applies a q-plate to Bob's photon with an explicit truncation check.
pub fn qplate_on_bob(state: &BipartiteState, spec: &QPlateSpec) -> Result<BipartiteState, StateError> {
    let q = qplate_op(spec, state.m_max());
    if let Some((_, (spin, m))) = state
        .support()
        .map(|(l, _)| l)
        .find(|(_, bob)| q.out_of_range().contains(bob))
    {
        return Err(StateError::TruncationOverflow {
            m,
            shift: if spin == Spin::L { spec.two_q() } else { -spec.two_q() },
            m_max: state.m_max(),
        });
    }
    apply_bob(state, q.op())
}

/// Source → Bob's single-mode fiber → Bob's q-plate.
///
/// For the unit plate this is `(|L⟩_A|L,−2⟩_B + |R⟩_A|R,+2⟩_B)/√2`.
pub fn prepare_hybrid(spec: &QPlateSpec, m_max: u32) -> Result<BipartiteState, ExperimentError> {
    if spec.two_q().unsigned_abs() > m_max {
        return Err(StateError::TruncationOverflow {
            m: 0,
            shift: spec.two_q(),
            m_max,
        }
        .into());
    }
    let filtered = apply_bob(&spdc_source(m_max), &smf_filter_op(m_max))?;
    let filtered = filtered.normalized()?;
    Ok(qplate_on_bob(&filtered, spec)?)
}

/// Projects Alice onto `alice_basis` and returns Bob's normalized state.
pub fn herald(state: &BipartiteState, alice_basis: &SpinState) -> Result<HeraldOutcome, ExperimentError> {
    if !state.is_normalized() {
        return Err(StateError::NotNormalized(state.norm_sqr()).into());
    }
    let target = alice_basis.normalized()?;
    let bob = state.contract_first(&target)?;
    let p = bob.norm_sqr();
    // Below this the normalized state would be rounding noise.
    if p < 1e-24 {
        return Err(ExperimentError::HeraldFailed);
    }
    Ok(HeraldOutcome {
        state: bob.normalized()?,
        herald_probability: p,
    })
}
