//! Polarization optics and interferometer components as operators.
//!
//! Single-path elements act on spin ⊗ OAM. Two-port elements (beam splitters,
//! the Dove-prism pair in its path-resolved form) act on arm ⊗ spin ⊗ OAM,
//! where arm 0 is the transmitted arm of the first polarizing beam splitter.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::qplate::{qplate_op, QPlateSpec};
use super::ElementError;
use crate::angle::wrap_tau;
use crate::qstate::{
    arm_photon_basis, kron, photon_basis, Arm, ArmPhotonBasis, Basis, LinearOp, OamBasis, PathBasis, PhotonBasis,
    PhotonState, Pol, SpinBasis, SpinState, StateError,
};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Columns: circular coordinates of |H⟩ and |V⟩.
fn linear_to_circular_matrix() -> Matrix2<C> {
    let h = SpinState::h();
    let v = SpinState::v();
    let (h, v) = (h.amplitudes(), v.amplitudes());
    Matrix2::new(h[0], v[0], h[1], v[1])
}

/// Jones matrix (linear H/V basis) of a retarder with retardance `delta` and
/// fast axis at `theta`: `R(θ)·diag(1, e^{iδ})·R(θ)ᵀ`.
fn retarder_linear(delta: f64, theta: f64) -> Matrix2<C> {
    let (s, co) = theta.sin_cos();
    let rot = Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0));
    let d = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C::from_polar(1.0, delta));
    rot * d * rot.transpose()
}

fn spin_op_from_linear(j: Matrix2<C>) -> LinearOp<SpinBasis> {
    let t = linear_to_circular_matrix();
    let circ = t * j * t.adjoint();
    LinearOp::on_basis(&SpinBasis, DMatrix::from_iterator(2, 2, circ.iter().copied())).expect("2x2")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveplateKind {
    Quarter,
    Half,
}

/// Wave plate with fast axis at `theta` (from H), as a circular-basis operator.
///
/// Uses the plain retarder form, so the quarter-wave plate at 45° sends
/// `|L⟩ → (1+i)/√2 |H⟩` and `|R⟩ → (1−i)/√2 |V⟩` with no extra phase.
pub fn waveplate_op(kind: WaveplateKind, theta: f64) -> LinearOp<SpinBasis> {
    let delta = match kind {
        WaveplateKind::Quarter => FRAC_PI_2,
        WaveplateKind::Half => PI,
    };
    spin_op_from_linear(retarder_linear(delta, theta))
}

/// Projector onto a linear polarization, circular basis.
pub fn polarizer_op(p: Pol) -> LinearOp<SpinBasis> {
    let t = SpinState::linear(p);
    let a = t.amplitudes();
    let m = DMatrix::from_fn(2, 2, |i, j| a[i] * a[j].conj());
    LinearOp::on_basis(&SpinBasis, m).expect("2x2")
}

fn oam_phase(m_max: u32, alpha: f64) -> LinearOp<OamBasis> {
    LinearOp::diagonal(&OamBasis::new(m_max), |m| {
        C::from_polar(1.0, 2.0 * f64::from(m) * alpha)
    })
}

/// Dove-prism pair with relative rotation `alpha`, with the arms identified
/// by linear polarization after the first PBS: the V arm picks up
/// `e^{i2mα}` on mode m, the H arm nothing. Polarization is untouched.
pub fn dove_pair_op(alpha: f64, m_max: u32) -> LinearOp<PhotonBasis> {
    let h_arm = kron(&polarizer_op(Pol::H), &LinearOp::identity(&OamBasis::new(m_max)));
    let v_arm = kron(&polarizer_op(Pol::V), &oam_phase(m_max, alpha));
    let m = h_arm.matrix() + v_arm.matrix();
    LinearOp::on_basis(&photon_basis(m_max), m).expect("same labels")
}

/// Single-mode fiber: keeps only m = 0.
pub fn smf_filter_op(m_max: u32) -> LinearOp<PhotonBasis> {
    LinearOp::diagonal(
        &photon_basis(m_max),
        |(_, m)| {
            if m == 0 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        },
    )
}

/// Applies the fiber filter; returns the renormalized state and the
/// transmitted weight. A zero-weight result is returned unnormalized.
pub fn smf_filter(s: &PhotonState) -> Result<(PhotonState, f64), StateError> {
    let out = smf_filter_op(s.m_max()).apply(s)?;
    let w = out.norm_sqr();
    if w == 0.0 {
        return Ok((out, 0.0));
    }
    Ok((out.normalized()?, w))
}

/// Transverse image inversion of a mirror: `|m⟩ → |−m⟩`, polarization kept.
pub fn mirror_op(m_max: u32) -> LinearOp<PhotonBasis> {
    LinearOp::from_columns(&photon_basis(m_max), |(s, m)| [((s, -m), c(1.0, 0.0))])
        .expect("truncation is symmetric in m")
}

fn arm_projector(arm: Arm) -> LinearOp<PathBasis> {
    LinearOp::diagonal(&PathBasis, |a| if a == arm { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Places a single-path element in one arm, identity in the other.
pub fn in_arm(arm: Arm, op: &LinearOp<PhotonBasis>, m_max: u32) -> LinearOp<ArmPhotonBasis> {
    let here = kron(&arm_projector(arm), op);
    let there = kron(&arm_projector(arm.other()), &LinearOp::identity(&photon_basis(m_max)));
    LinearOp::on_basis(&arm_photon_basis(m_max), here.matrix() + there.matrix()).expect("same labels")
}

/// Same single-path element in both arms.
pub fn in_both_arms(op: &LinearOp<PhotonBasis>) -> LinearOp<ArmPhotonBasis> {
    op.on_second(&PathBasis)
}

/// Polarizing beam splitter: H keeps its arm, V swaps arms.
pub fn pbs_op(m_max: u32) -> LinearOp<ArmPhotonBasis> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let swap = LinearOp::on_basis(&PathBasis, DMatrix::from_row_slice(2, 2, &[z, one, one, z])).expect("2x2");
    let id_oam = LinearOp::identity(&OamBasis::new(m_max));
    let h = kron(&LinearOp::identity(&PathBasis), &kron(&polarizer_op(Pol::H), &id_oam));
    let v = kron(&swap, &kron(&polarizer_op(Pol::V), &id_oam));
    LinearOp::on_basis(&arm_photon_basis(m_max), h.matrix() + v.matrix()).expect("same labels")
}

/// Symmetric non-polarizing 50/50 beam splitter, phase i on reflection.
pub fn bs_op(m_max: u32) -> LinearOp<ArmPhotonBasis> {
    let t = c(FRAC_1_SQRT_2, 0.0);
    let r = c(0.0, FRAC_1_SQRT_2);
    let bs = LinearOp::on_basis(&PathBasis, DMatrix::from_row_slice(2, 2, &[t, r, r, t])).expect("2x2");
    kron(&bs, &LinearOp::identity(&photon_basis(m_max)))
}

/// Path-resolved Dove-prism pair: arm 1 (PBS-reflected) gets `e^{i2mα}`.
pub fn dove_arms_op(alpha: f64, m_max: u32) -> LinearOp<ArmPhotonBasis> {
    let rotated = kron(&LinearOp::identity(&SpinBasis), &oam_phase(m_max, alpha));
    in_arm(Arm::One, &rotated, m_max)
}

/// An optical element of the bench.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Element {
    QPlate(QPlateSpec),
    Qwp {
        angle: f64,
    },
    Hwp {
        angle: f64,
    },
    /// Transmits H, reflects V.
    Pbs,
    Bs,
    DovePrismPair {
        alpha: f64,
    },
    SmfFilter,
    Mirror,
}

fn checked(angle: f64, what: &'static str) -> Result<f64, ElementError> {
    if angle.is_finite() {
        Ok(wrap_tau(angle))
    } else {
        Err(ElementError::NonFiniteAngle(what))
    }
}

impl Element {
    pub fn qwp(angle: f64) -> Result<Self, ElementError> {
        Ok(Element::Qwp {
            angle: checked(angle, "qwp angle")?,
        })
    }

    pub fn hwp(angle: f64) -> Result<Self, ElementError> {
        Ok(Element::Hwp {
            angle: checked(angle, "hwp angle")?,
        })
    }

    pub fn dove_pair(alpha: f64) -> Result<Self, ElementError> {
        Ok(Element::DovePrismPair {
            alpha: checked(alpha, "dove alpha")?,
        })
    }

    /// True for the non-unitary filters.
    pub fn is_projector(&self) -> bool {
        matches!(self, Element::SmfFilter)
    }

    /// Operator on a single path. Beam splitters have no single-path form.
    pub fn photon_op(&self, m_max: u32) -> Result<LinearOp<PhotonBasis>, ElementError> {
        let id_oam = || LinearOp::identity(&OamBasis::new(m_max));
        Ok(match *self {
            Element::QPlate(spec) => qplate_op(&spec, m_max).op().clone(),
            Element::Qwp { angle } => kron(&waveplate_op(WaveplateKind::Quarter, angle), &id_oam()),
            Element::Hwp { angle } => kron(&waveplate_op(WaveplateKind::Half, angle), &id_oam()),
            Element::DovePrismPair { alpha } => dove_pair_op(alpha, m_max),
            Element::SmfFilter => smf_filter_op(m_max),
            Element::Mirror => mirror_op(m_max),
            Element::Pbs | Element::Bs => return Err(ElementError::TwoPort(self.name())),
        })
    }

    /// Operator on arm ⊗ spin ⊗ OAM. Single-path elements act on both arms.
    pub fn arm_op(&self, m_max: u32) -> LinearOp<ArmPhotonBasis> {
        match *self {
            Element::Pbs => pbs_op(m_max),
            Element::Bs => bs_op(m_max),
            Element::DovePrismPair { alpha } => dove_arms_op(alpha, m_max),
            _ => in_both_arms(&self.photon_op(m_max).expect("single-path element")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Element::QPlate(_) => "qplate",
            Element::Qwp { .. } => "qwp",
            Element::Hwp { .. } => "hwp",
            Element::Pbs => "pbs",
            Element::Bs => "bs",
            Element::DovePrismPair { .. } => "dove",
            Element::SmfFilter => "smf",
            Element::Mirror => "mirror",
        }
    }
}

/// Indices of basis labels with |m| <= `m_max - margin`.
pub fn interior_columns<B: Basis>(basis: &B, m_of: impl Fn(B::Label) -> i32, margin: u32, m_max: u32) -> Vec<usize> {
    basis
        .labels()
        .into_iter()
        .enumerate()
        .filter(|(_, l)| m_of(*l).unsigned_abs() + margin <= m_max)
        .map(|(i, _)| i)
        .collect()
}
