use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ElementError;
use crate::angle::wrap_tau;
use crate::qstate::{photon_basis, Basis, BasisLabel, LinearOp, PhotonBasis, PhotonState, Spin, SpinBasis, StateError};

/// Geometry of a q-plate: axis orientation `α(r, φ) = qφ + α₀` with `2q ∈ ℤ`.
///
/// `q` is stored as the integer `2q`, so half-integer charges are exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPlateSpec {
    two_q: i32,
    alpha0: f64,
}

impl QPlateSpec {
    pub fn new(q: f64, alpha0: f64) -> Result<Self, ElementError> {
        let two_q = 2.0 * q;
        if !two_q.is_finite() || two_q.fract() != 0.0 || two_q.abs() > f64::from(i32::MAX / 4) {
            return Err(ElementError::NonIntegerTwoQ(q));
        }
        Self::from_two_q(two_q as i32, alpha0)
    }

    pub fn from_two_q(two_q: i32, alpha0: f64) -> Result<Self, ElementError> {
        if !alpha0.is_finite() {
            return Err(ElementError::NonFiniteAngle("alpha0"));
        }
        Ok(QPlateSpec {
            two_q,
            alpha0: wrap_tau(alpha0),
        })
    }

    /// The plate used throughout the proposed experiment: q = 1, α₀ = 0.
    pub fn unit() -> Self {
        QPlateSpec { two_q: 2, alpha0: 0.0 }
    }

    pub fn q(&self) -> f64 {
        f64::from(self.two_q) / 2.0
    }

    /// OAM shift imparted per pass.
    pub fn two_q(&self) -> i32 {
        self.two_q
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// Local axis orientation (unreduced) at azimuth `phi`.
    pub fn axis_angle(&self, phi: f64) -> f64 {
        self.q() * phi + self.alpha0
    }

    /// Default OAM truncation: `2·|2q|`, room for a second pass from m = 0.
    pub fn default_m_max(&self) -> u32 {
        2 * self.two_q.unsigned_abs()
    }
}

impl fmt::Display for QPlateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} alpha0={}", self.q(), self.alpha0)
    }
}

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Local Jones matrix of the plate at azimuth `phi`, in the circular basis.
///
/// The matrix is `[[0, e^{i2α}], [e^{−i2α}, 0]]` with rows and columns ordered
/// (R, L): an incoming `|L⟩` leaves as `e^{i2α}|R⟩` and `|R⟩` as
/// `e^{−i2α}|L⟩`, which is the spin part of [`qplate_op`].
pub fn transmission_matrix(spec: &QPlateSpec, phi: f64) -> LinearOp<SpinBasis> {
    let a = spec.axis_angle(phi);
    let z = Complex64::new(0.0, 0.0);
    let m = DMatrix::from_row_slice(2, 2, &[z, cis(2.0 * a), cis(-2.0 * a), z]);
    LinearOp::new(vec![Spin::R, Spin::L], m).expect("2x2 over two labels")
}

/// Spin ⊗ OAM action of a q-plate, truncated to `|m| <= m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct QPlateOperator {
    spec: QPlateSpec,
    op: LinearOp<PhotonBasis>,
    out_of_range: Vec<BasisLabel>,
}

/// Builds `Q̂ = e^{i2α₀}|R, m+2q⟩⟨L, m| + e^{−i2α₀}|L, m−2q⟩⟨R, m|`.
///
/// Input labels whose image would leave the truncation get a zero column and
/// are reported by [`QPlateOperator::out_of_range`].
pub fn qplate_op(spec: &QPlateSpec, m_max: u32) -> QPlateOperator {
    let basis = photon_basis(m_max);
    let two_q = spec.two_q;
    let image = |(s, m): BasisLabel| -> (BasisLabel, Complex64) {
        match s {
            Spin::L => ((Spin::R, m + two_q), cis(2.0 * spec.alpha0)),
            Spin::R => ((Spin::L, m - two_q), cis(-2.0 * spec.alpha0)),
        }
    };
    let out_of_range: Vec<BasisLabel> = basis
        .labels()
        .into_iter()
        .filter(|&l| basis.index_of(image(l).0).is_none())
        .collect();
    let op = LinearOp::from_columns(&basis, |l| {
        let (out, amp) = image(l);
        basis.index_of(out).map(|_| (out, amp))
    })
    .expect("images filtered to the basis");
    QPlateOperator {
        spec: *spec,
        op,
        out_of_range,
    }
}

impl QPlateOperator {
    pub fn spec(&self) -> &QPlateSpec {
        &self.spec
    }

    pub fn op(&self) -> &LinearOp<PhotonBasis> {
        &self.op
    }

    pub fn out_of_range(&self) -> &[BasisLabel] {
        &self.out_of_range
    }

    /// Column indices whose image stays inside the truncation.
    pub fn retained_columns(&self) -> Vec<usize> {
        self.op
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| !self.out_of_range.contains(l))
            .map(|(i, _)| i)
            .collect()
    }

    /// Applies the plate, refusing states with weight on labels that would
    /// be shifted past the truncation.
    pub fn apply(&self, s: &PhotonState) -> Result<PhotonState, StateError> {
        if let Some(((spin, m), _)) = s.support().find(|(l, _)| self.out_of_range.contains(l)) {
            let shift = match spin {
                Spin::L => self.spec.two_q,
                Spin::R => -self.spec.two_q,
            };
            return Err(StateError::TruncationOverflow {
                m,
                shift,
                m_max: s.m_max(),
            });
        }
        self.op.apply(s)
    }
}
