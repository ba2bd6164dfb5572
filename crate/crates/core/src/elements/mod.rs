//! Optical elements compiled to operators: the q-plate and its orientation
//! field, wave plates, beam splitters, Dove prisms, fiber filter and mirror.

mod field;
mod optics;
mod qplate;

use thiserror::Error;

pub use field::{orientation_field, symmetry_angle, symmetry_order, OrientationField, Symmetry};
pub use optics::{
    bs_op, dove_arms_op, dove_pair_op, in_arm, in_both_arms, interior_columns, mirror_op, pbs_op, polarizer_op,
    smf_filter, smf_filter_op, waveplate_op, Element, WaveplateKind,
};
pub use qplate::{qplate_op, transmission_matrix, QPlateOperator, QPlateSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElementError {
    #[error("q = {0} is not a half-integer (2q must be an integer)")]
    NonIntegerTwoQ(f64),
    #[error("{0} is not finite")]
    NonFiniteAngle(&'static str),
    #[error("orientation grid needs at least one radius and one azimuth")]
    EmptyGrid,
    #[error("{0} is a two-port element and has no single-path operator")]
    TwoPort(&'static str),
}
