//! State vectors and operators over the single-photon spin ⊗ OAM space and
//! its two-photon and interferometer extensions.

mod basis;
mod op;
mod projector;
mod state;

use thiserror::Error;

pub use basis::{
    arm_photon_basis, bipartite_basis, photon_basis, Arm, ArmPhotonBasis, Basis, BasisLabel, BipartiteBasis,
    LinearBasis, OamBasis, PathBasis, PhotonBasis, Pol, Product, Spin, SpinBasis,
};
pub use op::{kron, LinearOp};
pub use projector::{project, project_first, project_second, Projection, Projector, Subsystem};
pub use state::{
    circular_to_linear, linear_to_circular, tensor, BipartiteState, LinearSpinState, OamState, PhotonState, SpinState,
    State, NORM_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("label {0} lies outside the truncated basis")]
    OutOfRange(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("OAM shift by {shift} from m={m} exceeds truncation M_max={m_max}")]
    TruncationOverflow { m: i32, shift: i32, m_max: u32 },
}
