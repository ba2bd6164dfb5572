use num_complex::Complex64;

use super::basis::{Basis, Product};
use super::state::State;
use super::StateError;

/// Which degree of freedom a projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Spin,
    Oam,
    Joint,
}

/// Rank-one projector `|t⟩⟨t|` onto a unit-norm target.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<B: Basis> {
    target: State<B>,
    subsystem: Subsystem,
}

impl<B: Basis> Projector<B> {
    pub fn new(target: State<B>, subsystem: Subsystem) -> Result<Self, StateError> {
        if !target.is_normalized() {
            return Err(StateError::NotNormalized(target.norm_sqr()));
        }
        Ok(Projector { target, subsystem })
    }

    pub fn target(&self) -> &State<B> {
        &self.target
    }

    pub fn subsystem(&self) -> Subsystem {
        self.subsystem
    }
}

/// Outcome of a projective measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<B: Basis> {
    /// Normalized post-measurement state; the zero vector when `empty`.
    pub state: State<B>,
    pub probability: f64,
    pub empty: bool,
}

impl<B: Basis> Projection<B> {
    fn from_unnormalized(v: State<B>) -> Self {
        let p = v.norm_sqr();
        if p == 0.0 {
            return Projection {
                state: v,
                probability: 0.0,
                empty: true,
            };
        }
        Projection {
            state: v.scaled(Complex64::new(1.0 / p.sqrt(), 0.0)),
            probability: p,
            empty: false,
        }
    }
}

fn require_unit<B: Basis>(s: &State<B>) -> Result<(), StateError> {
    if s.is_normalized() {
        Ok(())
    } else {
        Err(StateError::NotNormalized(s.norm_sqr()))
    }
}

/// Projects `s` with a projector over the same space.
pub fn project<B: Basis>(s: &State<B>, p: &Projector<B>) -> Result<Projection<B>, StateError> {
    require_unit(s)?;
    let overlap = p.target.inner(s);
    Ok(Projection::from_unnormalized(p.target.scaled(overlap)))
}

/// Projects the first factor of a composite state.
pub fn project_first<A: Basis, B: Basis>(
    s: &State<Product<A, B>>,
    p: &Projector<A>,
) -> Result<Projection<Product<A, B>>, StateError> {
    require_unit(s)?;
    let rest = s.contract_first(&p.target)?;
    Ok(Projection::from_unnormalized(super::state::tensor(&p.target, &rest)))
}

/// Projects the second factor of a composite state.
pub fn project_second<A: Basis, B: Basis>(
    s: &State<Product<A, B>>,
    p: &Projector<B>,
) -> Result<Projection<Product<A, B>>, StateError> {
    require_unit(s)?;
    let rest = s.contract_second(&p.target)?;
    Ok(Projection::from_unnormalized(super::state::tensor(&rest, &p.target)))
}
