//! Ordered bases for the photon's degrees of freedom.
//!
//! A basis is a small value object that knows its dimension and how to map
//! labels to dense indices. Composite spaces are built with [`Product`], whose
//! labels are pairs and whose index order is row-major (first factor outer).

use std::fmt;

use serde::{Deserialize, Serialize};

/// Circular polarization (spin) of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    /// Left-handed circular polarization.
    L,
    /// Right-handed circular polarization.
    R,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::L, Spin::R];

    pub fn flipped(self) -> Spin {
        match self {
            Spin::L => Spin::R,
            Spin::R => Spin::L,
        }
    }

    fn index(self) -> usize {
        match self {
            Spin::L => 0,
            Spin::R => 1,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::L => f.write_str("L"),
            Spin::R => f.write_str("R"),
        }
    }
}

/// Linear polarization label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

/// Output arm / port of a two-path interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arm {
    Zero,
    One,
}

impl Arm {
    pub const ALL: [Arm; 2] = [Arm::Zero, Arm::One];

    pub fn other(self) -> Arm {
        match self {
            Arm::Zero => Arm::One,
            Arm::One => Arm::Zero,
        }
    }
}

pub trait Basis: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Label: Copy + PartialEq + fmt::Debug + Send + Sync;

    fn dim(&self) -> usize;

    /// Dense index of `label`, or `None` when the label lies outside the
    /// (possibly truncated) basis.
    fn index_of(&self, label: Self::Label) -> Option<usize>;

    fn label_at(&self, index: usize) -> Self::Label;

    fn labels(&self) -> Vec<Self::Label> {
        (0..self.dim()).map(|i| self.label_at(i)).collect()
    }
}

/// Circular spin basis, ordered (L, R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpinBasis;

impl Basis for SpinBasis {
    type Label = Spin;

    fn dim(&self) -> usize {
        2
    }

    fn index_of(&self, label: Spin) -> Option<usize> {
        Some(label.index())
    }

    fn label_at(&self, index: usize) -> Spin {
        Spin::ALL[index]
    }
}

/// Linear polarization basis, ordered (H, V).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LinearBasis;

impl Basis for LinearBasis {
    type Label = Pol;

    fn dim(&self) -> usize {
        2
    }

    fn index_of(&self, label: Pol) -> Option<usize> {
        Some(match label {
            Pol::H => 0,
            Pol::V => 1,
        })
    }

    fn label_at(&self, index: usize) -> Pol {
        [Pol::H, Pol::V][index]
    }
}

/// OAM eigenstates `|m⟩` truncated to `|m| <= m_max`, ordered by increasing m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OamBasis {
    m_max: u32,
}

impl OamBasis {
    pub fn new(m_max: u32) -> Self {
        OamBasis { m_max }
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn contains(&self, m: i32) -> bool {
        m.unsigned_abs() <= self.m_max
    }
}

impl Basis for OamBasis {
    type Label = i32;

    fn dim(&self) -> usize {
        2 * self.m_max as usize + 1
    }

    fn index_of(&self, m: i32) -> Option<usize> {
        self.contains(m)
            .then(|| (i64::from(m) + i64::from(self.m_max)) as usize)
    }

    fn label_at(&self, index: usize) -> i32 {
        index as i32 - self.m_max as i32
    }
}

/// The two arms of an interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathBasis;

impl Basis for PathBasis {
    type Label = Arm;

    fn dim(&self) -> usize {
        2
    }

    fn index_of(&self, label: Arm) -> Option<usize> {
        Some(match label {
            Arm::Zero => 0,
            Arm::One => 1,
        })
    }

    fn label_at(&self, index: usize) -> Arm {
        Arm::ALL[index]
    }
}

/// Tensor product of two bases, labels `(a, b)`, row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Product<A, B> {
    pub first: A,
    pub second: B,
}

impl<A: Basis, B: Basis> Product<A, B> {
    pub fn new(first: A, second: B) -> Self {
        Product { first, second }
    }
}

impl<A: Basis, B: Basis> Basis for Product<A, B> {
    type Label = (A::Label, B::Label);

    fn dim(&self) -> usize {
        self.first.dim() * self.second.dim()
    }

    fn index_of(&self, (a, b): Self::Label) -> Option<usize> {
        let ia = self.first.index_of(a)?;
        let ib = self.second.index_of(b)?;
        Some(ia * self.second.dim() + ib)
    }

    fn label_at(&self, index: usize) -> Self::Label {
        let n = self.second.dim();
        (self.first.label_at(index / n), self.second.label_at(index % n))
    }
}

/// Single-photon spin ⊗ OAM space.
pub type PhotonBasis = Product<SpinBasis, OamBasis>;

/// A basis label of [`PhotonBasis`]: `(spin, m)`.
pub type BasisLabel = (Spin, i32);

/// Alice's spin ⊗ Bob's spin ⊗ OAM.
pub type BipartiteBasis = Product<SpinBasis, PhotonBasis>;

/// Interferometer arm ⊗ spin ⊗ OAM.
pub type ArmPhotonBasis = Product<PathBasis, PhotonBasis>;

pub fn photon_basis(m_max: u32) -> PhotonBasis {
    Product::new(SpinBasis, OamBasis::new(m_max))
}

pub fn bipartite_basis(m_max: u32) -> BipartiteBasis {
    Product::new(SpinBasis, photon_basis(m_max))
}

pub fn arm_photon_basis(m_max: u32) -> ArmPhotonBasis {
    Product::new(PathBasis, photon_basis(m_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oam_indexing_round_trips() {
        let b = OamBasis::new(3);
        assert_eq!(b.dim(), 7);
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.label_at(i)), Some(i));
        }
        assert_eq!(b.index_of(4), None);
        assert_eq!(b.index_of(-4), None);
        assert_eq!(b.index_of(-3), Some(0));
    }

    #[test]
    fn product_is_row_major() {
        let b = photon_basis(2);
        assert_eq!(b.dim(), 10);
        assert_eq!(b.index_of((Spin::L, -2)), Some(0));
        assert_eq!(b.index_of((Spin::R, -2)), Some(5));
        assert_eq!(b.label_at(9), (Spin::R, 2));
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.label_at(i)), Some(i));
        }
    }
}
