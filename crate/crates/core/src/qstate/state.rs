use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::basis::{bipartite_basis, photon_basis, Basis, LinearBasis, OamBasis, Pol, Product, Spin, SpinBasis};
use super::StateError;

/// Tolerance used for unit-norm checks throughout the crate.
pub const NORM_TOL: f64 = 1e-12;

/// Dense pure state over an ordered basis.
///
/// States may be unnormalized (intermediate projection results); callers that
/// need a physical ray call [`State::normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct State<B: Basis> {
    basis: B,
    amps: Vec<Complex64>,
}

pub type SpinState = State<SpinBasis>;
pub type LinearSpinState = State<LinearBasis>;
pub type OamState = State<OamBasis>;
pub type PhotonState = State<super::basis::PhotonBasis>;
pub type BipartiteState = State<super::basis::BipartiteBasis>;

impl<B: Basis> State<B> {
    pub fn zero(basis: B) -> Self {
        let amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        State { basis, amps }
    }

    pub fn basis_state(basis: B, label: B::Label) -> Result<Self, StateError> {
        let mut s = Self::zero(basis);
        s.set(label, Complex64::new(1.0, 0.0))?;
        Ok(s)
    }

    /// Builds a state from `(label, amplitude)` pairs; repeated labels add.
    pub fn from_pairs<I>(basis: B, pairs: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = (B::Label, Complex64)>,
    {
        let mut s = Self::zero(basis);
        for (label, amp) in pairs {
            let i = s.index(label)?;
            s.amps[i] += amp;
        }
        Ok(s)
    }

    pub fn from_vec(basis: B, amps: Vec<Complex64>) -> Result<Self, StateError> {
        if amps.len() != basis.dim() {
            return Err(StateError::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        Ok(State { basis, amps })
    }

    pub fn basis(&self) -> &B {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn index(&self, label: B::Label) -> Result<usize, StateError> {
        self.basis
            .index_of(label)
            .ok_or_else(|| StateError::OutOfRange(format!("{label:?}")))
    }

    /// Amplitude at `label`; zero for labels outside the truncated basis.
    pub fn amp(&self, label: B::Label) -> Complex64 {
        self.basis
            .index_of(label)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn set(&mut self, label: B::Label, amp: Complex64) -> Result<(), StateError> {
        let i = self.index(label)?;
        self.amps[i] = amp;
        Ok(())
    }

    /// Nonzero components as `(label, amplitude)`.
    pub fn support(&self) -> impl Iterator<Item = (B::Label, Complex64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (self.basis.label_at(i), *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self, StateError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        State {
            basis: self.basis.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, StateError> {
        self.check_same_basis(other)?;
        Ok(State {
            basis: self.basis.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    ///
    /// Matching is by label, so states over different truncations of the same
    /// space can be compared.
    pub fn inner(&self, other: &Self) -> Complex64 {
        if self.basis == other.basis {
            return self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        }
        self.support().map(|(label, a)| a.conj() * other.amp(label)).sum()
    }

    /// True when the two states describe the same ray: `|⟨a|b⟩| = ‖a‖‖b‖`.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        let ov = self.inner(other).norm();
        (ov - self.norm() * other.norm()).abs() <= tol && self.norm() > 0.0
    }

    /// Largest componentwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.basis
            .labels()
            .into_iter()
            .chain(other.basis.labels())
            .map(|l| (self.amp(l) - other.amp(l)).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_same_basis(&self, other: &Self) -> Result<(), StateError> {
        if self.basis != other.basis {
            return Err(StateError::BasisMismatch(format!(
                "{:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }
}

/// `|a⟩ ⊗ |b⟩`.
pub fn tensor<A: Basis, B: Basis>(a: &State<A>, b: &State<B>) -> State<Product<A, B>> {
    let basis = Product::new(a.basis.clone(), b.basis.clone());
    let amps = a.amps.iter().flat_map(|x| b.amps.iter().map(move |y| x * y)).collect();
    State { basis, amps }
}

impl<A: Basis, B: Basis> State<Product<A, B>> {
    /// Partial inner product with the first factor: `(⟨bra| ⊗ I)|self⟩`.
    pub fn contract_first(&self, bra: &State<A>) -> Result<State<B>, StateError> {
        if bra.basis != self.basis.first {
            return Err(StateError::BasisMismatch("first factor".into()));
        }
        let n = self.basis.second.dim();
        let mut out = State::zero(self.basis.second.clone());
        for (ia, b) in bra.amps.iter().enumerate() {
            let c = b.conj();
            for (ib, o) in out.amps.iter_mut().enumerate() {
                *o += c * self.amps[ia * n + ib];
            }
        }
        Ok(out)
    }

    /// Partial inner product with the second factor: `(I ⊗ ⟨bra|)|self⟩`.
    pub fn contract_second(&self, bra: &State<B>) -> Result<State<A>, StateError> {
        if bra.basis != self.basis.second {
            return Err(StateError::BasisMismatch("second factor".into()));
        }
        let n = self.basis.second.dim();
        let mut out = State::zero(self.basis.first.clone());
        for (ia, o) in out.amps.iter_mut().enumerate() {
            *o = bra
                .amps
                .iter()
                .enumerate()
                .map(|(ib, b)| b.conj() * self.amps[ia * n + ib])
                .sum();
        }
        Ok(out)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl SpinState {
    pub fn spin(s: Spin) -> Self {
        Self::basis_state(SpinBasis, s).expect("spin labels are always in range")
    }

    /// `|H⟩ = (|L⟩ + |R⟩)/√2`.
    pub fn h() -> Self {
        Self::from_vec(SpinBasis, vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).expect("dimension 2")
    }

    /// `|V⟩ = (|L⟩ − |R⟩)/(i√2)`.
    pub fn v() -> Self {
        Self::from_vec(SpinBasis, vec![c(0.0, -FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)]).expect("dimension 2")
    }

    pub fn linear(p: Pol) -> Self {
        match p {
            Pol::H => Self::h(),
            Pol::V => Self::v(),
        }
    }
}

impl OamState {
    pub fn mode(m: i32, m_max: u32) -> Result<Self, StateError> {
        Self::basis_state(OamBasis::new(m_max), m)
    }
}

impl PhotonState {
    pub fn basis_label(spin: Spin, m: i32, m_max: u32) -> Result<Self, StateError> {
        Self::basis_state(photon_basis(m_max), (spin, m))
    }

    pub fn m_max(&self) -> u32 {
        self.basis().second.m_max()
    }

    /// Re-embeds the state in a larger (or smaller) truncation.
    pub fn with_m_max(&self, m_max: u32) -> Result<Self, StateError> {
        Self::from_pairs(photon_basis(m_max), self.support())
    }

    /// Weight carried outside the OAM modes in `modes`.
    pub fn weight_outside(&self, modes: &[i32]) -> f64 {
        self.support()
            .filter(|((_, m), _)| !modes.contains(m))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

impl BipartiteState {
    pub fn m_max(&self) -> u32 {
        self.basis().second.second.m_max()
    }

    pub fn zero_with(m_max: u32) -> Self {
        Self::zero(bipartite_basis(m_max))
    }
}

/// Circular coordinates `(⟨L|p⟩, ⟨R|p⟩)` of a linear polarization.
fn linear_in_circular(p: Pol) -> [Complex64; 2] {
    let s = SpinState::linear(p);
    [s.amps[0], s.amps[1]]
}

/// Expresses a circular-basis spin state in the (H, V) basis.
pub fn circular_to_linear(s: &SpinState) -> LinearSpinState {
    let amps = [Pol::H, Pol::V]
        .iter()
        .map(|&p| {
            let col = linear_in_circular(p);
            col[0].conj() * s.amps[0] + col[1].conj() * s.amps[1]
        })
        .collect();
    State::from_vec(LinearBasis, amps).expect("dimension 2")
}

/// Expresses an (H, V)-basis spin state in the circular basis.
pub fn linear_to_circular(s: &LinearSpinState) -> SpinState {
    let h = linear_in_circular(Pol::H);
    let v = linear_in_circular(Pol::V);
    let amps = (0..2).map(|i| h[i] * s.amps[0] + v[i] * s.amps[1]).collect();
    State::from_vec(SpinBasis, amps).expect("dimension 2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::basis::OamBasis;
    use approx::assert_abs_diff_eq;

    const S: f64 = FRAC_1_SQRT_2;

    #[test]
    fn tensor_of_basis_states() {
        let s = tensor(&SpinState::spin(Spin::L), &OamState::mode(0, 2).unwrap());
        assert_eq!(s.amp((Spin::L, 0)), c(1.0, 0.0));
        assert_abs_diff_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.support().count(), 1);
    }

    #[test]
    fn tensor_of_h_with_oam_two() {
        let s = tensor(&SpinState::h(), &OamState::mode(2, 2).unwrap());
        assert_abs_diff_eq!(s.amp((Spin::L, 2)).re, S, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amp((Spin::R, 2)).re, S, epsilon = 1e-15);
        assert_eq!(s.support().count(), 2);
    }

    #[test]
    fn tensor_h_h_in_circular_basis() {
        let hh = tensor(&SpinState::h(), &SpinState::h());
        for a in Spin::ALL {
            for b in Spin::ALL {
                assert_abs_diff_eq!(hh.amp((a, b)).re, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(hh.amp((a, b)).im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn tensor_norm_is_product_of_norms() {
        let a = SpinState::h().scaled(c(2.0, 0.0));
        let b = OamState::from_pairs(OamBasis::new(1), [(1, c(0.0, 3.0))]).unwrap();
        assert_abs_diff_eq!(tensor(&a, &b).norm(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_basics() {
        let l = PhotonState::basis_label(Spin::L, 0, 2).unwrap();
        let r = PhotonState::basis_label(Spin::R, 0, 2).unwrap();
        assert_eq!(l.inner(&l), c(1.0, 0.0));
        assert_eq!(l.inner(&r), c(0.0, 0.0));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let a = SpinState::h().scaled(c(0.0, 1.0));
        let b = SpinState::h();
        assert_abs_diff_eq!(a.inner(&b).im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_across_truncations() {
        let a = PhotonState::basis_label(Spin::L, 1, 1).unwrap();
        let b = PhotonState::basis_label(Spin::L, 1, 4).unwrap();
        assert_eq!(a.inner(&b), c(1.0, 0.0));
    }

    #[test]
    fn h_to_circular() {
        let h = SpinState::h();
        assert_abs_diff_eq!(h.amp(Spin::L).re, S);
        assert_abs_diff_eq!(h.amp(Spin::R).re, S);
        let lin = circular_to_linear(&h);
        assert_abs_diff_eq!(lin.amp(Pol::H).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lin.amp(Pol::V).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn l_in_linear_basis_is_h_plus_i_v() {
        // Inverting H=(L+R)/√2, V=(L−R)/(i√2) by hand: L = (H + iV)/√2.
        let lin = circular_to_linear(&SpinState::spin(Spin::L));
        assert_abs_diff_eq!((lin.amp(Pol::H) - c(S, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((lin.amp(Pol::V) - c(0.0, S)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn v_round_trip_keeps_phase() {
        let v = SpinState::v();
        let back = linear_to_circular(&circular_to_linear(&v));
        assert!(back.max_abs_diff(&v) < 1e-15);
    }

    #[test]
    fn bell_state_in_circular_basis() {
        // (|H⟩|H⟩ + |V⟩|V⟩)/√2 = (|L⟩|R⟩ + |R⟩|L⟩)/√2
        let hh = tensor(&SpinState::h(), &SpinState::h());
        let vv = tensor(&SpinState::v(), &SpinState::v());
        let bell = hh.add(&vv).unwrap().scaled(c(S, 0.0));
        let expect = State::from_pairs(
            Product::new(SpinBasis, SpinBasis),
            [((Spin::L, Spin::R), c(S, 0.0)), ((Spin::R, Spin::L), c(S, 0.0))],
        )
        .unwrap();
        assert!(bell.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn normalize_zero_state_fails() {
        let z = PhotonState::zero(photon_basis(1));
        assert_eq!(z.normalized(), Err(StateError::ZeroNorm));
    }

    #[test]
    fn out_of_range_label_rejected() {
        assert!(matches!(
            PhotonState::basis_label(Spin::L, 3, 2),
            Err(StateError::OutOfRange(_))
        ));
    }

    #[test]
    fn contract_first_picks_conditional_state() {
        let s = tensor(&SpinState::h(), &PhotonState::basis_label(Spin::L, 0, 1).unwrap());
        let bob = s.contract_first(&SpinState::h()).unwrap();
        assert_abs_diff_eq!(bob.amp((Spin::L, 0)).re, 1.0, epsilon = 1e-15);
        let none = s.contract_first(&SpinState::v()).unwrap();
        assert_abs_diff_eq!(none.norm(), 0.0, epsilon = 1e-15);
    }
}
