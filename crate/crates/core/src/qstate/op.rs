use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::{Basis, Product};
use super::state::State;
use super::StateError;

/// Dense complex operator over an explicit ordered list of labels.
///
/// The label order need not match the canonical order of the state's basis;
/// [`LinearOp::apply`] gathers and scatters amplitudes by label.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp<B: Basis> {
    labels: Vec<B::Label>,
    matrix: DMatrix<Complex64>,
}

impl<B: Basis> LinearOp<B> {
    pub fn new(labels: Vec<B::Label>, matrix: DMatrix<Complex64>) -> Result<Self, StateError> {
        let n = labels.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(StateError::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(LinearOp { labels, matrix })
    }

    /// Operator over the canonical order of `basis`.
    pub fn on_basis(basis: &B, matrix: DMatrix<Complex64>) -> Result<Self, StateError> {
        Self::new(basis.labels(), matrix)
    }

    pub fn identity(basis: &B) -> Self {
        let n = basis.dim();
        LinearOp {
            labels: basis.labels(),
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Diagonal operator with entries given per label.
    pub fn diagonal(basis: &B, f: impl Fn(B::Label) -> Complex64) -> Self {
        let labels = basis.labels();
        let diag: Vec<Complex64> = labels.iter().map(|&l| f(l)).collect();
        LinearOp {
            labels,
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        }
    }

    /// Operator defined column by column: `|label⟩ ↦ f(label)` as a list of
    /// `(output label, amplitude)`. Outputs outside `basis` are an error.
    pub fn from_columns<F, I>(basis: &B, f: F) -> Result<Self, StateError>
    where
        F: Fn(B::Label) -> I,
        I: IntoIterator<Item = (B::Label, Complex64)>,
    {
        let labels = basis.labels();
        let n = labels.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &l) in labels.iter().enumerate() {
            for (out, amp) in f(l) {
                let i = basis
                    .index_of(out)
                    .ok_or_else(|| StateError::OutOfRange(format!("{out:?}")))?;
                m[(i, j)] += amp;
            }
        }
        Ok(LinearOp { labels, matrix: m })
    }

    pub fn labels(&self) -> &[B::Label] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Matrix element `⟨row|op|col⟩`.
    pub fn element(&self, row: B::Label, col: B::Label) -> Option<Complex64> {
        let i = self.labels.iter().position(|&l| l == row)?;
        let j = self.labels.iter().position(|&l| l == col)?;
        Some(self.matrix[(i, j)])
    }

    pub fn adjoint(&self) -> Self {
        LinearOp {
            labels: self.labels.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Self) -> Result<Self, StateError> {
        if self.labels != other.labels {
            return Err(StateError::BasisMismatch("operator label order differs".into()));
        }
        Ok(LinearOp {
            labels: self.labels.clone(),
            matrix: &other.matrix * &self.matrix,
        })
    }

    /// Largest elementwise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let cols: Vec<usize> = (0..self.dim()).collect();
        self.unitarity_defect_on(&cols)
    }

    /// Unitarity defect restricted to the given input columns (the retained
    /// subspace of a truncated operator).
    pub fn unitarity_defect_on(&self, cols: &[usize]) -> f64 {
        let gram = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for &i in cols {
            for &j in cols {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Matrix-vector product in the state's basis.
    pub fn apply(&self, s: &State<B>) -> Result<State<B>, StateError> {
        let basis = s.basis();
        let idx: Vec<usize> = self
            .labels
            .iter()
            .map(|&l| {
                basis
                    .index_of(l)
                    .ok_or_else(|| StateError::BasisMismatch(format!("operator label {l:?}")))
            })
            .collect::<Result<_, _>>()?;
        let covered = {
            let mut c = vec![false; basis.dim()];
            for &i in &idx {
                c[i] = true;
            }
            c
        };
        if let Some((l, _)) = s
            .support()
            .find(|(l, _)| !covered[basis.index_of(*l).expect("support label in basis")])
        {
            return Err(StateError::BasisMismatch(format!(
                "state support {l:?} outside operator basis"
            )));
        }
        let amps = s.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for (r, &ir) in idx.iter().enumerate() {
            out[ir] = idx
                .iter()
                .enumerate()
                .map(|(col, &ic)| self.matrix[(r, col)] * amps[ic])
                .sum();
        }
        State::from_vec(basis.clone(), out)
    }
}

/// `a ⊗ b` over the product basis, row-major labels.
pub fn kron<A: Basis, B: Basis>(a: &LinearOp<A>, b: &LinearOp<B>) -> LinearOp<Product<A, B>> {
    let labels = a
        .labels
        .iter()
        .flat_map(|&la| b.labels.iter().map(move |&lb| (la, lb)))
        .collect();
    LinearOp {
        labels,
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

impl<A: Basis> LinearOp<A> {
    /// `self ⊗ I` acting on the first factor of `Product<A, B>`.
    pub fn on_first<B: Basis>(&self, second: &B) -> LinearOp<Product<A, B>> {
        kron(self, &LinearOp::identity(second))
    }

    /// `I ⊗ self` acting on the second factor of `Product<B, A>`.
    pub fn on_second<B: Basis>(&self, first: &B) -> LinearOp<Product<B, A>> {
        kron(&LinearOp::identity(first), self)
    }
}
