//! Small dense linear algebra over `f64` and exact dyadic rationals.

mod dyadic;
mod permutation;
mod real;

pub use dyadic::{DyadicMatrix, DyadicRational};
pub use permutation::Permutation;
pub use real::{diag_inv_sqrt, frobenius_distance, is_diagonal, RealMatrix};

/// Default tolerance for floating-point structural checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A square matrix that is either exactly dyadic or general real.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Dyadic(DyadicMatrix),
    Real(RealMatrix),
}

impl Matrix {
    pub fn n(&self) -> usize {
        match self {
            Matrix::Dyadic(m) => m.n(),
            Matrix::Real(m) => m.n(),
        }
    }

    pub fn to_real(&self) -> RealMatrix {
        match self {
            Matrix::Dyadic(m) => m.to_real(),
            Matrix::Real(m) => m.clone(),
        }
    }

    pub fn as_dyadic(&self) -> Option<&DyadicMatrix> {
        match self {
            Matrix::Dyadic(m) => Some(m),
            Matrix::Real(_) => None,
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Matrix::Dyadic(_))
    }

    pub fn is_generalized_permutation(&self) -> bool {
        match self {
            Matrix::Dyadic(m) => m.is_generalized_permutation(),
            Matrix::Real(m) => m.is_generalized_permutation(DEFAULT_TOL),
        }
    }

    /// Product of two matrices, exact when both sides are dyadic.
    pub fn mul(&self, other: &Matrix) -> crate::Result<Matrix> {
        match (self, other) {
            (Matrix::Dyadic(a), Matrix::Dyadic(b)) => Ok(Matrix::Dyadic(a.checked_mul(b)?)),
            _ => Ok(Matrix::Real(self.to_real().matmul(&other.to_real())?)),
        }
    }

    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        match (a, b) {
            (Matrix::Dyadic(a), Matrix::Dyadic(b)) => Matrix::Dyadic(DyadicMatrix::block_diag(&[a, b])),
            _ => Matrix::Real(RealMatrix::block_diag(&[&a.to_real(), &b.to_real()])),
        }
    }
}

impl From<DyadicMatrix> for Matrix {
    fn from(m: DyadicMatrix) -> Self {
        Matrix::Dyadic(m)
    }
}

impl From<RealMatrix> for Matrix {
    fn from(m: RealMatrix) -> Self {
        Matrix::Real(m)
    }
}
