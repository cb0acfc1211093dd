//! Sparse storage, direct factorisation and preconditioned GMRES.

mod gmres;
mod lu;
mod sparse;

pub use gmres::{arnoldi, gmres, GmresOptions, KrylovReport, Stop};
pub use lu::{lu_factor, lu_solve, Factorization};
pub use sparse::SparseMatrix;

pub type Vector = Vec<f64>;

/// Anything that maps `x ↦ y` on vectors of a fixed dimension.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// The identity on `ℝⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        SparseMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y);
    }
}

impl LinearOperator for Factorization {
    fn dim(&self) -> usize {
        Factorization::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.solve_in_place(y);
    }
}
