//! Sparse LU with row pivoting, backed by faer's supernodal/simplicial solver.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::MatMut;

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Growth bound above which a factorisation is treated as numerically
/// singular: a pivot below `1e-14·max|A|` inflates solutions by at least that
/// factor.
const MAX_GROWTH: f64 = 1e14;

pub struct Factorization {
    n: usize,
    lu: Lu<usize, f64>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization").field("n", &self.n).finish_non_exhaustive()
    }
}

/// Fixed, reproducible probe right-hand side.
fn probe_rhs(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract()).collect()
}

pub fn lu_factor(a: &SparseMatrix) -> Result<Factorization> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Factorization("empty matrix".into()));
    }
    let triplets: Vec<_> = a.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Internal(format!("sparse conversion: {e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { index } => {
            Error::Factorization(format!("matrix is structurally singular (no pivot in column {index})"))
        }
        LuError::Generic(e) => Error::Factorization(format!("{e:?}")),
    })?;
    let f = Factorization { n, lu };

    // faer does not report tiny pivots, so detect them through growth
    let b = probe_rhs(n);
    let x = f.solve(&b);
    let scale = a.max_abs();
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !x.iter().all(|v| v.is_finite()) || scale * xmax > MAX_GROWTH * 1.5 {
        return Err(Error::Factorization(format!(
            "matrix of size {n} is numerically singular (pivot below 1e-14·max|A|)"
        )));
    }
    Ok(f)
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        self.lu.solve_in_place(MatMut::from_column_major_slice_mut(x, self.n, 1));
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve followed by `steps` rounds of iterative refinement against `a`.
    pub fn solve_refined(&self, a: &SparseMatrix, b: &[f64], steps: usize) -> Vec<f64> {
        let mut x = self.solve(b);
        for _ in 0..steps {
            let ax = a.mul_vec(&x);
            let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            self.solve_in_place(&mut r);
            for (xi, di) in x.iter_mut().zip(&r) {
                *xi += di;
            }
        }
        x
    }
}

/// Factorises and solves in one call.
pub fn lu_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(lu_factor(a)?.solve_refined(a, b, 1))
}
