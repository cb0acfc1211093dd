use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Square matrix in compressed sparse row form with sorted, unique column
/// indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds an `n × n` matrix, summing duplicate entries.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= n || *j >= n) {
            return Err(Error::Internal(format!("triplet ({i}, {j}) outside a {n}×{n} matrix")));
        }
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Internal(format!("row {i} has length {}, expected {n}", row.len())));
            }
            t.extend(row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(n, t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖A‖_∞`, the largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `y = A x`. Rows are independent, so the parallel split does not change
    /// the result.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.par_iter_mut().with_min_len(512).enumerate().for_each(|(i, yi)| {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        });
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.n, self.triplets().map(|(i, j, v)| (j, i, v)).collect())
            .expect("transpose keeps indices in range")
    }

    /// Largest `|a_ij − a_ji|` relative to `max |a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (i, j, v) in self.triplets() {
            worst = worst.max((v - t.get(i, j)).abs());
        }
        for (i, j, v) in t.triplets() {
            worst = worst.max((v - self.get(i, j)).abs());
        }
        worst / scale
    }

    /// Principal submatrix on `indices` (local index `k` ↔ global `indices[k]`).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.n];
        for (k, &g) in indices.iter().enumerate() {
            local[g] = k;
        }
        let mut t = Vec::new();
        for (k, &g) in indices.iter().enumerate() {
            let (c, v) = self.row(g);
            for (&j, &x) in c.iter().zip(v) {
                if local[j] != usize::MAX {
                    t.push((k, local[j], x));
                }
            }
        }
        Self::from_triplets(indices.len(), t).expect("local indices are in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// MatrixMarket coordinate text, one-based indices.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(s, "{} {} {}", self.n, self.n, self.nnz());
        for (i, j, v) in self.triplets() {
            let _ = writeln!(s, "{} {} {:.17e}", i + 1, j + 1, v);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let a = SparseMatrix::from_triplets(3, vec![(0, 2, 1.0), (0, 0, 2.0), (0, 2, 3.0), (2, 1, -1.0)]).unwrap();
        assert_eq!(a.row(0), (&[0, 2][..], &[2.0, 4.0][..]));
        assert_eq!(a.row(1).0.len(), 0);
        assert_eq!(a.get(2, 1), -1.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 3);
        assert!(a.row_ptr().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(SparseMatrix::from_triplets(2, vec![(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn matvec_matches_dense() {
        let rows = vec![vec![1.0, 2.0, 0.0], vec![0.0, 3.0, -1.0], vec![4.0, 0.0, 5.0]];
        let a = SparseMatrix::from_dense(&rows).unwrap();
        let y = a.mul_vec(&[1.0, -1.0, 2.0]);
        assert_eq!(y, vec![-1.0, -5.0, 14.0]);
        assert_eq!(a.to_dense(), rows);
        assert_eq!(a.norm_inf(), 9.0);
    }

    #[test]
    fn submatrix_and_symmetry() {
        let a = SparseMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 5.0, 2.0],
            vec![0.0, 2.0, 6.0],
        ])
        .unwrap();
        assert_eq!(a.asymmetry(), 0.0);
        let s = a.principal_submatrix(&[2, 1]);
        assert_eq!(s.to_dense(), vec![vec![6.0, 2.0], vec![2.0, 5.0]]);
        let b = SparseMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap();
        assert_eq!(b.asymmetry(), 1.0);
    }

    #[test]
    fn matrix_market_header() {
        let mm = SparseMatrix::identity(2).to_matrix_market();
        let mut lines = mm.lines();
        assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real general"));
        assert_eq!(lines.next(), Some("2 2 2"));
        assert!(lines.next().unwrap().starts_with("1 1 1.0"));
    }
}
