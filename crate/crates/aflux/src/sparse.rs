//! Compressed sparse row matrices with deterministic assembly.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Square (or rectangular) sparse matrix in CSR layout. Column indices are
/// strictly increasing within each row; assembly from triplets sums
/// duplicates in sorted order, so identical input always produces bitwise
/// identical matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::ShapeMismatch(alloc::format!(
                    "triplet ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by(|&a, &b| {
            (triplets[a].0, triplets[a].1, a).cmp(&(triplets[b].0, triplets[b].1, b))
        });
        let mut rows = Vec::with_capacity(triplets.len());
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        for &k in &order {
            let (r, c, v) = triplets[k];
            match (rows.last(), col_idx.last()) {
                (Some(&lr), Some(&lc)) if lr == r && lc == c => {
                    *values.last_mut().unwrap() += v;
                }
                _ => {
                    rows.push(r);
                    col_idx.push(c);
                    values.push(v);
                }
            }
        }
        let mut row_ptr = vec![0usize; n_rows + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals.iter()) {
                acc += v * x[*c];
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `M = I - alpha * A` (square matrices only). The result keeps
    /// deterministic sorted-column layout.
    pub fn identity_minus_scaled(&self, alpha: f64) -> Result<CsrMatrix> {
        if self.n_rows != self.n_cols {
            return Err(Error::ShapeMismatch(alloc::format!(
                "identity_minus_scaled on {}x{}",
                self.n_rows,
                self.n_cols
            )));
        }
        let mut triplets: Vec<(usize, usize, f64)> =
            Vec::with_capacity(self.nnz() + self.n_rows);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            let mut has_diag = false;
            for (c, v) in cols.iter().zip(vals.iter()) {
                let mut m = -alpha * v;
                if *c == r {
                    m += 1.0;
                    has_diag = true;
                }
                triplets.push((r, *c, m));
            }
            if !has_diag {
                triplets.push((r, r, 1.0));
            }
        }
        CsrMatrix::from_triplets(self.n_rows, self.n_cols, &triplets)
    }

    /// Lower and upper bandwidths `(kl, ku)`.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0usize;
        let mut ku = 0usize;
        for r in 0..self.n_rows {
            let (cols, _) = self.row(r);
            for &c in cols {
                if c < r {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
        (kl, ku)
    }

    /// Iterate all stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals.iter())
                .map(move |(c, v)| (r, *c, *v))
        })
    }

    /// Sum of each column restricted to a set of rows (used by the
    /// conservation-structure checks).
    pub fn column_sums_over_rows(&self, rows: impl Iterator<Item = usize>) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols];
        for r in rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals.iter()) {
                sums[*c] += v;
            }
        }
        sums
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembly_sorts_and_sums_duplicates() {
        let t = [
            (1usize, 2usize, 1.0),
            (0, 0, 2.0),
            (1, 0, 3.0),
            (1, 2, 0.5),
            (2, 1, -1.0),
        ];
        let a = CsrMatrix::from_triplets(3, 3, &t).unwrap();
        assert_eq!(a.nnz(), 4);
        let (cols, vals) = a.row(1);
        assert_eq!(cols, &[0, 2]);
        assert_eq!(vals, &[3.0, 1.5]);
        let y = a.matvec(&[1.0, 1.0, 1.0]);
        assert_eq!(y, alloc::vec![2.0, 4.5, -1.0]);
    }

    #[test]
    fn empty_rows_are_fine() {
        let a = CsrMatrix::from_triplets(4, 4, &[(0, 0, 1.0), (3, 3, 2.0)]).unwrap();
        let y = a.matvec(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(y, alloc::vec![1.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn identity_minus_scaled_matches_matvec() {
        let t = [
            (0usize, 1usize, 2.0),
            (1, 0, -1.0),
            (1, 1, 4.0),
            (2, 2, 1.0),
            (2, 0, 5.0),
        ];
        let a = CsrMatrix::from_triplets(3, 3, &t).unwrap();
        let m = a.identity_minus_scaled(0.1).unwrap();
        let x = [1.0, -2.0, 3.0];
        let ax = a.matvec(&x);
        let mx = m.matvec(&x);
        for i in 0..3 {
            assert!((mx[i] - (x[i] - 0.1 * ax[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn bandwidths_reported() {
        let a = CsrMatrix::from_triplets(4, 4, &[(0, 2, 1.0), (3, 1, 1.0)]).unwrap();
        assert_eq!(a.bandwidths(), (2, 2));
    }

    #[test]
    fn out_of_range_triplets_rejected() {
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }
}
