//! Streaming moment sums over trajectory samples.
//!
//! Phase-space averages are normally ordered. Converting to symmetric
//! operator moments adds the vacuum contribution `[a, a†] = 1` to every
//! single-mode quadrature variance:
//!
//! ```text
//! V(X_i)      = 1 + <dX_i dX_i>_P
//! V(X_i, X_j) =     <dX_i dX_j>_P      (i != j)
//! V(X_i, Y_j) =     <dX_i dY_j>_P      (normal and symmetric order agree)
//! ```
//!
//! and likewise for `Y`. Getting this wrong shifts every witness by a
//! constant, so it is done in exactly one place: [`MomentSums::table`].

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::state::PPState;
use crate::error::{Error, Result};
use crate::gaussian::MomentTable;

/// Sums of first and second quadrature moments over a set of samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentSums {
    pub count: u64,
    sum_x: [C64; 3],
    sum_y: [C64; 3],
    sum_xx: [[f64; 3]; 3],
    sum_yy: [[f64; 3]; 3],
    sum_xy: [[f64; 3]; 3],
    sum_alpha: [C64; 3],
    sum_alpha_plus: [C64; 3],
}

impl MomentSums {
    pub fn add_sample(&mut self, s: &PPState) {
        let (x, y) = s.quadratures();
        self.count += 1;
        for i in 0..3 {
            self.sum_x[i] += x[i];
            self.sum_y[i] += y[i];
            self.sum_alpha[i] += s.alpha[i];
            self.sum_alpha_plus[i] += s.alpha_plus[i];
            for j in 0..3 {
                self.sum_xx[i][j] += (x[i] * x[j]).re;
                self.sum_yy[i][j] += (y[i] * y[j]).re;
                self.sum_xy[i][j] += (x[i] * y[j]).re;
            }
        }
    }

    pub fn merge(&mut self, other: &MomentSums) {
        self.count += other.count;
        for i in 0..3 {
            self.sum_x[i] += other.sum_x[i];
            self.sum_y[i] += other.sum_y[i];
            self.sum_alpha[i] += other.sum_alpha[i];
            self.sum_alpha_plus[i] += other.sum_alpha_plus[i];
            for j in 0..3 {
                self.sum_xx[i][j] += other.sum_xx[i][j];
                self.sum_yy[i][j] += other.sum_yy[i][j];
                self.sum_xy[i][j] += other.sum_xy[i][j];
            }
        }
    }

    pub fn mean_alpha(&self) -> [C64; 3] {
        let n = self.count as f64;
        self.sum_alpha.map(|z| z / n)
    }

    pub fn mean_alpha_plus(&self) -> [C64; 3] {
        let n = self.count as f64;
        self.sum_alpha_plus.map(|z| z / n)
    }

    /// Operator moment table, including the normal-ordering correction.
    pub fn table(&self) -> Result<MomentTable> {
        if self.count == 0 {
            return Err(Error::InvalidTable("no samples".into()));
        }
        let n = self.count as f64;
        let mx = self.sum_x.map(|z| z / n);
        let my = self.sum_y.map(|z| z / n);
        let cov = |sums: &[[f64; 3]; 3], a: &[C64; 3], b: &[C64; 3], i: usize, j: usize| {
            sums[i][j] / n - (a[i] * b[j]).re
        };
        let vxx = DMatrix::from_fn(3, 3, |i, j| cov(&self.sum_xx, &mx, &mx, i, j) + if i == j { 1.0 } else { 0.0 });
        let vyy = DMatrix::from_fn(3, 3, |i, j| cov(&self.sum_yy, &my, &my, i, j) + if i == j { 1.0 } else { 0.0 });
        let vxy = DMatrix::from_fn(3, 3, |i, j| cov(&self.sum_xy, &mx, &my, i, j));
        MomentTable::from_blocks(vxx, vyy, vxy)
    }
}

/// Moment sums per output grid point and per batch.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleAccumulator {
    batches: Vec<Vec<MomentSums>>,
}

impl EnsembleAccumulator {
    pub fn new(batch_count: usize, grid_points: usize) -> Self {
        Self { batches: vec![vec![MomentSums::default(); grid_points]; batch_count] }
    }

    pub fn batch_count(&self) -> usize {
        self.batches.len()
    }

    pub fn grid_points(&self) -> usize {
        self.batches.first().map_or(0, Vec::len)
    }

    /// Adds one trajectory's samples (one per grid point) to `batch`.
    pub fn add_trajectory(&mut self, batch: usize, samples: &[PPState]) {
        for (sums, s) in self.batches[batch].iter_mut().zip(samples) {
            sums.add_sample(s);
        }
    }

    /// Folds `other` into `self` batch by batch.
    pub fn merge(&mut self, other: &EnsembleAccumulator) {
        for (mine, theirs) in self.batches.iter_mut().zip(&other.batches) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.merge(b);
            }
        }
    }

    pub fn set_batch(&mut self, batch: usize, sums: Vec<MomentSums>) {
        self.batches[batch] = sums;
    }

    pub fn batch(&self, batch: usize, point: usize) -> &MomentSums {
        &self.batches[batch][point]
    }

    /// All batches combined at one grid point, summed in batch order.
    pub fn pooled(&self, point: usize) -> MomentSums {
        let mut total = MomentSums::default();
        for b in &self.batches {
            total.merge(&b[point]);
        }
        total
    }
}
