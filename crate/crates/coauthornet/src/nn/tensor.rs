//! Dense row-major matrix storage.

use rand::Rng;

use crate::error::{Error, Result};

/// Dense 2-D matrix of `f64`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2D {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor2D {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor2D {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Tensor2D::zeros(n, n);
        for i in 0..n {
            t.set(i, i, 1.0);
        }
        t
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Dimension(format!(
                    "row {i} has length {}, expected {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Tensor2D::from_flat(r, c, data)
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "flat storage of length {} cannot hold a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Dimension(format!(
                "matrix entries must be finite, found {bad}"
            )));
        }
        Ok(Tensor2D { rows, cols, data })
    }

    /// Xavier-uniform initialization with limit `sqrt(6 / (fan_in + fan_out))`
    /// where fan_in = cols and fan_out = rows.
    pub fn xavier_uniform(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-limit..=limit))
            .collect();
        Tensor2D { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `W · x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            out[i] = acc;
        }
        out
    }

    /// `Wᵀ · x`.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "matvec_t shape mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * xi;
            }
        }
        out
    }

    /// `self += scale · g xᵀ` (rank-one update; used for weight gradients).
    pub fn add_outer(&mut self, g: &[f64], x: &[f64], scale: f64) {
        assert_eq!(self.rows, g.len(), "add_outer row mismatch");
        assert_eq!(self.cols, x.len(), "add_outer col mismatch");
        for i in 0..self.rows {
            let gi = g[i] * scale;
            let row = self.row_mut(i);
            for (w, v) in row.iter_mut().zip(x) {
                *w += gi * v;
            }
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Normalize `v` to unit L2 norm in place; the zero vector is left unchanged.
/// Returns the original norm.
pub fn l2_normalize(v: &mut [f64]) -> f64 {
    let n = l2_norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;

    #[test]
    fn matvec_and_transpose_agree_with_hand_values() {
        let w = Tensor2D::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(w.matvec(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        assert_eq!(w.matvec_t(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn outer_update_accumulates() {
        let mut w = Tensor2D::zeros(2, 2);
        w.add_outer(&[1.0, 2.0], &[3.0, 4.0], 0.5);
        assert_eq!(w.row(0), &[1.5, 2.0]);
        assert_eq!(w.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn from_flat_rejects_non_finite() {
        assert!(Tensor2D::from_flat(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Tensor2D::from_flat(1, 3, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn xavier_respects_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = Tensor2D::xavier_uniform(8, 4, &mut rng);
        let limit = (6.0 / 12.0f64).sqrt();
        assert!(t.as_slice().iter().all(|v| v.abs() <= limit));
        // Not all equal: the generator actually ran.
        assert!(t.as_slice().windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn normalize_zero_vector_is_noop() {
        let mut v = vec![0.0, 0.0];
        assert_eq!(l2_normalize(&mut v), 0.0);
        assert_eq!(v, vec![0.0, 0.0]);
    }
}
