use alloc::vec::Vec;
use nalgebra::DMatrix;

/// Compressed sparse row matrix, just enough for reservoir recurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut row_ptr = Vec::with_capacity(m.nrows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `out[r] = Σ_c A[r,c]·x[c]`
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// Largest eigenvalue modulus.
///
/// Exact (real Schur form) up to 256 rows. Above that the Schur sweep gets
/// slow, so the radius is estimated from the geometric-mean growth rate of a
/// normalized power iteration, which converges to the radius even when the
/// dominant eigenvalues are a complex pair.
pub fn spectral_radius(m: &SparseMatrix) -> f64 {
    if m.nrows() == 0 || m.nnz() == 0 {
        return 0.0;
    }
    if m.nrows() <= 256 {
        let dense = m.to_dense();
        return dense
            .complex_eigenvalues()
            .iter()
            .map(|z| libm::hypot(z.re, z.im))
            .fold(0.0, f64::max);
    }
    let n = m.nrows();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
    let mut y = alloc::vec![0.0; n];
    let (iters, keep) = (600usize, 300usize);
    let mut log_growth = 0.0;
    for it in 0..iters {
        m.mul_vec_into(&x, &mut y);
        let norm = libm::sqrt(y.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return 0.0;
        }
        if it >= iters - keep {
            log_growth += libm::log(norm);
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    libm::exp(log_growth / keep as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_matvec() {
        let d = DMatrix::from_row_slice(2, 3, &[0.0, 2.0, 0.0, 1.0, 0.0, -1.0]);
        let s = SparseMatrix::from_dense(&d);
        assert_eq!(s.nnz(), 3);
        assert_eq!(s.to_dense(), d);
        let mut out = [0.0; 2];
        s.mul_vec_into(&[1.0, 2.0, 3.0], &mut out);
        assert_eq!(out, [4.0, -2.0]);
    }

    #[test]
    fn radius_of_rotation_is_its_scale() {
        // complex pair ±0.5i
        let d = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0]);
        let r = spectral_radius(&SparseMatrix::from_dense(&d));
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn power_estimate_matches_scaled_cycle() {
        // 300-cycle with weight 0.7: every eigenvalue has modulus 0.7
        let n = 300;
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, (i + n - 1) % n)] = 0.7;
        }
        let r = spectral_radius(&SparseMatrix::from_dense(&d));
        assert!((r - 0.7).abs() < 1e-6, "{r}");
    }
}
