//! Forward-difference image gradient with Neumann boundary and the skew
//! saddle-point operator `[[0, Kᵀ], [−K, 0]]` built from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::MonotoneOperator;
use crate::scalar::Real;

/// Discrete gradient of a `rows × cols` image stored row-major. Output holds
/// two channels per pixel: `(u[i+1,j] − u[i,j], u[i,j+1] − u[i,j])`, each
/// zero on the last row/column.
pub fn gradient<T: Real>(rows: usize, cols: usize, u: &[T]) -> Vec<T> {
    assert_eq!(u.len(), rows * cols);
    let mut g = vec![T::zero(); 2 * rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let p = i * cols + j;
            if i + 1 < rows {
                g[2 * p] = u[p + cols] - u[p];
            }
            if j + 1 < cols {
                g[2 * p + 1] = u[p + 1] - u[p];
            }
        }
    }
    g
}

/// Adjoint of [`gradient`], i.e. `Kᵀφ` (the negative divergence).
pub fn divergence_adjoint<T: Real>(rows: usize, cols: usize, phi: &[T]) -> Vec<T> {
    assert_eq!(phi.len(), 2 * rows * cols);
    let mut out = vec![T::zero(); rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let p = i * cols + j;
            if i + 1 < rows {
                out[p + cols] += phi[2 * p];
                out[p] -= phi[2 * p];
            }
            if j + 1 < cols {
                out[p + 1] += phi[2 * p + 1];
                out[p] -= phi[2 * p + 1];
            }
        }
    }
    out
}

/// Orthonormal DCT-II basis (columns) and the matching eigenvalues
/// `2 − 2cos(πk/n)` of the 1-D Neumann difference Gram matrix.
fn neumann_basis<T: Real>(n: usize) -> (DenseMatrix<T>, Vec<T>) {
    let q = DenseMatrix::from_fn(n, n, |i, k| {
        let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        T::lit(s * (PI * k as f64 * (i as f64 + 0.5) / n as f64).cos())
    });
    let eig = (0..n).map(|k| T::lit(2.0 - 2.0 * (PI * k as f64 / n as f64).cos())).collect();
    (q, eig)
}

/// `B(u, φ) = (Kᵀφ, −Ku)` on the product space `R^{rc} × R^{2rc}`.
///
/// The resolvent reduces to `(I + t²KᵀK)x = a − tKᵀb`, which is diagonal in
/// the separable DCT-II basis, so each evaluation costs two small dense
/// transforms regardless of `t`.
#[derive(Debug, Clone)]
pub struct GradientSkewOperator<T> {
    rows: usize,
    cols: usize,
    q_rows: DenseMatrix<T>,
    q_cols: DenseMatrix<T>,
    eig_rows: Vec<T>,
    eig_cols: Vec<T>,
}

impl<T: Real> GradientSkewOperator<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        let (q_rows, eig_rows) = neumann_basis(rows);
        let (q_cols, eig_cols) = neumann_basis(cols);
        Self { rows, cols, q_rows, q_cols, eig_rows, eig_cols }
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    /// Solves `(I + s·KᵀK) x = rhs` for an image-shaped `rhs`.
    fn solve_shifted_laplacian(&self, s: T, rhs: &[T]) -> Vec<T> {
        let x = DenseMatrix::from_row_major(self.rows, self.cols, rhs.to_vec()).expect("image shape");
        let mut hat = self.q_rows.transpose().matmul(&x).matmul(&self.q_cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                hat[(i, j)] /= T::one() + s * (self.eig_rows[i] + self.eig_cols[j]);
            }
        }
        self.q_rows.matmul(&hat).matmul(&self.q_cols.transpose()).as_slice().to_vec()
    }
}

impl<T: Real> MonotoneOperator<T> for GradientSkewOperator<T> {
    fn dim(&self) -> usize {
        3 * self.pixels()
    }

    fn label(&self) -> &str {
        "gradient_skew"
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        let n = self.pixels();
        let (a, b) = x.split_at(n);
        let ktb = divergence_adjoint(self.rows, self.cols, b);
        let rhs: Vec<T> = a.iter().zip(&ktb).map(|(&ai, &ki)| ai - t * ki).collect();
        let u = self.solve_shifted_laplacian(t * t, &rhs);
        let ku = gradient(self.rows, self.cols, &u);
        let mut out = u;
        out.extend(b.iter().zip(&ku).map(|(&bi, &ki)| bi + t * ki));
        Ok(out)
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        let n = self.pixels();
        let (u, phi) = x.split_at(n);
        let mut out = divergence_adjoint(self.rows, self.cols, phi);
        out.extend(gradient(self.rows, self.cols, u).into_iter().map(|g| -g));
        Some(out)
    }

    fn is_single_valued(&self) -> bool {
        true
    }
}
