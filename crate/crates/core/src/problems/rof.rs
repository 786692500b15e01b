//! ROF denoising as the saddle-point inclusion
//! `0 ∈ diag(∂f, N_{|φ|≤λ})(u, φ) + [[0, Kᵀ], [−K, 0]](u, φ)`
//! with `f = ½‖· − u₀‖²` and `K` the forward-difference gradient.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::operators::{gradient, GradientSkewOperator};
use crate::operators::{BlockDiagonal, DiskNormalCone, OperatorSpec, QuadraticFidelity};
use crate::rng::SeededRng;
use crate::scalar::Real;

use super::{ObjectiveFn, Payload, ProblemInstance};

/// Isotropic total variation `Σ_p |(Ku)_p|`.
pub fn total_variation<T: Real>(rows: usize, cols: usize, u: &[T]) -> T {
    gradient(rows, cols, u).chunks_exact(2).map(|g| g[0].hypot(g[1])).sum()
}

/// `½‖u − u₀‖² + λ·TV(u)`.
pub fn rof_energy<T: Real>(image: &DenseMatrix<T>, lambda: T, u: &[T]) -> T {
    let fid = T::lit(0.5) * linalg::norm_sq(&linalg::sub(u, image.as_slice()));
    fid + lambda * total_variation(image.rows(), image.cols(), u)
}

/// Piecewise-constant test image (a bright square on a dark background with
/// a brighter right band) plus Gaussian noise of standard deviation `noise`.
pub fn synthetic_step_image<T: Real>(rows: usize, cols: usize, noise: T, seed: u64) -> DenseMatrix<T> {
    let mut rng = SeededRng::new(seed);
    DenseMatrix::from_fn(rows, cols, |i, j| {
        let in_square = (rows / 4..3 * rows / 4).contains(&i) && (cols / 4..cols / 2).contains(&j);
        let base = if in_square {
            1.0
        } else if j >= 3 * cols / 4 {
            0.5
        } else {
            0.0
        };
        T::lit(base) + noise * T::lit(rng.gaussian())
    })
}

/// Saddle-point form of ROF on the variable `z = (u, φ)`, with `u` the
/// row-major image and `φ` two gradient channels per pixel.
pub fn gen_rof_saddle<T: Real>(image: &DenseMatrix<T>, lambda: T) -> Result<ProblemInstance<T>> {
    let (rows, cols) = (image.rows(), image.cols());
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParameter(format!("ROF image must be at least 2x2, got {rows}x{cols}")));
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    let n = rows * cols;
    let u0 = image.as_slice().to_vec();
    let a: OperatorSpec<T> = Arc::new(BlockDiagonal::new(vec![
        Arc::new(QuadraticFidelity::new(u0.clone())) as OperatorSpec<T>,
        Arc::new(DiskNormalCone::new(n, lambda)),
    ]));
    let b: OperatorSpec<T> = Arc::new(GradientSkewOperator::new(rows, cols));
    let img = image.clone();
    let objective: ObjectiveFn<T> = Arc::new(move |z: &[T]| rof_energy(&img, lambda, &z[..n]));
    let mut x0 = u0;
    x0.resize(3 * n, T::zero());
    let params = BTreeMap::from([
        ("rows".to_string(), rows as f64),
        ("cols".to_string(), cols as f64),
        ("lambda".to_string(), lambda.to_f64_lossy()),
    ]);
    Ok(ProblemInstance {
        name: "rof".into(),
        seed: 0,
        params,
        payload: Payload::MonotonePair { a, b, matrices: None, objective: Some(objective) },
        reference: None,
        x0,
        blocks: vec![("image".into(), image.clone())],
    })
}

/// [`gen_rof_saddle`] on a [`synthetic_step_image`].
pub fn gen_rof_synthetic<T: Real>(rows: usize, cols: usize, lambda: T, noise: T, seed: u64) -> Result<ProblemInstance<T>> {
    let image = synthetic_step_image(rows, cols, noise, seed);
    let mut p = gen_rof_saddle(&image, lambda)?;
    p.seed = seed;
    p.params.insert("noise".into(), noise.to_f64_lossy());
    Ok(p)
}
