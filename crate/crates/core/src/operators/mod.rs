//! Maximal monotone operators, exposed through their resolvents
//! `J_{tA} = (I + tA)⁻¹`, and the catalog used by the solvers.

mod tv;

use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, LuFactor};
use crate::rng::SeededRng;
use crate::scalar::Real;

pub use tv::{divergence_adjoint, gradient, GradientSkewOperator};

/// A maximal monotone operator on `R^dim`.
///
/// Every operator supplies its resolvent. Single-valued operators additionally
/// supply `forward`, which must satisfy `resolvent(t, x + t·forward(x)) = x`.
pub trait MonotoneOperator<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> &str;

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>>;

    /// Point evaluation; `None` for set-valued operators.
    fn forward(&self, _x: &[T]) -> Option<Vec<T>> {
        None
    }

    fn is_single_valued(&self) -> bool {
        false
    }

    /// The matrix of a linear operator, when there is one.
    fn matrix(&self) -> Option<&DenseMatrix<T>> {
        None
    }
}

/// Shared, immutable handle to an operator.
pub type OperatorSpec<T> = Arc<dyn MonotoneOperator<T>>;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Solves `(I + tM) z = x` with a fresh LU factorization.
pub fn linear_monotone_resolvent<T: Real>(m: &DenseMatrix<T>, t: T, x: &[T]) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    check_dim(m.rows(), x.len())?;
    m.scaled(t).shifted(T::one()).solve(x)
}

/// Soft thresholding: `max(|x_i| - tα, 0)·sign(x_i)`.
pub fn prox_l1<T: Real>(alpha: T, t: T, x: &[T]) -> Vec<T> {
    let thr = t * alpha;
    x.iter()
        .map(|&v| {
            let mag = v.abs() - thr;
            if mag > T::zero() {
                mag * v.signum()
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Resolvent of `∇(½‖K·−b‖²)` for `K` with orthonormal rows:
/// `(I − t/(1+t)·KᵀK)(x + tKᵀb)`.
///
/// Orthonormality is not rechecked here; see [`LeastSquaresOrthoRows::new`].
pub fn prox_least_squares_orthorows<T: Real>(k: &DenseMatrix<T>, b: &[T], t: T, x: &[T]) -> Vec<T> {
    let w = linalg::axpy(t, &k.matvec_t(b), x);
    let ktkw = k.matvec_t(&k.matvec(&w));
    linalg::axpy(-t / (T::one() + t), &ktkw, &w)
}

/// Projects every 2-channel pixel `(φ[2p], φ[2p+1])` onto the disk of radius
/// `lambda`.
pub fn project_ball_inf_pairs<T: Real>(lambda: T, phi: &[T]) -> Vec<T> {
    assert!(phi.len().is_multiple_of(2), "two channels per pixel");
    let mut out = phi.to_vec();
    for p in out.chunks_exact_mut(2) {
        let mag = p[0].hypot(p[1]);
        if mag > lambda {
            let s = if mag > T::zero() { lambda / mag } else { T::zero() };
            p[0] *= s;
            p[1] *= s;
        }
    }
    out
}

/// `x ↦ Bx − y`; zeros of `A + shifted` solve `(A + B)x = y`.
pub fn shift_operator<T: Real>(b: OperatorSpec<T>, y: Vec<T>) -> OperatorSpec<T> {
    Arc::new(ShiftedOperator::new(b, y))
}

/// Largest singular value of `m` by power iteration on `mᵀm` from a fixed
/// seeded start vector.
pub fn operator_norm_power<T: Real>(m: &DenseMatrix<T>, iters: usize) -> T {
    let n = m.cols();
    if n == 0 || m.max_abs() == T::zero() {
        return T::zero();
    }
    let mut rng = SeededRng::new(0x0dd5_eed5);
    let mut x: Vec<T> = rng.gaussian_vec(n);
    let nx = linalg::norm(&x);
    x = linalg::scale(T::one() / nx, &x);
    let mut estimate = T::zero();
    for _ in 0..iters.max(1) {
        let mx = m.matvec(&x);
        estimate = linalg::norm(&mx);
        let y = m.matvec_t(&mx);
        let ny = linalg::norm(&y);
        if ny == T::zero() {
            return T::zero();
        }
        x = linalg::scale(T::one() / ny, &y);
    }
    let mx = m.matvec(&x);
    estimate.max(linalg::norm(&mx))
}

#[derive(Debug, Clone)]
pub struct ZeroOperator {
    dim: usize,
}

impl ZeroOperator {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl<T: Real> MonotoneOperator<T> for ZeroOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        "zero"
    }

    fn resolvent(&self, _t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        Ok(x.to_vec())
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        Some(vec![T::zero(); x.len()])
    }

    fn is_single_valued(&self) -> bool {
        true
    }
}

type CachedLu<T> = RwLock<Option<(T, Arc<LuFactor<T>>)>>;

/// A monotone matrix `x ↦ Mx`.
///
/// By default the resolvent refactors `I + tM` on every call. The cached
/// variant keeps the factorization for the most recent `t`, which pays off
/// for constant-stepsize runs.
#[derive(Debug)]
pub struct LinearOperator<T> {
    matrix: DenseMatrix<T>,
    label: String,
    cache: Option<CachedLu<T>>,
}

impl<T: Real> LinearOperator<T> {
    pub fn new(matrix: DenseMatrix<T>, label: impl Into<String>) -> Self {
        assert!(matrix.is_square(), "linear monotone operator must be square");
        Self { matrix, label: label.into(), cache: None }
    }

    pub fn cached(matrix: DenseMatrix<T>, label: impl Into<String>) -> Self {
        Self { cache: Some(RwLock::new(None)), ..Self::new(matrix, label) }
    }

    fn factor(&self, t: T) -> Result<Arc<LuFactor<T>>> {
        let fresh = || self.matrix.scaled(t).shifted(T::one()).lu().map(Arc::new);
        let Some(cache) = &self.cache else {
            return fresh();
        };
        if let Some((ct, lu)) = cache.read().expect("cache lock").as_ref() {
            if *ct == t {
                return Ok(Arc::clone(lu));
            }
        }
        let lu = fresh()?;
        *cache.write().expect("cache lock") = Some((t, Arc::clone(&lu)));
        Ok(lu)
    }
}

impl<T: Real> MonotoneOperator<T> for LinearOperator<T> {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.matrix.rows(), x.len())?;
        Ok(self.factor(t)?.solve(x))
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        Some(self.matrix.matvec(x))
    }

    fn is_single_valued(&self) -> bool {
        true
    }

    fn matrix(&self) -> Option<&DenseMatrix<T>> {
        Some(&self.matrix)
    }
}

/// Subdifferential of `α‖·‖₁`.
#[derive(Debug, Clone)]
pub struct L1Subdifferential<T> {
    dim: usize,
    alpha: T,
}

impl<T: Real> L1Subdifferential<T> {
    pub fn new(dim: usize, alpha: T) -> Self {
        assert!(alpha >= T::zero());
        Self { dim, alpha }
    }
}

impl<T: Real> MonotoneOperator<T> for L1Subdifferential<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        "l1"
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        Ok(prox_l1(self.alpha, t, x))
    }
}

/// Gradient of `½‖Kx − b‖²` for `K` with orthonormal rows.
#[derive(Debug, Clone)]
pub struct LeastSquaresOrthoRows<T> {
    k: DenseMatrix<T>,
    b: Vec<T>,
}

impl<T: Real> LeastSquaresOrthoRows<T> {
    pub fn new(k: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        check_dim(k.rows(), b.len())?;
        let deviation = k.matmul(&k.transpose()).max_abs_diff(&DenseMatrix::identity(k.rows()));
        if !(deviation <= T::lit(1e-8)) {
            return Err(Error::NotOrthonormal { deviation: deviation.to_f64_lossy() });
        }
        Ok(Self { k, b })
    }

    pub fn k(&self) -> &DenseMatrix<T> {
        &self.k
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }
}

impl<T: Real> MonotoneOperator<T> for LeastSquaresOrthoRows<T> {
    fn dim(&self) -> usize {
        self.k.cols()
    }

    fn label(&self) -> &str {
        "least_squares"
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.k.cols(), x.len())?;
        Ok(prox_least_squares_orthorows(&self.k, &self.b, t, x))
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        let r = linalg::sub(&self.k.matvec(x), &self.b);
        Some(self.k.matvec_t(&r))
    }

    fn is_single_valued(&self) -> bool {
        true
    }
}

/// `B̃x = Bx − y`, with resolvent `x ↦ J_{tB}(x + ty)`.
pub struct ShiftedOperator<T: Real> {
    inner: OperatorSpec<T>,
    shift: Vec<T>,
    label: String,
}

impl<T: Real> ShiftedOperator<T> {
    pub fn new(inner: OperatorSpec<T>, shift: Vec<T>) -> Self {
        assert_eq!(inner.dim(), shift.len(), "shift dimension");
        let label = format!("{}-shifted", inner.label());
        Self { inner, shift, label }
    }
}

impl<T: Real> MonotoneOperator<T> for ShiftedOperator<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        self.inner.resolvent(t, &linalg::axpy(t, &self.shift, x))
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        self.inner.forward(x).map(|bx| linalg::sub(&bx, &self.shift))
    }

    fn is_single_valued(&self) -> bool {
        self.inner.is_single_valued()
    }
}

/// Subdifferential of `½‖x − x₀‖²`.
#[derive(Debug, Clone)]
pub struct QuadraticFidelity<T> {
    anchor: Vec<T>,
}

impl<T: Real> QuadraticFidelity<T> {
    pub fn new(anchor: Vec<T>) -> Self {
        Self { anchor }
    }
}

impl<T: Real> MonotoneOperator<T> for QuadraticFidelity<T> {
    fn dim(&self) -> usize {
        self.anchor.len()
    }

    fn label(&self) -> &str {
        "quadratic_fidelity"
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.anchor.len(), x.len())?;
        let s = T::one() / (T::one() + t);
        Ok(x.iter().zip(&self.anchor).map(|(&xi, &ai)| (xi + t * ai) * s).collect())
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        Some(linalg::sub(x, &self.anchor))
    }

    fn is_single_valued(&self) -> bool {
        true
    }
}

/// Normal cone of the pixelwise disk constraint `|φ_p| ≤ λ`; the resolvent is
/// the projection for every `t`.
#[derive(Debug, Clone)]
pub struct DiskNormalCone<T> {
    pixels: usize,
    lambda: T,
}

impl<T: Real> DiskNormalCone<T> {
    pub fn new(pixels: usize, lambda: T) -> Self {
        assert!(lambda >= T::zero());
        Self { pixels, lambda }
    }
}

impl<T: Real> MonotoneOperator<T> for DiskNormalCone<T> {
    fn dim(&self) -> usize {
        2 * self.pixels
    }

    fn label(&self) -> &str {
        "disk_normal_cone"
    }

    fn resolvent(&self, _t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(2 * self.pixels, x.len())?;
        Ok(project_ball_inf_pairs(self.lambda, x))
    }
}

/// Block-diagonal operator acting on consecutive coordinate blocks.
pub struct BlockDiagonal<T: Real> {
    blocks: Vec<OperatorSpec<T>>,
    dim: usize,
    label: String,
}

impl<T: Real> BlockDiagonal<T> {
    pub fn new(blocks: Vec<OperatorSpec<T>>) -> Self {
        let dim = blocks.iter().map(|b| b.dim()).sum();
        let label = blocks.iter().map(|b| b.label()).collect::<Vec<_>>().join("+");
        Self { blocks, dim, label }
    }

    fn split<'a>(&self, x: &'a [T]) -> Vec<(&OperatorSpec<T>, &'a [T])> {
        let mut offset = 0;
        self.blocks
            .iter()
            .map(|b| {
                let part = &x[offset..offset + b.dim()];
                offset += b.dim();
                (b, part)
            })
            .collect()
    }
}

impl<T: Real> MonotoneOperator<T> for BlockDiagonal<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        let mut out = Vec::with_capacity(self.dim);
        for (b, part) in self.split(x) {
            out.extend(b.resolvent(t, part)?);
        }
        Ok(out)
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        let mut out = Vec::with_capacity(self.dim);
        for (b, part) in self.split(x) {
            out.extend(b.forward(part)?);
        }
        Some(out)
    }

    fn is_single_valued(&self) -> bool {
        self.blocks.iter().all(|b| b.is_single_valued())
    }
}

/// Operator assembled from closures, for one-off problems.
pub struct FnOperator<T: Real> {
    dim: usize,
    label: String,
    resolvent: Box<dyn Fn(T, &[T]) -> Result<Vec<T>> + Send + Sync>,
    forward: Option<Box<dyn Fn(&[T]) -> Vec<T> + Send + Sync>>,
}

impl<T: Real> FnOperator<T> {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        resolvent: impl Fn(T, &[T]) -> Result<Vec<T>> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, label: label.into(), resolvent: Box::new(resolvent), forward: None }
    }

    pub fn with_forward(mut self, forward: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.forward = Some(Box::new(forward));
        self
    }
}

impl<T: Real> MonotoneOperator<T> for FnOperator<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn resolvent(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        (self.resolvent)(t, x)
    }

    fn forward(&self, x: &[T]) -> Option<Vec<T>> {
        self.forward.as_ref().map(|f| f(x))
    }

    fn is_single_valued(&self) -> bool {
        self.forward.is_some()
    }
}

/// Random monotone matrix `CᵀC + S` with Gaussian `C` (`rank × n`) and a
/// random skew-symmetric `S` scaled by `skew`.
pub fn random_monotone_matrix<T: Real>(
    rng: &mut SeededRng,
    n: usize,
    rank: usize,
    skew: f64,
) -> DenseMatrix<T> {
    let c: DenseMatrix<T> = rng.gaussian_matrix(rank, n);
    let g: DenseMatrix<T> = rng.gaussian_matrix(n, n);
    let s = g.sub(&g.transpose()).scaled(T::lit(0.5 * skew));
    c.gram().add(&s)
}
