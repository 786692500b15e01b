//! Seeded problem generators.
//!
//! Every generator is a pure function of its arguments: equal inputs give
//! bit-identical instances, which [`ProblemInstance::fingerprint`] makes
//! cheap to check.

pub mod archive;
pub mod rof;
pub mod suite;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::admm::SplitProblem;
use crate::error::{Error, Result};
use crate::linalg::{self, orthonormalize_rows, symmetric_eigenvalues, DenseMatrix};
use crate::operators::{
    operator_norm_power, prox_l1, L1Subdifferential, LeastSquaresOrthoRows, LinearOperator, OperatorSpec,
};
use crate::rng::SeededRng;
use crate::scalar::Real;

pub use rof::{gen_rof_saddle, gen_rof_synthetic, rof_energy, synthetic_step_image, total_variation};
pub use suite::{gen_admm_suite, gen_two_block_qp, SuiteDims, SUITE_NAMES};

pub type ObjectiveFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

pub enum Payload<T: Real> {
    /// `0 ∈ A(x) + B(x)`.
    MonotonePair {
        a: OperatorSpec<T>,
        b: OperatorSpec<T>,
        /// The matrices of `A` and `B` when both are linear.
        matrices: Option<(DenseMatrix<T>, DenseMatrix<T>)>,
        objective: Option<ObjectiveFn<T>>,
    },
    /// `min φ(u) + ψ(v)` subject to `Du + Ev = c`.
    Split(Arc<dyn SplitProblem<T>>),
}

impl<T: Real> fmt::Debug for Payload<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MonotonePair { a, b, matrices, .. } => f
                .debug_struct("MonotonePair")
                .field("a", &a.label())
                .field("b", &b.label())
                .field("linear", &matrices.is_some())
                .finish(),
            Self::Split(p) => f.debug_tuple("Split").field(&p.name()).finish(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Reference<T> {
    pub solution: Option<Vec<T>>,
    pub objective: Option<T>,
}

/// A generated problem together with the data it was built from.
#[derive(Debug)]
pub struct ProblemInstance<T: Real> {
    pub name: String,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub payload: Payload<T>,
    pub reference: Option<Reference<T>>,
    /// Suggested starting point for DR payloads; empty for split payloads.
    pub x0: Vec<T>,
    /// Named generating data, in generation order. Vectors are stored as
    /// single-column matrices.
    pub blocks: Vec<(String, DenseMatrix<T>)>,
}

impl<T: Real> ProblemInstance<T> {
    pub fn pair(&self) -> Option<(&OperatorSpec<T>, &OperatorSpec<T>)> {
        match &self.payload {
            Payload::MonotonePair { a, b, .. } => Some((a, b)),
            Payload::Split(_) => None,
        }
    }

    pub fn matrices(&self) -> Option<(&DenseMatrix<T>, &DenseMatrix<T>)> {
        match &self.payload {
            Payload::MonotonePair { matrices: Some((a, b)), .. } => Some((a, b)),
            _ => None,
        }
    }

    pub fn objective(&self) -> Option<&ObjectiveFn<T>> {
        match &self.payload {
            Payload::MonotonePair { objective, .. } => objective.as_ref(),
            Payload::Split(_) => None,
        }
    }

    pub fn split(&self) -> Option<&Arc<dyn SplitProblem<T>>> {
        match &self.payload {
            Payload::Split(p) => Some(p),
            Payload::MonotonePair { .. } => None,
        }
    }

    pub fn block(&self, name: &str) -> Option<&DenseMatrix<T>> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// 64-bit FNV-1a hash of the name, seed, parameters and the bit
    /// patterns of every block.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::default();
        h.write(self.name.as_bytes());
        h.write(&self.seed.to_le_bytes());
        for (k, v) in &self.params {
            h.write(k.as_bytes());
            h.write(&v.to_bits().to_le_bytes());
        }
        for (name, m) in &self.blocks {
            h.write(name.as_bytes());
            h.write(&(m.rows() as u64).to_le_bytes());
            h.write(&(m.cols() as u64).to_le_bytes());
            for x in m.as_slice() {
                h.write(&x.to_f64_lossy().to_bits().to_le_bytes());
            }
        }
        h.0
    }
}

struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv1a {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

pub(crate) fn column<T: Real>(v: &[T]) -> DenseMatrix<T> {
    DenseMatrix::from_fn(v.len(), 1, |i, _| v[i])
}

/// Linear toy problem `A = CᵀC`, `B = DᵀD` with Gaussian
/// `C ∈ R^{(m/2+10)×m}` and `D ∈ R^{(m/2)×m}`. `A + B` is positive definite
/// with probability one, so `x* = 0` is the unique solution.
///
/// Returns `RankDeficient` if the smallest eigenvalue of `A + B` is not above
/// `1e-10`; callers may retry with another seed.
pub fn gen_linear_toy<T: Real>(m: usize, seed: u64) -> Result<ProblemInstance<T>> {
    if m < 20 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("linear toy needs even m >= 20, got {m}")));
    }
    let mut rng = SeededRng::new(seed);
    let c: DenseMatrix<T> = rng.gaussian_matrix(m / 2 + 10, m);
    let d: DenseMatrix<T> = rng.gaussian_matrix(m / 2, m);
    let x0: Vec<T> = rng.gaussian_vec(m);
    let a = c.gram();
    let b = d.gram();
    let min_eig = symmetric_eigenvalues(&a.add(&b))?[0];
    if !(min_eig > T::lit(1e-10)) {
        return Err(Error::RankDeficient { min_singular: min_eig.to_f64_lossy() });
    }
    let params = BTreeMap::from([("m".to_string(), m as f64)]);
    Ok(ProblemInstance {
        name: "linear_toy".into(),
        seed,
        params,
        payload: Payload::MonotonePair {
            a: Arc::new(LinearOperator::cached(a.clone(), "CᵀC")),
            b: Arc::new(LinearOperator::cached(b.clone(), "DᵀD")),
            matrices: Some((a, b)),
            objective: None,
        },
        reference: Some(Reference { solution: Some(vec![T::zero(); m]), objective: Some(T::zero()) }),
        x0,
        blocks: vec![("C".into(), c), ("D".into(), d)],
    })
}

/// `½‖Kx − b‖² + α‖x‖₁`.
pub fn lasso_objective<T: Real>(k: &DenseMatrix<T>, b: &[T], alpha: T, x: &[T]) -> T {
    let r = linalg::sub(&k.matvec(x), b);
    T::lit(0.5) * linalg::norm_sq(&r) + alpha * x.iter().map(|v| v.abs()).sum::<T>()
}

/// Plain FISTA with step `1/L`, `L = ‖K‖²`, started at zero.
pub fn fista_baseline<T: Real>(k: &DenseMatrix<T>, b: &[T], alpha: T, iters: usize) -> (Vec<T>, T) {
    let l = operator_norm_power(k, 200);
    let l = (l * l).max(T::min_positive_value());
    let step = T::one() / l;
    let n = k.cols();
    let mut x = vec![T::zero(); n];
    let mut y = x.clone();
    let mut theta = T::one();
    for _ in 0..iters.max(1) {
        let grad = k.matvec_t(&linalg::sub(&k.matvec(&y), b));
        let x_next = prox_l1(alpha, step, &linalg::axpy(-step, &grad, &y));
        let theta_next = (T::one() + (T::one() + T::lit(4.0) * theta * theta).sqrt()) / T::lit(2.0);
        let momentum = (theta - T::one()) / theta_next;
        y = x_next.iter().zip(&x).map(|(&xn, &xo)| xn + momentum * (xn - xo)).collect();
        x = x_next;
        theta = theta_next;
    }
    let obj = lasso_objective(k, b, alpha, &x);
    (x, obj)
}

pub const LASSO_REFERENCE_ITERS: usize = 20_000;

/// LASSO with orthonormal-row `K ∈ R^{rows×cols}` and Gaussian `b`.
/// `A = ∂(α‖·‖₁)`, `B = ∇(½‖K· − b‖²)`; the reference objective comes from
/// [`fista_baseline`].
pub fn gen_lasso<T: Real>(rows: usize, cols: usize, alpha: T, seed: u64) -> Result<ProblemInstance<T>> {
    if rows == 0 || rows > cols {
        return Err(Error::InvalidParameter(format!("lasso needs 0 < rows <= cols, got {rows}x{cols}")));
    }
    if !(alpha >= T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")));
    }
    let mut rng = SeededRng::new(seed);
    let k = orthonormalize_rows(&rng.gaussian_matrix::<T>(rows, cols))?;
    let b: Vec<T> = rng.gaussian_vec(rows);
    let (x_ref, obj_ref) = fista_baseline(&k, &b, alpha, LASSO_REFERENCE_ITERS);
    let ls = LeastSquaresOrthoRows::new(k.clone(), b.clone())?;
    let (k_obj, b_obj) = (k.clone(), b.clone());
    let objective: ObjectiveFn<T> = Arc::new(move |x: &[T]| lasso_objective(&k_obj, &b_obj, alpha, x));
    let params = BTreeMap::from([
        ("rows".to_string(), rows as f64),
        ("cols".to_string(), cols as f64),
        ("alpha".to_string(), alpha.to_f64_lossy()),
    ]);
    Ok(ProblemInstance {
        name: "lasso".into(),
        seed,
        params,
        payload: Payload::MonotonePair {
            a: Arc::new(L1Subdifferential::new(cols, alpha)),
            b: Arc::new(ls),
            matrices: None,
            objective: Some(objective),
        },
        reference: Some(Reference { solution: Some(x_ref), objective: Some(obj_ref) }),
        x0: vec![T::zero(); cols],
        blocks: vec![("K".into(), k), ("b".into(), column(&b))],
    })
}

/// Builds the named DR problem: `linear_toy`, `lasso` or `rof`.
pub fn gen_dr_problem<T: Real>(name: &str, dims: &BTreeMap<String, f64>, seed: u64) -> Result<ProblemInstance<T>> {
    let get = |key: &str, default: f64| dims.get(key).copied().unwrap_or(default);
    let as_usize = |key: &str, default: f64| -> Result<usize> {
        let v = get(key, default);
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidParameter(format!("`{key}` must be a nonnegative integer, got {v}")))
        }
    };
    let allowed: &[&str] = match name {
        "linear_toy" => &["m"],
        "lasso" => &["rows", "cols", "alpha"],
        "rof" => &["rows", "cols", "lambda", "noise"],
        other => return Err(Error::InvalidName(other.to_string())),
    };
    if let Some(key) = dims.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParameter(format!("unknown dimension `{key}` for `{name}`; expected one of {allowed:?}")));
    }
    match name {
        "linear_toy" => gen_linear_toy(as_usize("m", 50.0)?, seed),
        "lasso" => gen_lasso(as_usize("rows", 20.0)?, as_usize("cols", 100.0)?, T::lit(get("alpha", 0.1)), seed),
        "rof" => gen_rof_synthetic(
            as_usize("rows", 16.0)?,
            as_usize("cols", 16.0)?,
            T::lit(get("lambda", 0.1)),
            T::lit(get("noise", 0.1)),
            seed,
        ),
        _ => unreachable!("name checked above"),
    }
}
