//! ADMM comparison problems, all in the form `min φ(u) + ψ(v)` subject to
//! `Du + Ev = c`.
//!
//! | name          | φ                          | ψ                    | D, E, c            |
//! |---------------|----------------------------|----------------------|--------------------|
//! | `elastic_net` | `½‖Ku − b‖²`               | `ρ₁‖v‖₁ + ρ₂/2‖v‖²`  | `I, −I, 0`         |
//! | `lasso`       | `½‖Ku − b‖²`               | `ρ₁‖v‖₁`             | `I, −I, 0`         |
//! | `qp`          | `½uᵀQu + qᵀu`              | box indicator        | `I, −I, 0`         |
//! | `logreg`      | `Σ log(1 + exp(−yᵢaᵢᵀu))`  | `ρ‖v‖₁`              | `I, −I, 0`         |
//! | `svm`         | `½‖w‖²`                    | `C Σ max(0, −sᵢ)`    | `diag(y)X, −I, 1`  |
//!
//! Default weights: `ρ₁ = 0.1‖Kᵀb‖∞` (the smallest weight with solution zero
//! is `‖Kᵀb‖∞`), `ρ₂ = 1`, `ρ = 0.1‖Aᵀy‖∞/2` for logistic regression and
//! `C = 1` for the SVM. The QP uses `Q = MᵀM + 0.1·I` with Gaussian `M`,
//! Gaussian `q` scaled by 5 and the box `[−1, 1]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::admm::SplitProblem;
use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigen, DenseMatrix, LuFactor};
use crate::operators::prox_l1;
use crate::rng::SeededRng;
use crate::scalar::Real;

use super::{column, Payload, ProblemInstance};

pub const SUITE_NAMES: [&str; 5] = ["elastic_net", "lasso", "qp", "logreg", "svm"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteDims {
    /// Rows of the regression and QP factor matrices.
    pub rows: usize,
    /// Columns of the regression and QP factor matrices.
    pub cols: usize,
    /// Samples for the classification problems.
    pub samples: usize,
    /// Features for the classification problems.
    pub features: usize,
}

impl Default for SuiteDims {
    fn default() -> Self {
        Self { rows: 20, cols: 100, samples: 50, features: 20 }
    }
}

impl SuiteDims {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.samples == 0 || self.features == 0 {
            return Err(Error::InvalidParameter(format!("suite dimensions must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Solves `(αI + βG)x = rhs` for a fixed symmetric positive semidefinite `G`
/// through one eigendecomposition.
#[derive(Debug, Clone)]
struct SpectralSolver<T> {
    vals: Vec<T>,
    vecs: DenseMatrix<T>,
}

impl<T: Real> SpectralSolver<T> {
    fn new(g: &DenseMatrix<T>) -> Result<Self> {
        let (vals, vecs) = symmetric_eigen(g, true)?;
        Ok(Self { vals, vecs })
    }

    fn solve(&self, alpha: T, beta: T, rhs: &[T]) -> Result<Vec<T>> {
        let mut coef = self.vecs.matvec_t(rhs);
        for (c, &l) in coef.iter_mut().zip(&self.vals) {
            let d = alpha + beta * l.max(T::zero());
            if !(d > T::zero()) {
                return Err(Error::SingularSystem { pivot: d.to_f64_lossy() });
            }
            *c /= d;
        }
        Ok(self.vecs.matvec(&coef))
    }
}

fn sup_norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Elastic net, and LASSO when `rho2 = 0`.
#[derive(Debug, Clone)]
pub struct ElasticNet<T> {
    name: String,
    k: DenseMatrix<T>,
    b: Vec<T>,
    rho1: T,
    rho2: T,
    ktb: Vec<T>,
    gram: SpectralSolver<T>,
    id: DenseMatrix<T>,
    neg_id: DenseMatrix<T>,
    c: Vec<T>,
}

impl<T: Real> ElasticNet<T> {
    pub fn new(k: DenseMatrix<T>, b: Vec<T>, rho1: T, rho2: T) -> Result<Self> {
        if b.len() != k.rows() {
            return Err(Error::DimensionMismatch { expected: k.rows(), found: b.len() });
        }
        if !(rho1 >= T::zero() && rho2 >= T::zero()) {
            return Err(Error::InvalidParameter("elastic net weights must be nonnegative".into()));
        }
        let n = k.cols();
        let name = if rho2 == T::zero() { "lasso" } else { "elastic_net" };
        Ok(Self {
            name: name.into(),
            ktb: k.matvec_t(&b),
            gram: SpectralSolver::new(&k.gram())?,
            k,
            b,
            rho1,
            rho2,
            id: DenseMatrix::identity(n),
            neg_id: DenseMatrix::identity(n).scaled(-T::one()),
            c: vec![T::zero(); n],
        })
    }

    pub fn k(&self) -> &DenseMatrix<T> {
        &self.k
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }
}

impl<T: Real> SplitProblem<T> for ElasticNet<T> {
    fn name(&self) -> &str {
        &self.name
    }
    fn d(&self) -> &DenseMatrix<T> {
        &self.id
    }
    fn e(&self) -> &DenseMatrix<T> {
        &self.neg_id
    }
    fn c(&self) -> &[T] {
        &self.c
    }

    fn phi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let rhs = linalg::axpy(t, r, &self.ktb);
        self.gram.solve(t, T::one(), &rhs)
    }

    fn psi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let scaled: Vec<T> = r.iter().map(|&x| -t * x).collect();
        let s = T::one() / (self.rho2 + t);
        Ok(prox_l1(self.rho1, T::one(), &scaled).into_iter().map(|x| x * s).collect())
    }

    fn objective(&self, u: &[T], v: &[T]) -> T {
        let r = linalg::sub(&self.k.matvec(u), &self.b);
        T::lit(0.5) * linalg::norm_sq(&r)
            + self.rho1 * v.iter().map(|x| x.abs()).sum::<T>()
            + T::lit(0.5) * self.rho2 * linalg::norm_sq(v)
    }
}

/// Box-constrained QP.
#[derive(Debug, Clone)]
pub struct BoxQp<T> {
    q_mat: DenseMatrix<T>,
    q: Vec<T>,
    lo: T,
    hi: T,
    spectral: SpectralSolver<T>,
    id: DenseMatrix<T>,
    neg_id: DenseMatrix<T>,
    c: Vec<T>,
}

impl<T: Real> BoxQp<T> {
    /// `q_mat` must be symmetric positive semidefinite.
    pub fn new(q_mat: DenseMatrix<T>, q: Vec<T>, lo: T, hi: T) -> Result<Self> {
        let n = q.len();
        if q_mat.rows() != n || q_mat.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q_mat.rows() });
        }
        if !(lo <= hi) {
            return Err(Error::InvalidParameter(format!("empty box [{lo}, {hi}]")));
        }
        Ok(Self {
            spectral: SpectralSolver::new(&q_mat)?,
            q_mat,
            q,
            lo,
            hi,
            id: DenseMatrix::identity(n),
            neg_id: DenseMatrix::identity(n).scaled(-T::one()),
            c: vec![T::zero(); n],
        })
    }
}

impl<T: Real> SplitProblem<T> for BoxQp<T> {
    fn name(&self) -> &str {
        "qp"
    }
    fn d(&self) -> &DenseMatrix<T> {
        &self.id
    }
    fn e(&self) -> &DenseMatrix<T> {
        &self.neg_id
    }
    fn c(&self) -> &[T] {
        &self.c
    }

    fn phi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let rhs: Vec<T> = r.iter().zip(&self.q).map(|(&ri, &qi)| t * ri - qi).collect();
        self.spectral.solve(t, T::one(), &rhs)
    }

    fn psi_prox(&self, _t: T, r: &[T]) -> Result<Vec<T>> {
        Ok(r.iter().map(|&x| (-x).max(self.lo).min(self.hi)).collect())
    }

    fn objective(&self, u: &[T], _v: &[T]) -> T {
        T::lit(0.5) * linalg::dot(u, &self.q_mat.matvec(u)) + linalg::dot(&self.q, u)
    }
}

/// `ℓ¹`-regularized logistic regression with labels in `{−1, 1}`.
#[derive(Debug, Clone)]
pub struct LogReg<T> {
    a: DenseMatrix<T>,
    y: Vec<T>,
    rho: T,
    id: DenseMatrix<T>,
    neg_id: DenseMatrix<T>,
    c: Vec<T>,
}

pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITERS: usize = 50;

fn softplus<T: Real>(z: T) -> T {
    if z > T::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Real> LogReg<T> {
    pub fn new(a: DenseMatrix<T>, y: Vec<T>, rho: T) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: y.len() });
        }
        let n = a.cols();
        Ok(Self {
            a,
            y,
            rho,
            id: DenseMatrix::identity(n),
            neg_id: DenseMatrix::identity(n).scaled(-T::one()),
            c: vec![T::zero(); n],
        })
    }

    fn loss(&self, u: &[T]) -> T {
        let m = self.a.matvec(u);
        m.iter().zip(&self.y).map(|(&mi, &yi)| softplus(-yi * mi)).sum()
    }

    /// Value, gradient, Hessian of `Σ log(1 + exp(−yᵢaᵢᵀu)) + t/2‖u − r‖²`,
    /// and the gradient scale `1 + ‖∇loss‖ + t‖u − r‖`.
    fn model(&self, t: T, r: &[T], u: &[T]) -> (T, Vec<T>, DenseMatrix<T>, T) {
        let n = u.len();
        let margins = self.a.matvec(u);
        let diff = linalg::sub(u, r);
        let mut value = T::lit(0.5) * t * linalg::norm_sq(&diff);
        let mut weights = vec![T::zero(); margins.len()];
        let mut coef = vec![T::zero(); margins.len()];
        for (i, (&mi, &yi)) in margins.iter().zip(&self.y).enumerate() {
            value += softplus(-yi * mi);
            let s = sigmoid(-yi * mi);
            coef[i] = -yi * s;
            weights[i] = s * (T::one() - s);
        }
        let loss_grad = self.a.matvec_t(&coef);
        let scale = T::one() + linalg::norm(&loss_grad) + t * linalg::norm(&diff);
        let grad = linalg::axpy(t, &diff, &loss_grad);
        let mut hess = DenseMatrix::zeros(n, n);
        for (i, &w) in weights.iter().enumerate() {
            let row = self.a.row(i);
            for j in 0..n {
                let wj = w * row[j];
                for k in 0..n {
                    hess[(j, k)] += wj * row[k];
                }
            }
        }
        (value, grad, hess.shifted(t), scale)
    }
}

impl<T: Real> SplitProblem<T> for LogReg<T> {
    fn name(&self) -> &str {
        "logreg"
    }
    fn d(&self) -> &DenseMatrix<T> {
        &self.id
    }
    fn e(&self) -> &DenseMatrix<T> {
        &self.neg_id
    }
    fn c(&self) -> &[T] {
        &self.c
    }

    /// Damped Newton with Armijo backtracking, started at `r`. Stops when
    /// `‖∇‖ ≤ 1e-10·scale` or the Newton step is at rounding level.
    fn phi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let mut u = r.to_vec();
        let tol = T::lit(NEWTON_TOL);
        let mut last_grad = T::infinity();
        for _ in 0..NEWTON_MAX_ITERS {
            let (value, grad, hess, scale) = self.model(t, r, &u);
            last_grad = linalg::norm(&grad);
            if last_grad <= tol * scale {
                return Ok(u);
            }
            let step = LuFactor::new(&hess)?.solve(&grad);
            if linalg::norm(&step) <= T::lit(4.0) * T::epsilon() * (T::one() + linalg::norm(&u)) {
                return Ok(u);
            }
            let slope = linalg::dot(&grad, &step);
            if slope <= T::lit(1e3) * T::epsilon() * (T::one() + value.abs()) {
                // Predicted decrease below the rounding level of the value:
                // Armijo cannot discriminate, take the full step.
                u = linalg::sub(&u, &step);
                continue;
            }
            let mut alpha = T::one();
            loop {
                let trial = linalg::axpy(-alpha, &step, &u);
                let v_trial = self.loss(&trial) + T::lit(0.5) * t * linalg::norm_sq(&linalg::sub(&trial, r));
                if v_trial <= value - T::lit(1e-4) * alpha * slope || alpha < T::lit(1e-10) {
                    u = trial;
                    break;
                }
                alpha *= T::lit(0.5);
            }
        }
        Err(Error::Oracle(format!("logistic Newton stalled at gradient norm {last_grad}")))
    }

    fn psi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let neg: Vec<T> = r.iter().map(|&x| -x).collect();
        Ok(prox_l1(self.rho, T::one() / t, &neg))
    }

    fn objective(&self, u: &[T], v: &[T]) -> T {
        self.loss(u) + self.rho * v.iter().map(|x| x.abs()).sum::<T>()
    }
}

/// Soft-margin SVM in the variables `w` (weights) and `s = diag(y)Xw − 1`.
#[derive(Debug, Clone)]
pub struct Svm<T> {
    d: DenseMatrix<T>,
    neg_id: DenseMatrix<T>,
    c: Vec<T>,
    penalty: T,
    gram: SpectralSolver<T>,
}

impl<T: Real> Svm<T> {
    pub fn new(x: &DenseMatrix<T>, y: &[T], penalty: T) -> Result<Self> {
        if y.len() != x.rows() {
            return Err(Error::DimensionMismatch { expected: x.rows(), found: y.len() });
        }
        let d = DenseMatrix::from_fn(x.rows(), x.cols(), |i, j| y[i] * x[(i, j)]);
        Ok(Self {
            gram: SpectralSolver::new(&d.gram())?,
            neg_id: DenseMatrix::identity(x.rows()).scaled(-T::one()),
            c: vec![T::one(); x.rows()],
            d,
            penalty,
        })
    }
}

impl<T: Real> SplitProblem<T> for Svm<T> {
    fn name(&self) -> &str {
        "svm"
    }
    fn d(&self) -> &DenseMatrix<T> {
        &self.d
    }
    fn e(&self) -> &DenseMatrix<T> {
        &self.neg_id
    }
    fn c(&self) -> &[T] {
        &self.c
    }

    fn phi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let rhs = linalg::scale(t, &self.d.matvec_t(r));
        self.gram.solve(T::one(), t, &rhs)
    }

    fn psi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let shift = self.penalty / t;
        Ok(r
            .iter()
            .map(|&ri| {
                let a = -ri;
                if a >= T::zero() {
                    a
                } else if a + shift <= T::zero() {
                    a + shift
                } else {
                    T::zero()
                }
            })
            .collect())
    }

    fn objective(&self, u: &[T], v: &[T]) -> T {
        T::lit(0.5) * linalg::norm_sq(u) + self.penalty * v.iter().map(|&s| (-s).max(T::zero())).sum::<T>()
    }
}

/// `φ(u) = ½uᵀPu + pᵀu`, `ψ(v) = ½vᵀRv + rᵀv` with positive definite `P`,
/// `R` and Gaussian `D`, `E`, `c`.
#[derive(Debug, Clone)]
pub struct TwoBlockQp<T> {
    p_mat: DenseMatrix<T>,
    p: Vec<T>,
    r_mat: DenseMatrix<T>,
    r: Vec<T>,
    d: DenseMatrix<T>,
    e: DenseMatrix<T>,
    c: Vec<T>,
}

impl<T: Real> TwoBlockQp<T> {
    fn prox(h: &DenseMatrix<T>, lin: &[T], m: &DenseMatrix<T>, t: T, r: &[T]) -> Result<Vec<T>> {
        let sys = h.add(&m.gram().scaled(t));
        let rhs = linalg::sub(&linalg::scale(t, &m.matvec_t(r)), lin);
        sys.solve(&rhs)
    }
}

impl<T: Real> SplitProblem<T> for TwoBlockQp<T> {
    fn name(&self) -> &str {
        "two_block_qp"
    }
    fn d(&self) -> &DenseMatrix<T> {
        &self.d
    }
    fn e(&self) -> &DenseMatrix<T> {
        &self.e
    }
    fn c(&self) -> &[T] {
        &self.c
    }
    fn phi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        Self::prox(&self.p_mat, &self.p, &self.d, t, r)
    }
    fn psi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        Self::prox(&self.r_mat, &self.r, &self.e, t, r)
    }
    fn objective(&self, u: &[T], v: &[T]) -> T {
        let half = T::lit(0.5);
        half * linalg::dot(u, &self.p_mat.matvec(u))
            + linalg::dot(&self.p, u)
            + half * linalg::dot(v, &self.r_mat.matvec(v))
            + linalg::dot(&self.r, v)
    }
}

fn spd<T: Real>(rng: &mut SeededRng, n: usize) -> DenseMatrix<T> {
    let m: DenseMatrix<T> = rng.gaussian_matrix(n, n);
    m.gram().scaled(T::lit(1.0 / n as f64)).shifted(T::one())
}

/// Strongly convex two-block QP with `u, v ∈ R^n` and `n` constraints.
pub fn gen_two_block_qp<T: Real>(n: usize, seed: u64) -> Result<ProblemInstance<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("two-block QP needs n > 0".into()));
    }
    let mut rng = SeededRng::new(seed);
    let p = TwoBlockQp {
        p_mat: spd(&mut rng, n),
        p: rng.gaussian_vec(n),
        r_mat: spd(&mut rng, n),
        r: rng.gaussian_vec(n),
        d: rng.gaussian_matrix(n, n),
        e: rng.gaussian_matrix(n, n),
        c: rng.gaussian_vec(n),
    };
    let blocks = vec![
        ("P".into(), p.p_mat.clone()),
        ("p".into(), column(&p.p)),
        ("R".into(), p.r_mat.clone()),
        ("r".into(), column(&p.r)),
        ("D".into(), p.d.clone()),
        ("E".into(), p.e.clone()),
        ("c".into(), column(&p.c)),
    ];
    Ok(ProblemInstance {
        name: "two_block_qp".into(),
        seed,
        params: BTreeMap::from([("n".to_string(), n as f64)]),
        payload: Payload::Split(Arc::new(p)),
        reference: None,
        x0: Vec::new(),
        blocks,
    })
}

/// Two Gaussian clouds centred at `±μ` with labels `±1`; about one sample in
/// ten lands on the wrong side of the separating plane.
fn classification_data<T: Real>(rng: &mut SeededRng, samples: usize, features: usize) -> (DenseMatrix<T>, Vec<T>) {
    let direction: Vec<f64> = rng.gaussian_vec(features);
    let scale = 1.3 / linalg::norm(&direction);
    let labels: Vec<f64> = (0..samples).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let x = DenseMatrix::from_fn(samples, features, |i, j| {
        T::lit(labels[i] * direction[j] * scale + rng.gaussian())
    });
    (x, labels.into_iter().map(T::lit).collect())
}

/// Builds the named suite problem. Unknown names yield `InvalidName`.
pub fn gen_admm_suite<T: Real>(name: &str, dims: &SuiteDims, seed: u64) -> Result<ProblemInstance<T>> {
    dims.validate()?;
    let mut rng = SeededRng::new(seed);
    let mut params = BTreeMap::new();
    let (payload, blocks): (Arc<dyn SplitProblem<T>>, Vec<(String, DenseMatrix<T>)>) = match name {
        "elastic_net" | "lasso" => {
            let k: DenseMatrix<T> = rng.gaussian_matrix(dims.rows, dims.cols);
            let b: Vec<T> = rng.gaussian_vec(dims.rows);
            let rho1 = T::lit(0.1) * sup_norm(&k.matvec_t(&b));
            let rho2 = if name == "lasso" { T::zero() } else { T::one() };
            params.insert("rows".into(), dims.rows as f64);
            params.insert("cols".into(), dims.cols as f64);
            params.insert("rho1".into(), rho1.to_f64_lossy());
            params.insert("rho2".into(), rho2.to_f64_lossy());
            let blocks = vec![("K".into(), k.clone()), ("b".into(), column(&b))];
            (Arc::new(ElasticNet::new(k, b, rho1, rho2)?), blocks)
        }
        "qp" => {
            let m: DenseMatrix<T> = rng.gaussian_matrix(dims.rows, dims.cols);
            let q_mat = m.gram().shifted(T::lit(0.1));
            let q: Vec<T> = linalg::scale(T::lit(5.0), &rng.gaussian_vec(dims.cols));
            params.insert("rows".into(), dims.rows as f64);
            params.insert("cols".into(), dims.cols as f64);
            params.insert("lo".into(), -1.0);
            params.insert("hi".into(), 1.0);
            let blocks = vec![("Q".into(), q_mat.clone()), ("q".into(), column(&q))];
            (Arc::new(BoxQp::new(q_mat, q, -T::one(), T::one())?), blocks)
        }
        "logreg" => {
            let (a, y) = classification_data::<T>(&mut rng, dims.samples, dims.features);
            let ay: Vec<T> = a.matvec_t(&y);
            let rho = T::lit(0.05) * sup_norm(&ay);
            params.insert("samples".into(), dims.samples as f64);
            params.insert("features".into(), dims.features as f64);
            params.insert("rho".into(), rho.to_f64_lossy());
            let blocks = vec![("A".into(), a.clone()), ("y".into(), column(&y))];
            (Arc::new(LogReg::new(a, y, rho)?), blocks)
        }
        "svm" => {
            let (x, y) = classification_data::<T>(&mut rng, dims.samples, dims.features);
            params.insert("samples".into(), dims.samples as f64);
            params.insert("features".into(), dims.features as f64);
            params.insert("C".into(), 1.0);
            let blocks = vec![("X".into(), x.clone()), ("y".into(), column(&y))];
            (Arc::new(Svm::new(&x, &y, T::one())?), blocks)
        }
        other => return Err(Error::InvalidName(other.to_string())),
    };
    Ok(ProblemInstance {
        name: name.to_string(),
        seed,
        params,
        payload: Payload::Split(payload),
        reference: None,
        x0: Vec::new(),
        blocks,
    })
}
