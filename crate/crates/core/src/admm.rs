//! ADMM for `min φ(u) + ψ(v)` subject to `Du + Ev = c`.
//!
//! Iteration with unscaled multiplier `w`:
//!
//! ```text
//! u⁺ = argmin φ(u) − ⟨Du, w⟩ + t/2‖Du + Ev − c‖²
//! v⁺ = argmin ψ(v) − ⟨Ev, w⟩ + t/2‖Du⁺ + Ev − c‖²
//! w⁺ = w − t(Du⁺ + Ev⁺ − c)
//! ```
//!
//! The adaptive variant then moves `t` toward `‖w⁺‖/‖Ev⁺‖` with the
//! projected-average rule; the new `t` is used by the next iteration. This is
//! Douglas–Rachford on the dual inclusion, see [`dual_correspondence_check`].

use serde::{Deserialize, Serialize};

use crate::dr::dr_step_nonstationary;
use crate::error::{Error, Result};
use crate::linalg::{self, axpy, norm, sub, DenseMatrix};
use crate::operators::MonotoneOperator;
use crate::rng::SeededRng;
use crate::scalar::{Quotient, Real};
use crate::stepsize::StepsizeController;

/// Problem data and subproblem oracles.
///
/// `phi_prox(t, r) = argmin_u φ(u) + t/2‖Du − r‖²` and
/// `psi_prox(t, r) = argmin_v ψ(v) + t/2‖Ev − r‖²`.
pub trait SplitProblem<T: Real>: Send + Sync {
    fn name(&self) -> &str;
    fn d(&self) -> &DenseMatrix<T>;
    fn e(&self) -> &DenseMatrix<T>;
    fn c(&self) -> &[T];
    fn phi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>>;
    fn psi_prox(&self, t: T, r: &[T]) -> Result<Vec<T>>;
    fn objective(&self, u: &[T], v: &[T]) -> T;

    fn u_dim(&self) -> usize {
        self.d().cols()
    }

    fn v_dim(&self) -> usize {
        self.e().cols()
    }

    fn constraint_dim(&self) -> usize {
        self.c().len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub t: T,
    pub n: usize,
}

impl<T: Real> AdmmState<T> {
    pub fn zeros<P: SplitProblem<T> + ?Sized>(p: &P, t: T) -> Self {
        Self {
            u: vec![T::zero(); p.u_dim()],
            v: vec![T::zero(); p.v_dim()],
            w: vec![T::zero(); p.constraint_dim()],
            t,
            n: 0,
        }
    }
}

/// `‖Du + Ev − c‖`.
pub fn primal_residual<T: Real, P: SplitProblem<T> + ?Sized>(p: &P, u: &[T], v: &[T]) -> T {
    norm(&constraint_gap(p, u, v))
}

fn constraint_gap<T: Real, P: SplitProblem<T> + ?Sized>(p: &P, u: &[T], v: &[T]) -> Vec<T> {
    let du = p.d().matvec(u);
    let ev = p.e().matvec(v);
    du.iter().zip(&ev).zip(p.c()).map(|((&a, &b), &c)| a + b - c).collect()
}

/// One step at the state's stepsize; `t` is left unchanged.
pub fn admm_step_vanilla<T: Real, P: SplitProblem<T> + ?Sized>(p: &P, st: &AdmmState<T>) -> Result<AdmmState<T>> {
    let t = st.t;
    let inv_t = T::one() / t;
    let ev = p.e().matvec(&st.v);
    let r_u: Vec<T> = p.c().iter().zip(&ev).zip(&st.w).map(|((&c, &e), &w)| c - e + w * inv_t).collect();
    let u = p.phi_prox(t, &r_u)?;
    let du = p.d().matvec(&u);
    let r_v: Vec<T> = p.c().iter().zip(&du).zip(&st.w).map(|((&c, &d), &w)| c - d + w * inv_t).collect();
    let v = p.psi_prox(t, &r_v)?;
    let ev = p.e().matvec(&v);
    let w = st
        .w
        .iter()
        .zip(du.iter().zip(&ev))
        .zip(p.c())
        .map(|((&w, (&d, &e)), &c)| w - t * (d + e - c))
        .collect();
    Ok(AdmmState { u, v, w, t, n: st.n + 1 })
}

/// Vanilla step followed by the projected-average update from
/// `‖w⁺‖/‖Ev⁺‖`.
pub fn admm_step_adaptive<T: Real, P: SplitProblem<T> + ?Sized>(
    p: &P,
    st: &AdmmState<T>,
    ctrl: &mut StepsizeController<T>,
) -> Result<AdmmState<T>> {
    let mut next = admm_step_vanilla(p, st)?;
    let ev = p.e().matvec(&next.v);
    next.t = ctrl.update_projected_average(Quotient::guarded(norm(&next.w), norm(&ev)));
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualBalancing<T> {
    pub mu: T,
    pub tau_inc: T,
    pub tau_dec: T,
}

impl<T: Real> Default for ResidualBalancing<T> {
    fn default() -> Self {
        Self { mu: T::lit(10.0), tau_inc: T::lit(2.0), tau_dec: T::lit(2.0) }
    }
}

impl<T: Real> ResidualBalancing<T> {
    pub fn validate(&self) -> Result<()> {
        if self.mu > T::one() && self.tau_inc > T::one() && self.tau_dec > T::one() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("residual balancing needs mu, tau_inc, tau_dec > 1".into()))
        }
    }

    /// New stepsize from primal residual `r_p` and dual residual `r_d`.
    pub fn adjust(&self, t: T, r_p: T, r_d: T) -> T {
        if r_p > self.mu * r_d {
            t * self.tau_inc
        } else if r_d > self.mu * r_p {
            t / self.tau_dec
        } else {
            t
        }
    }
}

/// `t‖DᵀE(v − v_prev)‖`.
pub fn dual_residual<T: Real, P: SplitProblem<T> + ?Sized>(p: &P, t: T, v: &[T], v_prev: &[T]) -> T {
    t * norm(&p.d().matvec_t(&p.e().matvec(&sub(v, v_prev))))
}

/// Vanilla step, then residual balancing of `t`.
pub fn admm_step_rb<T: Real, P: SplitProblem<T> + ?Sized>(
    p: &P,
    st: &AdmmState<T>,
    rb: &ResidualBalancing<T>,
) -> Result<AdmmState<T>> {
    let mut next = admm_step_vanilla(p, st)?;
    let r_p = primal_residual(p, &next.u, &next.v);
    let r_d = dual_residual(p, st.t, &next.v, &st.v);
    next.t = rb.adjust(st.t, r_p, r_d);
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdmmMethod<T> {
    Vanilla { t: T },
    Adaptive(StepsizeController<T>),
    ResidualBalancing { t0: T, rule: ResidualBalancing<T> },
}

impl<T: Real> AdmmMethod<T> {
    pub fn adaptive() -> Self {
        Self::Adaptive(StepsizeController::adaptive_single_valued())
    }

    pub fn residual_balancing(t0: T) -> Self {
        Self::ResidualBalancing { t0, rule: ResidualBalancing::default() }
    }

    fn initial_t(&self) -> T {
        match self {
            Self::Vanilla { t } => *t,
            Self::Adaptive(c) => c.current(),
            Self::ResidualBalancing { t0, .. } => *t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmmStop<T> {
    pub max_iters: usize,
    /// Relative tolerance on primal and dual residuals.
    pub tol: T,
}

impl<T: Real> Default for AdmmStop<T> {
    fn default() -> Self {
        Self { max_iters: 10_000, tol: T::lit(1e-6) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmmRow<T> {
    pub n: usize,
    pub t: T,
    pub primal_residual: T,
    pub dual_residual: T,
    pub objective: T,
}

#[derive(Debug, Clone)]
pub struct AdmmOutcome<T> {
    pub state: AdmmState<T>,
    pub converged: bool,
    pub iterations: usize,
    pub objective: T,
    pub primal_residual: T,
    pub trace: Vec<AdmmRow<T>>,
}

/// Iterates until `r_p ≤ tol·(1 + max(‖Du‖, ‖Ev‖, ‖c‖))` and
/// `r_d ≤ tol·(1 + ‖Dᵀw‖)`, where `r_d` uses the stepsize of the step.
pub fn solve_admm<T: Real, P: SplitProblem<T> + ?Sized>(
    p: &P,
    method: &AdmmMethod<T>,
    stop: AdmmStop<T>,
    init: Option<AdmmState<T>>,
) -> Result<AdmmOutcome<T>> {
    let mut ctrl = match method {
        AdmmMethod::Adaptive(c) => {
            c.validate()?;
            Some(c.clone())
        }
        AdmmMethod::Vanilla { t } | AdmmMethod::ResidualBalancing { t0: t, .. } if !(*t > T::zero()) => {
            return Err(Error::InvalidParameter(format!("ADMM stepsize must be positive, got {t}")));
        }
        AdmmMethod::ResidualBalancing { rule, .. } => {
            rule.validate()?;
            None
        }
        AdmmMethod::Vanilla { .. } => None,
    };
    let mut st = init.unwrap_or_else(|| AdmmState::zeros(p, method.initial_t()));
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..stop.max_iters {
        let t_used = st.t;
        let next = match (method, ctrl.as_mut()) {
            (AdmmMethod::Adaptive(_), Some(c)) => admm_step_adaptive(p, &st, c)?,
            (AdmmMethod::ResidualBalancing { rule, .. }, _) => admm_step_rb(p, &st, rule)?,
            _ => admm_step_vanilla(p, &st)?,
        };
        if !linalg::all_finite(&next.w) || !linalg::all_finite(&next.u) {
            return Err(Error::NoConvergence { what: "ADMM iterate (non-finite value)", iterations: next.n });
        }
        let du = p.d().matvec(&next.u);
        let ev = p.e().matvec(&next.v);
        let r_p = primal_residual(p, &next.u, &next.v);
        let r_d = dual_residual(p, t_used, &next.v, &st.v);
        let objective = p.objective(&next.u, &next.v);
        trace.push(AdmmRow { n: next.n, t: next.t, primal_residual: r_p, dual_residual: r_d, objective });
        let primal_scale = T::one() + norm(&du).max(norm(&ev)).max(norm(p.c()));
        let dual_scale = T::one() + norm(&p.d().matvec_t(&next.w));
        st = next;
        if r_p <= stop.tol * primal_scale && r_d <= stop.tol * dual_scale {
            converged = true;
            break;
        }
    }
    let objective = p.objective(&st.u, &st.v);
    let primal_residual = primal_residual(p, &st.u, &st.v);
    Ok(AdmmOutcome { iterations: st.n, state: st, converged, objective, primal_residual, trace })
}

/// `A(x) = D∇φ*(Dᵀx) − c` on the dual space, through `phi_prox`:
/// `J_{tA}(r) = r − t(Du⁺ − c)` with `u⁺ = phi_prox(t, c + r/t)`.
pub struct DualOperatorA<'a, T: Real> {
    problem: &'a dyn SplitProblem<T>,
}

/// `B(x) = E∇ψ*(Eᵀx)` on the dual space, through `psi_prox`:
/// `J_{tB}(r) = r − tEv⁺` with `v⁺ = psi_prox(t, r/t)`.
pub struct DualOperatorB<'a, T: Real> {
    problem: &'a dyn SplitProblem<T>,
}

impl<'a, T: Real> DualOperatorA<'a, T> {
    pub fn new(problem: &'a dyn SplitProblem<T>) -> Self {
        Self { problem }
    }
}

impl<'a, T: Real> DualOperatorB<'a, T> {
    pub fn new(problem: &'a dyn SplitProblem<T>) -> Self {
        Self { problem }
    }
}

impl<T: Real> MonotoneOperator<T> for DualOperatorA<'_, T> {
    fn dim(&self) -> usize {
        self.problem.constraint_dim()
    }

    fn label(&self) -> &str {
        "dual A"
    }

    fn resolvent(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let p = self.problem;
        let target = axpy(T::one() / t, r, p.c());
        let u = p.phi_prox(t, &target)?;
        let gap = sub(&p.d().matvec(&u), p.c());
        Ok(axpy(-t, &gap, r))
    }
}

impl<T: Real> MonotoneOperator<T> for DualOperatorB<'_, T> {
    fn dim(&self) -> usize {
        self.problem.constraint_dim()
    }

    fn label(&self) -> &str {
        "dual B"
    }

    fn resolvent(&self, t: T, r: &[T]) -> Result<Vec<T>> {
        let p = self.problem;
        let v = p.psi_prox(t, &linalg::scale(T::one() / t, r))?;
        Ok(axpy(-t, &p.e().matvec(&v), r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceReport<T> {
    pub passed: bool,
    /// First step `n ≥ 1` where `w^n` or `t_n` differ beyond tolerance.
    pub first_divergence: Option<usize>,
    pub max_w_gap: T,
    pub max_t_gap: T,
    pub steps: usize,
}

/// Runs adaptive ADMM and the nonstationary DR scheme on the dual inclusion
/// side by side and compares `w^n` with the DR iterate `J_{t_{n−1}B}(y^{n−1})`
/// and the two stepsize sequences.
///
/// ADMM starts from `(v⁰, w⁰)` drawn from `seed`; DR starts from
/// `y⁰ = w⁰ − t₀(Du¹ − c)`. With `perturb_init` the DR start is shifted, a
/// negative control that must diverge at `n = 1`.
pub fn dual_correspondence_check<T: Real>(
    p: &dyn SplitProblem<T>,
    n_steps: usize,
    seed: u64,
    tol: T,
    perturb_init: bool,
) -> Result<CorrespondenceReport<T>> {
    let mut rng = SeededRng::new(seed);
    let mut admm_ctrl = StepsizeController::<T>::adaptive_single_valued();
    let mut dr_ctrl = admm_ctrl.clone();
    let t0 = admm_ctrl.current();
    let mut st = AdmmState {
        u: vec![T::zero(); p.u_dim()],
        v: rng.gaussian_vec(p.v_dim()),
        w: rng.gaussian_vec(p.constraint_dim()),
        t: t0,
        n: 0,
    };
    let ev0 = p.e().matvec(&st.v);
    let target: Vec<T> =
        p.c().iter().zip(&ev0).zip(&st.w).map(|((&c, &e), &w)| c - e + w / t0).collect();
    let u1 = p.phi_prox(t0, &target)?;
    let mut y = axpy(-t0, &sub(&p.d().matvec(&u1), p.c()), &st.w);
    if perturb_init {
        let bump: Vec<T> = rng.gaussian_vec(y.len());
        y = linalg::add(&y, &bump);
    }
    let a_op = DualOperatorA::new(p);
    let b_op = DualOperatorB::new(p);
    let mut t_prev = t0;
    let mut first_divergence = None;
    let mut max_w_gap = T::zero();
    let mut max_t_gap = T::zero();
    for n in 1..=n_steps {
        st = admm_step_adaptive(p, &st, &mut admm_ctrl)?;
        let step = dr_step_nonstationary(&a_op, &b_op, &mut dr_ctrl, &y, t_prev)?;
        let scale = T::one() + norm(&st.w);
        let w_gap = linalg::dist(&st.w, &step.u) / scale;
        let t_gap = (st.t - step.t_new).abs() / st.t;
        max_w_gap = max_w_gap.max(w_gap);
        max_t_gap = max_t_gap.max(t_gap);
        if first_divergence.is_none() && (w_gap > tol || t_gap > tol || !w_gap.is_finite()) {
            first_divergence = Some(n);
        }
        y = step.y_next;
        t_prev = step.t_new;
    }
    Ok(CorrespondenceReport {
        passed: first_divergence.is_none(),
        first_divergence,
        max_w_gap,
        max_t_gap,
        steps: n_steps,
    })
}
