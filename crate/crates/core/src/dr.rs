//! Douglas–Rachford iterations for `0 ∈ A(x) + B(x)`.
//!
//! Four equivalent formulations are provided:
//!
//! * [`Form::Form1`]: `u⁺ = J_{tB}(J_{tA}(u − tBu) + tBu)`, single-valued `B`.
//! * [`Form::Form2`]: `u = J_{tB}y`, `y⁺ = y + J_{tA}(2u − y) − u`, constant `t`.
//! * [`Form::Svaiter`]: the pair iteration on `(u, b)` with `b ∈ B(u)`.
//! * [`Form::Nonstationary`]: the `y`-iteration with varying `t`, where the
//!   ratio `ν = t_n/t_{n−1}` enters the reflection.
//!
//! With a constant stepsize all four generate the same `u` sequence. With a
//! varying stepsize, the nonstationary and Svaiter forms coincide.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, dist, lincomb, norm, norm_sq, sub};
use crate::operators::MonotoneOperator;
use crate::scalar::{Quotient, Real};
use crate::stepsize::StepsizeController;

/// Iterates of the pair formulation.
///
/// `a ∈ A(v)`, `b ∈ B(u)`, and `y = u + t·b` so that `u = J_{tB}(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrState<T> {
    pub u: Vec<T>,
    pub y: Vec<T>,
    pub v: Vec<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub t: T,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow<T> {
    pub n: usize,
    pub t: T,
    pub kappa: Option<T>,
    pub fixed_point_residual: T,
    pub linear_residual: Option<T>,
    pub objective: Option<T>,
    pub wall_time_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SolveTrace<T> {
    pub rows: Vec<TraceRow<T>>,
}

impl<T: Real> SolveTrace<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn stepsizes(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn fixed_point_residuals(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.fixed_point_residual).collect()
    }

    /// Linear residual column; `None` when it was not recorded.
    pub fn linear_residuals(&self) -> Option<Vec<T>> {
        self.rows.iter().map(|r| r.linear_residual).collect()
    }

    pub fn last(&self) -> Option<&TraceRow<T>> {
        self.rows.last()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCriterion {
    /// `‖u^{n−1} − v^n‖ ≤ tol·(1 + ‖u^n‖)`.
    #[default]
    FixedPoint,
    /// `‖(A + B)u^n‖ ≤ tol`; both operators must be single-valued.
    LinearResidual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule<T> {
    pub max_iters: usize,
    pub tol: T,
    pub criterion: StopCriterion,
}

impl<T: Real> Default for StopRule<T> {
    fn default() -> Self {
        Self { max_iters: 100_000, tol: T::lit(1e-8), criterion: StopCriterion::FixedPoint }
    }
}

impl<T: Real> StopRule<T> {
    pub fn fixed_point(max_iters: usize, tol: T) -> Self {
        Self { max_iters, tol, criterion: StopCriterion::FixedPoint }
    }

    pub fn linear_residual(max_iters: usize, tol: T) -> Self {
        Self { max_iters, tol, criterion: StopCriterion::LinearResidual }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Form1,
    Form2,
    Nonstationary,
    Svaiter,
}

impl Form {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Form1 => "form1",
            Self::Form2 => "form2",
            Self::Nonstationary => "nonstationary",
            Self::Svaiter => "svaiter",
        }
    }
}

impl std::str::FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "form1" => Ok(Self::Form1),
            "form2" => Ok(Self::Form2),
            "nonstationary" => Ok(Self::Nonstationary),
            "svaiter" => Ok(Self::Svaiter),
            other => Err(Error::InvalidParameter(format!("unknown DR form `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct DrOutcome<T> {
    pub solution: Vec<T>,
    pub trace: SolveTrace<T>,
    pub status: SolveStatus,
    pub state: DrState<T>,
}

/// Optional callbacks for [`solve_dr_with`].
pub struct SolveHooks<'a, T> {
    /// Evaluated at `u^n` and stored in the trace.
    pub objective: Option<&'a dyn Fn(&[T]) -> T>,
    /// Called with the initial state and after every iteration.
    pub on_step: Option<&'a mut dyn FnMut(&DrState<T>)>,
}

impl<T> Default for SolveHooks<'_, T> {
    fn default() -> Self {
        Self { objective: None, on_step: None }
    }
}

fn forward_or_err<T: Real>(op: &dyn MonotoneOperator<T>, x: &[T]) -> Result<Vec<T>> {
    op.forward(x).ok_or_else(|| Error::NotSingleValued(op.label().to_string()))
}

/// One step of `u⁺ = J_{tB}(J_{tA}(u − tBu) + tBu)`.
pub fn dr_step_form1<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    t: T,
    u: &[T],
) -> Result<Vec<T>> {
    let tbu = linalg::scale(t, &forward_or_err(b, u)?);
    let v = a.resolvent(t, &sub(u, &tbu))?;
    b.resolvent(t, &linalg::add(&v, &tbu))
}

/// One step of the reflected form. Returns `(y⁺, u)` with `u = J_{tB}y`.
pub fn dr_step_form2<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    t: T,
    y: &[T],
) -> Result<(Vec<T>, Vec<T>)> {
    let u = b.resolvent(t, y)?;
    let reflected = lincomb(T::lit(2.0), &u, -T::one(), y);
    let w = a.resolvent(t, &reflected)?;
    let y_next = y.iter().zip(&w).zip(&u).map(|((&yi, &wi), &ui)| yi + wi - ui).collect();
    Ok((y_next, u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonstationaryStep<T> {
    pub y_next: Vec<T>,
    /// `J_{t_prev·B} y`.
    pub u: Vec<T>,
    pub v: Vec<T>,
    /// Effective ratio `ν = t_new / t_prev`.
    pub kappa: T,
    pub t_new: T,
}

/// One step of the nonstationary scheme
///
/// ```text
/// u  = J_{t_prev·B} y
/// t  = controller(‖u‖ / ‖u − y‖),   ν = t / t_prev
/// v  = J_{tA}((1 + ν)u − νy)
/// y⁺ = v + ν(y − u)
/// ```
pub fn dr_step_nonstationary<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    ctrl: &mut StepsizeController<T>,
    y: &[T],
    t_prev: T,
) -> Result<NonstationaryStep<T>> {
    let u = b.resolvent(t_prev, y)?;
    let (y_next, v, kappa, t_new) = nonstationary_tail(a, ctrl, y, &u, t_prev)?;
    Ok(NonstationaryStep { y_next, u, v, kappa, t_new })
}

fn nonstationary_tail<T: Real>(
    a: &dyn MonotoneOperator<T>,
    ctrl: &mut StepsizeController<T>,
    y: &[T],
    u: &[T],
    t_prev: T,
) -> Result<(Vec<T>, Vec<T>, T, T)> {
    let raw = Quotient::guarded(norm(u), dist(u, y));
    let t_new = ctrl.next_from_kappa(raw);
    let nu = t_new / t_prev;
    let input = lincomb(T::one() + nu, u, -nu, y);
    let v = a.resolvent(t_new, &input)?;
    let y_next = v.iter().zip(y.iter().zip(u)).map(|(&vi, (&yi, &ui))| vi + nu * (yi - ui)).collect();
    Ok((y_next, v, nu, t_new))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvaiterStep<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// One step of the pair iteration:
///
/// ```text
/// v = J_{tA}(u_prev − t·b_prev),   a = (u_prev − t·b_prev − v)/t
/// u = J_{tB}(v + t·b_prev),        b = (v + t·b_prev − u)/t
/// ```
pub fn dr_svaiter_step<T: Real>(
    a_op: &dyn MonotoneOperator<T>,
    b_op: &dyn MonotoneOperator<T>,
    t: T,
    u_prev: &[T],
    b_prev: &[T],
) -> Result<SvaiterStep<T>> {
    let inv_t = T::one() / t;
    let w1 = axpy(-t, b_prev, u_prev);
    let v = a_op.resolvent(t, &w1)?;
    let a = lincomb(inv_t, &w1, -inv_t, &v);
    let w2 = axpy(t, b_prev, &v);
    let u = b_op.resolvent(t, &w2)?;
    let b = lincomb(inv_t, &w2, -inv_t, &u);
    Ok(SvaiterStep { u, v, a, b })
}

/// `(u⁰, b⁰)` with `b⁰ ∈ B(u⁰)`: `b⁰ = B(x0)` for single-valued `B`,
/// otherwise `u⁰ = J_{t0·B}(x0)` and `b⁰ = (x0 − u⁰)/t0`.
pub fn initial_pair<T: Real>(b: &dyn MonotoneOperator<T>, t0: T, x0: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if let Some(bx) = b.forward(x0) {
        return Ok((x0.to_vec(), bx));
    }
    let u0 = b.resolvent(t0, x0)?;
    let b0 = lincomb(T::one() / t0, x0, -T::one() / t0, &u0);
    Ok((u0, b0))
}

/// `‖A(u) + B(u)‖` when both operators are single-valued.
pub fn linear_residual<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    u: &[T],
) -> Option<T> {
    let au = a.forward(u)?;
    let bu = b.forward(u)?;
    Some(norm(&linalg::add(&au, &bu)))
}

/// Rejects form, operator and stop-rule combinations the solver cannot run.
pub fn check_compatibility<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    ctrl: &StepsizeController<T>,
    stop: &StopRule<T>,
    form: Form,
) -> Result<()> {
    if stop.max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    if !(stop.tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", stop.tol)));
    }
    match form {
        Form::Form1 if !b.is_single_valued() => {
            return Err(Error::IncompatibleForm(format!(
                "form1 needs a single-valued B, `{}` is set-valued",
                b.label()
            )))
        }
        Form::Form2 if !ctrl.mode().is_constant() => {
            return Err(Error::IncompatibleForm(format!(
                "form2 needs a constant stepsize, controller is {}",
                ctrl.mode().name()
            )))
        }
        _ => {}
    }
    if stop.criterion == StopCriterion::LinearResidual && !(a.is_single_valued() && b.is_single_valued()) {
        return Err(Error::IncompatibleForm(
            "linear-residual stopping needs single-valued A and B".into(),
        ));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    ctrl.validate()
}

/// Runs the chosen form until the stop rule fires.
pub fn solve_dr<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    ctrl: StepsizeController<T>,
    stop: StopRule<T>,
    form: Form,
    x0: &[T],
) -> Result<DrOutcome<T>> {
    solve_dr_with(a, b, ctrl, stop, form, x0, SolveHooks::default())
}

pub fn solve_dr_with<T: Real>(
    a: &dyn MonotoneOperator<T>,
    b: &dyn MonotoneOperator<T>,
    mut ctrl: StepsizeController<T>,
    stop: StopRule<T>,
    form: Form,
    x0: &[T],
    mut hooks: SolveHooks<'_, T>,
) -> Result<DrOutcome<T>> {
    check_compatibility(a, b, &ctrl, &stop, form)?;
    if x0.len() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), found: x0.len() });
    }
    let clock = Instant::now();
    let t0 = ctrl.current();
    let (u0, b0) = initial_pair(b, t0, x0)?;
    let dim = x0.len();
    let mut state = DrState {
        y: axpy(t0, &b0, &u0),
        u: u0,
        v: vec![T::zero(); dim],
        a: vec![T::zero(); dim],
        b: b0,
        t: t0,
        n: 0,
    };
    if let Some(f) = hooks.on_step.as_mut() {
        f(&state);
    }
    let mut trace = SolveTrace { rows: Vec::new() };
    let mut status = SolveStatus::MaxIters;

    for n in 1..=stop.max_iters {
        let u_prev = std::mem::take(&mut state.u);
        let kappa;
        match form {
            Form::Form1 | Form::Svaiter => {
                let t = ctrl.next_from_quotient(Quotient::guarded(norm(&u_prev), norm(&state.b)));
                let step = dr_svaiter_step(a, b, t, &u_prev, &state.b)?;
                state.b = if form == Form::Form1 { forward_or_err(b, &step.u)? } else { step.b };
                state.y = axpy(t, &state.b, &step.u);
                state.u = step.u;
                state.v = step.v;
                state.a = step.a;
                state.t = t;
                kappa = ctrl.last_kappa();
            }
            Form::Form2 => {
                let t = ctrl.next_from_quotient(Quotient::Infinite);
                let reflected = lincomb(T::lit(2.0), &u_prev, -T::one(), &state.y);
                let v = a.resolvent(t, &reflected)?;
                let y_next: Vec<T> =
                    state.y.iter().zip(&v).zip(&u_prev).map(|((&y, &w), &u)| y + w - u).collect();
                let u = b.resolvent(t, &y_next)?;
                let inv_t = T::one() / t;
                state.a = lincomb(inv_t, &reflected, -inv_t, &v);
                state.b = lincomb(inv_t, &y_next, -inv_t, &u);
                state.y = y_next;
                state.u = u;
                state.v = v;
                state.t = t;
                kappa = None;
            }
            Form::Nonstationary => {
                let t_prev = state.t;
                let (y_next, v, nu, t) = nonstationary_tail(a, &mut ctrl, &state.y, &u_prev, t_prev)?;
                let u = b.resolvent(t, &y_next)?;
                let inv_t = T::one() / t;
                let input = lincomb(T::one() + nu, &u_prev, -nu, &state.y);
                state.a = lincomb(inv_t, &input, -inv_t, &v);
                state.b = lincomb(inv_t, &y_next, -inv_t, &u);
                state.y = y_next;
                state.u = u;
                state.v = v;
                state.t = t;
                kappa = Some(nu);
            }
        }
        state.n = n;

        if !linalg::all_finite(&state.u) {
            return Err(Error::NoConvergence { what: "DR iterate (non-finite value)", iterations: n });
        }
        let fp = dist(&u_prev, &state.v);
        let lin = linear_residual(a, b, &state.u);
        trace.rows.push(TraceRow {
            n,
            t: state.t,
            kappa,
            fixed_point_residual: fp,
            linear_residual: lin,
            objective: hooks.objective.map(|f| f(&state.u)),
            wall_time_ns: clock.elapsed().as_nanos() as u64,
        });
        if let Some(f) = hooks.on_step.as_mut() {
            f(&state);
        }
        let done = match stop.criterion {
            StopCriterion::FixedPoint => fp <= stop.tol * (T::one() + norm(&state.u)),
            StopCriterion::LinearResidual => lin.is_some_and(|r| r <= stop.tol),
        };
        if done {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(DrOutcome { solution: state.u.clone(), trace, status, state })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerReport<T> {
    /// `d_n = ‖u^n − u*‖² + t*²·‖b^n − b*‖²`.
    pub distances: Vec<T>,
    /// Allowed increase at each step; entry 0 is zero.
    pub slack: Vec<T>,
    pub violations: Vec<usize>,
    pub total_slack: T,
    pub passed: bool,
}

/// Checks quasi-Fejér monotonicity of a pair-iteration run towards
/// `(u*, b*)` in the metric weighted by `t_limit`.
///
/// With `β_n = ‖b^n − b*‖²`, the one-step estimate in the metric of `t_n`
/// gives `d_n ≤ d_{n−1} + |t_n² − t_limit²|·(β_{n−1} + β_n)`.
pub fn fejer_monitor<T: Real>(
    states: &[DrState<T>],
    reference: (&[T], &[T]),
    t_limit: T,
) -> FejerReport<T> {
    let (u_star, b_star) = reference;
    let t_lim_sq = t_limit * t_limit;
    let betas: Vec<T> = states.iter().map(|s| norm_sq(&sub(&s.b, b_star))).collect();
    let distances: Vec<T> = states
        .iter()
        .zip(&betas)
        .map(|(s, &beta)| norm_sq(&sub(&s.u, u_star)) + t_lim_sq * beta)
        .collect();
    let scale = T::one() + distances.first().copied().unwrap_or_else(T::zero);
    let rounding = T::lit(1e-12) * scale;
    let mut slack = vec![T::zero(); states.len()];
    let mut violations = Vec::new();
    for n in 1..states.len() {
        let tn_sq = states[n].t * states[n].t;
        slack[n] = (tn_sq - t_lim_sq).abs() * (betas[n - 1] + betas[n]);
        if distances[n] > distances[n - 1] + slack[n] + rounding {
            violations.push(n);
        }
    }
    let total_slack: T = slack.iter().copied().sum();
    let passed = violations.is_empty() && total_slack.is_finite();
    FejerReport { distances, slack, violations, total_slack, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::operators::{random_monotone_matrix, L1Subdifferential, LinearOperator, ZeroOperator};
    use crate::rng::SeededRng;
    use crate::stepsize::ConservationSchedule;
    use approx::assert_relative_eq;

    fn scalar(x: f64) -> LinearOperator<f64> {
        LinearOperator::new(DenseMatrix::from_diag(&[x]), "scalar")
    }

    fn pair(seed: u64, n: usize) -> (LinearOperator<f64>, LinearOperator<f64>, Vec<f64>) {
        let mut rng = SeededRng::new(seed);
        let a = random_monotone_matrix(&mut rng, n, n, 1.0);
        let b = random_monotone_matrix(&mut rng, n, n / 2 + 1, 1.0);
        let x = rng.gaussian_vec(n);
        (LinearOperator::new(a, "A"), LinearOperator::new(b, "B"), x)
    }

    #[test]
    fn zero_operators_are_fixed() {
        let z = ZeroOperator::new(3);
        let u = vec![1.0, -2.0, 3.0];
        assert_eq!(dr_step_form1::<f64>(&z, &z, 0.7, &u).unwrap(), u);
        let (y, uu) = dr_step_form2::<f64>(&z, &z, 0.7, &u).unwrap();
        assert_eq!((y, uu), (u.clone(), u.clone()));
        let s = dr_svaiter_step::<f64>(&z, &z, 0.7, &u, &[0.0; 3]).unwrap();
        assert_eq!(s.u, u);
        assert_eq!(s.a, vec![0.0; 3]);
        assert_eq!(s.b, vec![0.0; 3]);
    }

    #[test]
    fn scalar_hand_values() {
        let (a, b) = (scalar(1.0), scalar(1.0));
        assert_relative_eq!(dr_step_form1(&a, &b, 1.0, &[1.0]).unwrap()[0], 0.5, epsilon = 1e-15);

        let z = ZeroOperator::new(1);
        let (y, u) = dr_step_form2(&z, &b, 1.0, &[2.0]).unwrap();
        assert_relative_eq!(u[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-15);

        let s = dr_svaiter_step(&a, &b, 1.0, &[1.0], &[1.0]).unwrap();
        assert_relative_eq!(s.v[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.a[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.u[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.b[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn form1_requires_forward() {
        let a = ZeroOperator::new(2);
        let b = L1Subdifferential::new(2, 1.0);
        assert!(matches!(dr_step_form1::<f64>(&a, &b, 1.0, &[1.0, 1.0]), Err(Error::NotSingleValued(_))));
    }

    #[test]
    fn nonstationary_with_zero_b_applies_resolvent_of_a() {
        let a = scalar(3.0);
        let b = ZeroOperator::new(1);
        let mut ctrl = StepsizeController::adaptive_multivalued();
        let step = dr_step_nonstationary(&a, &b, &mut ctrl, &[2.0], 1.0).unwrap();
        assert_eq!(step.u, vec![2.0]);
        let expected = a.resolvent(step.t_new, &[2.0]).unwrap();
        assert_relative_eq!(step.y_next[0], expected[0], epsilon = 1e-14);
    }

    #[test]
    fn nonstationary_unit_ratio_is_form2() {
        let (a, b, y) = pair(3, 6);
        let mut ctrl = StepsizeController::fixed(0.8);
        let step = dr_step_nonstationary(&a, &b, &mut ctrl, &y, 0.8).unwrap();
        let (y2, u2) = dr_step_form2(&a, &b, 0.8, &y).unwrap();
        assert_eq!(step.kappa, 1.0);
        for (p, q) in step.y_next.iter().zip(&y2) {
            assert_relative_eq!(*p, *q, epsilon = 1e-13);
        }
        assert_eq!(step.u, u2);
    }

    #[test]
    fn svaiter_identities_hold() {
        let (a, b, x) = pair(11, 8);
        let mut u = x.clone();
        let mut bb = b.forward(&u).unwrap();
        for k in 0..30 {
            let t = 0.3 + 0.1 * (k % 7) as f64;
            let s = dr_svaiter_step(&a, &b, t, &u, &bb).unwrap();
            let scale = 1e-9 * (1.0 + norm(&s.u));
            let lhs1 = sub(&u, &s.u);
            let rhs1 = linalg::scale(t, &linalg::add(&s.a, &s.b));
            assert!(dist(&lhs1, &rhs1) <= scale);
            let lhs2 = linalg::scale(t, &sub(&bb, &s.b));
            assert!(dist(&lhs2, &sub(&s.u, &s.v)) <= scale);
            let lhs3 = sub(&u, &s.v);
            let rhs3 = linalg::scale(t, &linalg::add(&s.a, &bb));
            assert!(dist(&lhs3, &rhs3) <= scale);
            u = s.u;
            bb = s.b;
        }
    }

    #[test]
    fn solve_zero_problem_converges_immediately() {
        let z = ZeroOperator::new(4);
        let out = solve_dr::<f64>(
            &z,
            &z,
            StepsizeController::fixed(1.0),
            StopRule::fixed_point(100, 1e-10),
            Form::Form2,
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace.rows[0].fixed_point_residual, 0.0);
    }

    #[test]
    fn incompatible_forms_are_rejected() {
        let a = ZeroOperator::new(2);
        let set_valued = L1Subdifferential::new(2, 1.0);
        let err = solve_dr::<f64>(
            &a,
            &set_valued,
            StepsizeController::fixed(1.0),
            StopRule::default(),
            Form::Form1,
            &[0.0, 0.0],
        );
        assert!(matches!(err, Err(Error::IncompatibleForm(_))));
        let err = solve_dr::<f64>(
            &a,
            &a,
            StepsizeController::adaptive_single_valued(),
            StopRule::default(),
            Form::Form2,
            &[0.0, 0.0],
        );
        assert!(matches!(err, Err(Error::IncompatibleForm(_))));
    }

    #[test]
    fn set_valued_b_converges_with_multiplicative_controller() {
        // min ½‖x − c‖² + ‖x‖₁: soft thresholding of c.
        let c = vec![3.0, -0.5, 0.2, -2.0];
        let a = crate::operators::QuadraticFidelity::new(c.clone());
        let b = L1Subdifferential::new(4, 1.0);
        for form in [Form::Svaiter, Form::Nonstationary] {
            let out = solve_dr(
                &a,
                &b,
                StepsizeController::adaptive_multivalued(),
                StopRule::fixed_point(10_000, 1e-12),
                form,
                &[0.0; 4],
            )
            .unwrap();
            assert_eq!(out.status, SolveStatus::Converged);
            let expected = [2.0f64, 0.0, 0.0, -1.0];
            for (x, e) in out.solution.iter().zip(expected) {
                assert!((x - e).abs() < 1e-9, "{form:?}: {x} vs {e}");
            }
        }
    }

    #[test]
    fn schedule_zero_tail_freezes_stepsize() {
        let (a, b, x) = pair(5, 6);
        let ctrl = StepsizeController::adaptive_single_valued()
            .with_schedule(ConservationSchedule::Explicit { weights: vec![1.0] });
        let out = solve_dr(&a, &b, ctrl, StopRule::fixed_point(50, 1e-30), Form::Form1, &x).unwrap();
        let ts = out.trace.stepsizes();
        assert!(ts.iter().all(|&t| t == ts[0]));
    }

    #[test]
    fn f32_solve_runs() {
        let a = LinearOperator::new(DenseMatrix::<f32>::from_diag(&[1.0, 2.0]), "A");
        let b = LinearOperator::new(DenseMatrix::<f32>::from_diag(&[0.5, 0.25]), "B");
        let out = solve_dr(
            &a,
            &b,
            StepsizeController::adaptive_single_valued(),
            StopRule::linear_residual(1000, 1e-4),
            Form::Svaiter,
            &[1.0f32, -1.0],
        )
        .unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
    }

    #[test]
    fn fejer_zero_problem() {
        let z = ZeroOperator::new(2);
        let mut states = Vec::new();
        let mut record = |s: &DrState<f64>| states.push(s.clone());
        solve_dr_with(
            &z,
            &z,
            StepsizeController::fixed(1.0),
            StopRule::fixed_point(5, 1e-12),
            Form::Svaiter,
            &[0.0, 0.0],
            SolveHooks { objective: None, on_step: Some(&mut record) },
        )
        .unwrap();
        let report = fejer_monitor(&states, (&[0.0, 0.0], &[0.0, 0.0]), 1.0);
        assert!(report.passed);
        assert!(report.distances.iter().all(|&d| d == 0.0));
    }
}
