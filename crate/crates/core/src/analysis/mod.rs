//! Spectral analysis of the linear Douglas–Rachford iteration.
//!
//! For linear monotone `A`, `B` one DR step is `u⁺ = H_t u` with
//! `H_t = (I + tA + tB + t²AB)⁻¹(I + t²AB)`. Its eigenvalues other than 1
//! lie in the disk of radius ½ around ½.

pub mod eigen;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::dr::dr_step_form1;
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::operators::LinearOperator;
use crate::rng::SeededRng;
use crate::scalar::Real;

pub use eigen::{eigenvalues, multiset_distance, sort_lexicographic};

pub const DEFAULT_SOLUTION_TOL: f64 = 1e-6;
pub const DISK_TOL: f64 = 1e-8;
const INVERSE_ITERATION_STEPS: usize = 5;
const MONOTONICITY_PROBES: usize = 100;

fn check_pair<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if b.rows() != a.rows() || b.cols() != a.cols() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.rows() });
    }
    Ok(a.rows())
}

/// `(I + tA + tB + t²AB)⁻¹(I + t²AB)`.
pub fn build_ht<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, t: T) -> Result<DenseMatrix<T>> {
    let n = check_pair(a, b)?;
    let ab = a.matmul(b).scaled(t * t);
    let rhs = ab.add(&DenseMatrix::identity(n));
    let lhs = rhs.add(&a.add(b).scaled(t));
    Ok(lhs.lu()?.solve_matrix(&rhs))
}

/// `(I + tB)⁻¹(I + tA)⁻¹(I + t²AB)`, the composed-resolvent form of `H_t`.
pub fn build_ht_composed<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, t: T) -> Result<DenseMatrix<T>> {
    let n = check_pair(a, b)?;
    let rhs = a.matmul(b).scaled(t * t).add(&DenseMatrix::identity(n));
    let inner = a.scaled(t).shifted(T::one()).lu()?.solve_matrix(&rhs);
    Ok(b.scaled(t).shifted(T::one()).lu()?.solve_matrix(&inner))
}

/// `F_t = J_{tA}(2J_{tB} − I) − J_{tB} + I`, the iteration matrix of the
/// reflected form. Similar to `H_t` via `I + tB`.
pub fn build_ft<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, t: T) -> Result<DenseMatrix<T>> {
    let n = check_pair(a, b)?;
    let id = DenseMatrix::identity(n);
    let jb = b.scaled(t).shifted(T::one()).inverse()?;
    let ja = a.scaled(t).shifted(T::one()).lu()?;
    let reflected = jb.scaled(T::lit(2.0)).sub(&id);
    Ok(ja.solve_matrix(&reflected).sub(&jb).add(&id))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenpairBound<T> {
    pub index: usize,
    pub lambda: Complex<T>,
    pub c: T,
    /// `sqrt(max(¼ − c/(1+2c), 0))`.
    pub radius: T,
    /// `|λ − ½| − radius`; nonpositive when the bound holds.
    pub excess: T,
    pub backward_error: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport<T> {
    pub eigenvalues: Vec<Complex<T>>,
    /// Largest `|λ|` over eigenvalues farther than the solution tolerance
    /// from 1; zero when there are none.
    pub spectral_radius_excluding_fixed: T,
    /// Number of eigenvalues within the solution tolerance of 1.
    pub fixed_count: usize,
    /// `(index, |λ − ½| − ½)` for non-fixed eigenvalues outside the disk.
    pub disk_violations: Vec<(usize, T)>,
    /// Largest `‖(M − λI)z‖/‖M‖_F` over computed unit eigenvectors `z`.
    pub max_backward_error: T,
    /// Per-eigenvector bounds, filled by [`disk_check`].
    pub pairs: Vec<EigenpairBound<T>>,
}

fn radius_excluding<T: Real>(ev: &[Complex<T>], solution_tol: T) -> (T, usize) {
    let one = Complex::new(T::one(), T::zero());
    ev.iter().fold((T::zero(), 0), |(rho, fixed), l| {
        if (*l - one).norm() <= solution_tol {
            (rho, fixed + 1)
        } else {
            (rho.max(l.norm()), fixed)
        }
    })
}

/// Largest `|λ|` over eigenvalues of `H_t` not within `solution_tol` of 1;
/// `None` when every eigenvalue is within it.
pub fn spectral_radius_excluding_fixed<T: Real>(h: &DenseMatrix<T>, solution_tol: T) -> Result<Option<T>> {
    let ev = eigenvalues(h)?;
    let (rho, fixed) = radius_excluding(&ev, solution_tol);
    Ok(if fixed == ev.len() { None } else { Some(rho) })
}

/// Complex spectrum with eigenvectors from inverse iteration. Fails when an
/// eigenpair has backward error above `1e-7·‖M‖_F`.
pub fn spectrum<T: Real>(m: &DenseMatrix<T>) -> Result<SpectrumReport<T>> {
    spectrum_with_vectors(m).map(|(report, _)| report)
}

fn spectrum_with_vectors<T: Real>(m: &DenseMatrix<T>) -> Result<(SpectrumReport<T>, Vec<Vec<Complex<T>>>)> {
    let ev = eigenvalues(m)?;
    let scale = m.frobenius().max(T::min_positive_value());
    let mut vectors = Vec::with_capacity(ev.len());
    let mut worst = T::zero();
    for (k, &lambda) in ev.iter().enumerate() {
        let z = eigen::inverse_iteration(m, lambda, INVERSE_ITERATION_STEPS, 0x5eed_0000 + k as u64);
        worst = worst.max(eigen::eigen_residual(m, lambda, &z) / scale);
        vectors.push(z);
    }
    if worst > T::lit(1e-7) {
        return Err(Error::NoConvergence { what: "eigenpair backward-error check", iterations: INVERSE_ITERATION_STEPS });
    }
    let (rho, fixed) = radius_excluding(&ev, T::lit(DEFAULT_SOLUTION_TOL));
    let report = SpectrumReport {
        eigenvalues: ev,
        spectral_radius_excluding_fixed: rho,
        fixed_count: fixed,
        disk_violations: Vec::new(),
        max_backward_error: worst,
        pairs: Vec::new(),
    };
    Ok((report, vectors))
}

/// Smallest `xᵀMx/‖x‖²` over seeded Gaussian probes.
pub fn min_quadratic_form<T: Real>(m: &DenseMatrix<T>, probes: usize, seed: u64) -> T {
    let mut rng = SeededRng::new(seed);
    (0..probes)
        .map(|_| {
            let x: Vec<T> = rng.gaussian_vec(m.cols());
            linalg::dot(&x, &m.matvec(&x)) / linalg::norm_sq(&x)
        })
        .fold(T::infinity(), T::min)
}

fn assert_monotone<T: Real>(m: &DenseMatrix<T>, name: &str) -> Result<()> {
    let q = min_quadratic_form(m, MONOTONICITY_PROBES, 0x00a5_5e47);
    if q < T::lit(-1e-10) * (T::one() + m.max_abs()) {
        return Err(Error::InvalidParameter(format!("{name} is not monotone (quadratic form {q})")));
    }
    Ok(())
}

/// Checks that every eigenvalue of `H_t` farther than `solution_tol` from 1
/// lies in the disk `|λ − ½| ≤ ½`, and evaluates the sharp per-eigenvector
/// bound.
pub fn disk_check<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    t: T,
    solution_tol: T,
) -> Result<SpectrumReport<T>> {
    check_pair(a, b)?;
    assert_monotone(a, "A")?;
    assert_monotone(b, "B")?;
    let h = build_ht(a, b, t)?;
    let (mut report, vectors) = spectrum_with_vectors(&h)?;
    let half = Complex::new(T::lit(0.5), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let (rho, fixed) = radius_excluding(&report.eigenvalues, solution_tol);
    report.spectral_radius_excluding_fixed = rho;
    report.fixed_count = fixed;
    let scale = h.frobenius().max(T::min_positive_value());
    for (k, (&lambda, z)) in report.eigenvalues.iter().zip(&vectors).enumerate() {
        if (lambda - one).norm() <= solution_tol {
            continue;
        }
        let dist = (lambda - half).norm();
        if dist > T::lit(0.5) + T::lit(DISK_TOL) {
            report.disk_violations.push((k, dist - T::lit(0.5)));
        }
        let (c, radius) = c_value(b, t, z)?;
        report.pairs.push(EigenpairBound {
            index: k,
            lambda,
            c,
            radius,
            excess: dist - radius,
            backward_error: eigen::eigen_residual(&h, lambda, z) / scale,
        });
    }
    Ok(report)
}

/// `c = Re⟨Bz, z⟩ / (‖z‖²/t + t‖Bz‖²)` and the radius
/// `sqrt(max(¼ − c/(1+2c), 0))`.
pub fn c_value<T: Real>(b: &DenseMatrix<T>, t: T, z: &[Complex<T>]) -> Result<(T, T)> {
    let z_sq: T = z.iter().map(|c| c.norm_sqr()).sum();
    if !(z_sq > T::zero()) {
        return Err(Error::ZeroVector);
    }
    let bz = eigen::complex_matvec(b, z);
    let re: T = bz.iter().zip(z).map(|(p, q)| (p * q.conj()).re).sum();
    let bz_sq: T = bz.iter().map(|c| c.norm_sqr()).sum();
    let c = re / (z_sq / t + t * bz_sq);
    let radius = (T::lit(0.25) - c / (T::one() + T::lit(2.0) * c)).max(T::zero()).sqrt();
    Ok((c, radius))
}

/// `λ_ρ = 1 − ρ + ρλ`, the eigenvalue of the relaxed map `(1 − ρ)I + ρH`.
pub fn relaxed_eigen_map<T: Real>(lambda: Complex<T>, rho: T) -> Complex<T> {
    Complex::new(T::one() - rho, T::zero()) + lambda * rho
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell<T> {
    pub t: T,
    pub n_iters: usize,
    /// `‖(A + B)u^N‖`.
    pub residual: T,
}

/// Residual after `N` constant-stepsize steps for every `(t, N)` pair. Cells
/// are ordered by `t`, then by `N` as given.
pub fn stepsize_sweep<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    t_grid: &[T],
    n_iters: &[usize],
    u0: &[T],
) -> Result<Vec<SweepCell<T>>> {
    let n = check_pair(a, b)?;
    if u0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u0.len() });
    }
    if t_grid.is_empty() || n_iters.is_empty() {
        return Err(Error::InvalidParameter("stepsize sweep needs nonempty grids".into()));
    }
    let sum = a.add(b);
    let max_n = n_iters.iter().copied().max().unwrap_or(0);
    let rows: Result<Vec<Vec<SweepCell<T>>>> = t_grid
        .par_iter()
        .map(|&t| {
            let op_a = LinearOperator::cached(a.clone(), "A");
            let op_b = LinearOperator::cached(b.clone(), "B");
            let mut residuals = vec![T::zero(); max_n + 1];
            residuals[0] = linalg::norm(&sum.matvec(u0));
            let mut u = u0.to_vec();
            for k in 1..=max_n {
                u = dr_step_form1(&op_a, &op_b, t, &u)?;
                residuals[k] = linalg::norm(&sum.matvec(&u));
            }
            Ok(n_iters.iter().map(|&k| SweepCell { t, n_iters: k, residual: residuals[k] }).collect())
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalStep<T> {
    pub t_opt: T,
    pub rho_opt: T,
}

const GRID_POINTS: usize = 41;

/// Best constant stepsize on `[lo, hi]` for the asymptotic rate
/// `ρ̂(t) = spectral_radius_excluding_fixed(H_t)`.
///
/// A log-spaced grid locates the best cell, then golden-section search in
/// `log t` refines it until the bracket is narrower than `tol` relative to
/// `t`. `ρ̂` need not be unimodal, so the result is the best value found.
/// When no eigenvalue is ever separated from 1, returns the midpoint of the
/// range with `rho_opt = 0`.
pub fn optimal_constant_stepsize<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    t_range: (T, T),
    tol: T,
) -> Result<OptimalStep<T>> {
    check_pair(a, b)?;
    let (lo, hi) = t_range;
    if !(lo > T::zero() && lo < hi && hi.is_finite()) || !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("invalid stepsize range [{lo}, {hi}] or tol {tol}")));
    }
    let solution_tol = T::lit(DEFAULT_SOLUTION_TOL);
    let rho_at = |log_t: T| -> Result<Option<T>> {
        spectral_radius_excluding_fixed(&build_ht(a, b, log_t.exp())?, solution_tol)
    };
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / T::lit((GRID_POINTS - 1) as f64);
    let grid: Vec<T> = (0..GRID_POINTS).map(|i| llo + step * T::lit(i as f64)).collect();
    let values: Vec<Option<T>> = grid.par_iter().map(|&x| rho_at(x)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|r| (i, r)))
        .fold(None, |acc: Option<(usize, T)>, cur| match acc {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        });
    let Some((i_best, rho_best)) = best else {
        return Ok(OptimalStep { t_opt: (lo + hi) / T::lit(2.0), rho_opt: T::zero() });
    };
    let objective = |x: T| -> Result<T> { Ok(rho_at(x)?.unwrap_or_else(T::infinity)) };
    let mut left = grid[i_best.saturating_sub(1)];
    let mut right = grid[(i_best + 1).min(GRID_POINTS - 1)];
    let golden = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = right - golden * (right - left);
    let mut x2 = left + golden * (right - left);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    let log_tol = (T::one() + tol).ln();
    let mut guard = 0;
    while right - left > log_tol && guard < 200 {
        guard += 1;
        if f1 <= f2 {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - golden * (right - left);
            f1 = objective(x1)?;
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + golden * (right - left);
            f2 = objective(x2)?;
        }
    }
    let (x_ref, f_ref) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(if f_ref <= rho_best {
        OptimalStep { t_opt: x_ref.exp(), rho_opt: f_ref }
    } else {
        OptimalStep { t_opt: grid[i_best].exp(), rho_opt: rho_best }
    })
}
