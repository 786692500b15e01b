//! Randomized probes of operator properties.

use crate::error::Result;
use crate::linalg::{axpy, dist, dot, norm, sub};
use crate::operators::MonotoneOperator;
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Largest `‖Jx − Jy‖² − ⟨Jx − Jy, x − y⟩` over random probe pairs, scaled
/// by `1 + ‖x − y‖²`. Nonpositive (up to rounding) for resolvents of
/// monotone operators.
pub fn firm_nonexpansive_violation<T: Real>(
    op: &dyn MonotoneOperator<T>,
    t: T,
    probes: usize,
    seed: u64,
    spread: f64,
) -> Result<T> {
    let mut rng = SeededRng::new(seed);
    let mut worst = T::neg_infinity();
    for _ in 0..probes {
        let x: Vec<T> = rng.gaussian_vec::<T>(op.dim()).into_iter().map(|v| v * T::lit(spread)).collect();
        let y: Vec<T> = rng.gaussian_vec::<T>(op.dim()).into_iter().map(|v| v * T::lit(spread)).collect();
        let jx = op.resolvent(t, &x)?;
        let jy = op.resolvent(t, &y)?;
        let dj = sub(&jx, &jy);
        let dx = sub(&x, &y);
        let gap = (dot(&dj, &dj) - dot(&dj, &dx)) / (T::one() + dot(&dx, &dx));
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// Largest `‖t·B(J y) − (y − J y)‖ / (1 + ‖y‖)` over random `y`; `None` for
/// set-valued operators.
pub fn resolvent_identity_error<T: Real>(
    op: &dyn MonotoneOperator<T>,
    t: T,
    probes: usize,
    seed: u64,
) -> Result<Option<T>> {
    if !op.is_single_valued() {
        return Ok(None);
    }
    let mut rng = SeededRng::new(seed);
    let mut worst = T::zero();
    for _ in 0..probes {
        let y: Vec<T> = rng.gaussian_vec(op.dim());
        let j = op.resolvent(t, &y)?;
        let Some(bj) = op.forward(&j) else { return Ok(None) };
        let lhs = axpy(t, &bj, &j);
        worst = worst.max(dist(&lhs, &y) / (T::one() + norm(&y)));
    }
    Ok(Some(worst))
}

/// Largest `|⟨Bz, z⟩| / ‖z‖²` over random `z`; zero for skew operators.
pub fn skew_defect<T: Real>(op: &dyn MonotoneOperator<T>, probes: usize, seed: u64) -> Option<T> {
    let mut rng = SeededRng::new(seed);
    let mut worst = T::zero();
    for _ in 0..probes {
        let z: Vec<T> = rng.gaussian_vec(op.dim());
        let bz = op.forward(&z)?;
        worst = worst.max(dot(&bz, &z).abs() / dot(&z, &z));
    }
    Some(worst)
}
