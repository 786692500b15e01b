//! Dense nonsymmetric eigensolver.
//!
//! Eigenvalues come from balancing, Householder reduction to upper
//! Hessenberg form and the implicit Francis double-shift QR iteration.
//! Eigenvectors are recovered on demand by complex inverse iteration on the
//! original matrix.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Diagonal similarity scaling by powers of two that equalizes row and
/// column norms. Eigenvalues are unchanged.
pub fn balance<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in (0..n).filter(|&j| j != i) {
                c += a[(j, i)].abs();
                r += a[(i, j)].abs();
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Orthogonal reduction to upper Hessenberg form, in place.
pub fn hessenberg<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![T::zero(); n];
    for k in 0..n - 2 {
        let alpha_sq: T = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        if alpha_sq == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= T::zero() { -alpha_sq.sqrt() } else { alpha_sq.sqrt() };
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm_sq: T = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm_sq == T::zero() {
            continue;
        }
        let beta = T::lit(2.0) / vnorm_sq;
        // A ← (I − βvvᵀ) A
        for j in 0..n {
            let s: T = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum::<T>() * beta;
            for i in k + 1..n {
                a[(i, j)] -= s * v[i];
            }
        }
        // A ← A (I − βvvᵀ)
        for i in 0..n {
            let s: T = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum::<T>() * beta;
            for j in k + 1..n {
                a[(i, j)] -= s * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix; `a` is destroyed.
///
/// Fails with `NoConvergence` after `100·n` QR sweeps.
pub fn hessenberg_eigenvalues<T: Real>(a: &mut DenseMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = a.rows();
    let mut w = vec![Complex::new(T::zero(), T::zero()); n];
    if n == 0 {
        return Ok(w);
    }
    let eps = T::epsilon();
    let sweep_limit = 100 * n;
    let mut sweeps = 0usize;
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let at = |a: &DenseMatrix<T>, i: isize, j: isize| a[(i as usize, j as usize)];
    let mut nn = n as isize - 1;
    let mut shift = T::zero();
    let (mut p, mut q, mut r): (T, T, T);
    let (mut x, mut y, mut z);
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = at(a, l - 1, l - 1).abs() + at(a, l, l).abs();
                if s == T::zero() {
                    s = anorm;
                }
                if at(a, l, l - 1).abs() <= eps * s {
                    a[(l as usize, l as usize - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            x = at(a, nn, nn);
            if l == nn {
                w[nn as usize] = Complex::new(x + shift, T::zero());
                nn -= 1;
            } else {
                y = at(a, nn - 1, nn - 1);
                let ww = at(a, nn, nn - 1) * at(a, nn - 1, nn);
                if l == nn - 1 {
                    p = T::lit(0.5) * (y - x);
                    q = p * p + ww;
                    z = q.abs().sqrt();
                    x += shift;
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        let second = if z != T::zero() { x - ww / z } else { x + z };
                        w[nn as usize - 1] = Complex::new(x + z, T::zero());
                        w[nn as usize] = Complex::new(second, T::zero());
                    } else {
                        w[nn as usize] = Complex::new(x + p, -z);
                        w[nn as usize - 1] = Complex::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    sweeps += 1;
                    if sweeps > sweep_limit {
                        return Err(Error::NoConvergence { what: "Hessenberg QR", iterations: sweeps - 1 });
                    }
                    let mut wv = ww;
                    if its > 0 && its.is_multiple_of(10) {
                        // Exceptional shift.
                        shift += x;
                        for i in 0..=nn as usize {
                            a[(i, i)] -= x;
                        }
                        let s = at(a, nn, nn - 1).abs() + at(a, nn - 1, nn - 2).abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        wv = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = at(a, m, m);
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - wv) / at(a, m + 1, m) + at(a, m, m + 1);
                        q = at(a, m + 1, m + 1) - z - rr - ss;
                        r = at(a, m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = at(a, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (at(a, m - 1, m - 1).abs() + z.abs() + at(a, m + 1, m + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        a[(i as usize + 2, i as usize)] = T::zero();
                        if i != m {
                            a[(i as usize + 2, i as usize - 1)] = T::zero();
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        let ku = k as usize;
                        if k != m {
                            p = a[(ku, ku - 1)];
                            q = a[(ku + 1, ku - 1)];
                            r = T::zero();
                            if k + 1 != nn {
                                r = a[(ku + 2, ku - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    a[(ku, ku - 1)] = -a[(ku, ku - 1)];
                                }
                            } else {
                                a[(ku, ku - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in ku..=nn as usize {
                                let mut pp = a[(ku, j)] + q * a[(ku + 1, j)];
                                if k + 1 != nn {
                                    pp += r * a[(ku + 2, j)];
                                    a[(ku + 2, j)] -= pp * z;
                                }
                                a[(ku + 1, j)] -= pp * y;
                                a[(ku, j)] -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l as usize..=mmin as usize {
                                let mut pp = x * a[(i, ku)] + y * a[(i, ku + 1)];
                                if k + 1 != nn {
                                    pp += z * a[(i, ku + 2)];
                                    a[(i, ku + 2)] -= pp * r;
                                }
                                a[(i, ku + 1)] -= pp * q;
                                a[(i, ku)] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(w)
}

/// All eigenvalues of a square matrix, with multiplicity.
pub fn eigenvalues<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_eigenvalues(&mut a)
}

/// Square complex matrix stored row-major, used for shifted solves.
struct ComplexLu<T> {
    n: usize,
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
}

impl<T: Real> ComplexLu<T> {
    /// Factors `M − σI`; pivots below `floor` are replaced by `floor`.
    fn shifted(m: &DenseMatrix<T>, sigma: Complex<T>, floor: T) -> Self {
        let n = m.rows();
        let mut lu: Vec<Complex<T>> =
            m.as_slice().iter().map(|&x| Complex::new(x, T::zero())).collect();
        for i in 0..n {
            lu[i * n + i] = lu[i * n + i] - sigma;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, _) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, T::lit(-1.0)), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            if lu[k * n + k].norm() < floor {
                lu[k * n + k] = Complex::new(floor, T::zero());
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let upd = f * lu[k * n + j];
                    lu[i * n + j] = lu[i * n + j] - upd;
                }
            }
        }
        Self { n, lu, perm }
    }

    fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let upd = self.lu[i * n + j] * x[j];
                x[i] = x[i] - upd;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let upd = self.lu[i * n + j] * x[j];
                x[i] = x[i] - upd;
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}

pub fn complex_norm<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// `M·z` for real `M` and complex `z`.
pub fn complex_matvec<T: Real>(m: &DenseMatrix<T>, z: &[Complex<T>]) -> Vec<Complex<T>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(z)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &zi)| acc + zi * a)
        })
        .collect()
}

/// Unit eigenvector estimate for `lambda` by `steps` rounds of inverse
/// iteration from a seeded random start.
pub fn inverse_iteration<T: Real>(
    m: &DenseMatrix<T>,
    lambda: Complex<T>,
    steps: usize,
    seed: u64,
) -> Vec<Complex<T>> {
    let n = m.rows();
    let scale = m.max_abs().max(T::one());
    let floor = T::epsilon() * scale;
    let lu = ComplexLu::shifted(m, lambda, floor);
    let mut rng = SeededRng::new(seed);
    let mut z: Vec<Complex<T>> =
        (0..n).map(|_| Complex::new(T::lit(rng.gaussian()), T::lit(rng.gaussian()))).collect();
    for _ in 0..steps.max(1) {
        let mut next = lu.solve(&z);
        let nrm = complex_norm(&next);
        if !(nrm > T::zero()) || !nrm.is_finite() {
            break;
        }
        for c in next.iter_mut() {
            *c = *c / nrm;
        }
        z = next;
    }
    let nrm = complex_norm(&z);
    z.iter().map(|c| *c / nrm).collect()
}

/// `‖(M − λI)z‖` for unit `z`.
pub fn eigen_residual<T: Real>(m: &DenseMatrix<T>, lambda: Complex<T>, z: &[Complex<T>]) -> T {
    let mz = complex_matvec(m, z);
    let r: Vec<Complex<T>> = mz.iter().zip(z).map(|(&a, &b)| a - b * lambda).collect();
    complex_norm(&r)
}

/// Lexicographic order on `(re, im)`.
pub fn sort_lexicographic<T: Real>(values: &mut [Complex<T>]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Largest distance between matched entries of two equally sized
/// multisets, matching each entry of `a` (sorted) to its nearest unused
/// entry of `b`. `None` when the sizes differ.
pub fn multiset_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    sort_lexicographic(&mut a);
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for x in &a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (*x - *y).norm()))
            .fold((usize::MAX, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
