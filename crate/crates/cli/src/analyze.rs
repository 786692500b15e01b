//! Spectral analysis of linear problems.

use std::path::Path;

use anyhow::{bail, Context, Result};

use drsplit::analysis::{
    build_ht, eigenvalues, optimal_constant_stepsize, sort_lexicographic, spectral_radius_excluding_fixed,
    stepsize_sweep, DEFAULT_SOLUTION_TOL,
};
use drsplit::problems::archive::read_matrix_text;
use drsplit::Matrix;

use crate::config::{RunConfig, SolverKind};
use crate::output::{num, CsvFile, OPTSTEP_HEADER, SPECTRUM_HEADER, STEPSIZE_SWEEP_HEADER};
use crate::problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Analysis {
    /// Eigenvalues of the DR iteration matrix at each stepsize.
    Spectrum,
    /// Residual after N constant-stepsize steps over a stepsize grid.
    Sweep,
    /// Constant stepsize minimizing the asymptotic rate.
    Optstep,
}

/// `(A, B, u0)` from the matrix files when given, else from the problem.
fn linear_pair(cfg: &RunConfig) -> Result<(Matrix, Matrix, Vec<f64>)> {
    let an = &cfg.analyze;
    match (&an.matrix_a, &an.matrix_b) {
        (Some(pa), Some(pb)) => {
            let read = |p: &Path| -> Result<Matrix> {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                read_matrix_text(&text).with_context(|| format!("parsing {}", p.display()))
            };
            let (a, b) = (read(pa)?, read(pb)?);
            let u0 = vec![1.0; a.rows()];
            Ok((a, b, u0))
        }
        (None, None) => {
            let inst = problem::build(SolverKind::Dr, &cfg.problem.name, &cfg.problem.dims, cfg.problem.seed)?;
            let (a, b) = inst
                .matrices()
                .with_context(|| format!("`{}` is not linear; set analyze.matrix_a and analyze.matrix_b", inst.name))?;
            Ok((a.clone(), b.clone(), inst.x0.clone()))
        }
        _ => bail!("invalid [analyze] section: give both matrix_a and matrix_b or neither"),
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) || points < 2 {
        bail!("invalid [analyze] section: need 0 < t_range[0] < t_range[1] and points >= 2");
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    Ok((0..points).map(|i| lo * (step * i as f64).exp()).collect())
}

pub fn analyze(cfg: &RunConfig, what: Analysis, out: &Path) -> Result<u8> {
    let (a, b, u0) = linear_pair(cfg)?;
    let an = &cfg.analyze;
    match what {
        Analysis::Spectrum => {
            let ts = if an.stepsizes.is_empty() { vec![0.5, 1.5, 5.0] } else { an.stepsizes.clone() };
            let mut file = CsvFile::create(out, "spectrum.csv", SPECTRUM_HEADER)?;
            for t in ts {
                let h = build_ht(&a, &b, t)?;
                let mut ev = eigenvalues(&h)?;
                sort_lexicographic(&mut ev);
                for z in &ev {
                    file.row([num(t), num(z.re), num(z.im)])?;
                }
                match spectral_radius_excluding_fixed(&h, DEFAULT_SOLUTION_TOL)? {
                    Some(rho) => println!("t = {t}: rho = {rho:.6}"),
                    None => println!("t = {t}: every eigenvalue is 1"),
                }
            }
            file.finish()?;
        }
        Analysis::Sweep => {
            let ts = if an.stepsizes.is_empty() {
                let [lo, hi] = an.t_range.unwrap_or([0.1, 10.0]);
                log_grid(lo, hi, an.points)?
            } else {
                an.stepsizes.clone()
            };
            let cells = stepsize_sweep(&a, &b, &ts, &an.iterations, &u0)?;
            let mut file = CsvFile::create(out, "stepsize_sweep.csv", STEPSIZE_SWEEP_HEADER)?;
            for c in &cells {
                file.row([num(c.t), c.n_iters.to_string(), num(c.residual)])?;
            }
            file.finish()?;
            for &n in &an.iterations {
                let best = cells.iter().filter(|c| c.n_iters == n).min_by(|x, y| x.residual.total_cmp(&y.residual));
                if let Some(c) = best {
                    println!("N = {n}: smallest residual {:e} at t = {}", c.residual, c.t);
                }
            }
        }
        Analysis::Optstep => {
            let [lo, hi] = an.t_range.unwrap_or([1e-2, 1e2]);
            let best = optimal_constant_stepsize(&a, &b, (lo, hi), an.tol)?;
            let mut file = CsvFile::create(out, "optstep.csv", OPTSTEP_HEADER)?;
            file.row([num(best.t_opt), num(best.rho_opt)])?;
            file.finish()?;
            println!("t_opt = {}, rho_opt = {}", best.t_opt, best.rho_opt);
        }
    }
    Ok(0)
}
