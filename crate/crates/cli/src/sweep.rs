//! Seeded grids of solves over problems × methods × stepsizes × seeds.
//!
//! Cells run in parallel, each single-threaded; rows are written in grid
//! order regardless of scheduling.

use std::path::Path;

use anyhow::{bail, Result};
use rayon::prelude::*;

use crate::config::{AdmmMethodName, ModeName, RunConfig, SolverKind};
use crate::output::{num, opt_num, CsvFile, SWEEP_HEADER, TABLE_HEADER};
use crate::problem;
use crate::run::{admm_method, admm_name, solve_admm_instance, solve_dr_instance, status_name};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Method {
    Dr(ModeName),
    Admm(AdmmMethodName),
}

/// `name` or `name@t`; `adaptive` means the single-valued rule for DR.
fn parse_method(kind: SolverKind, spec: &str) -> Result<(Method, Option<f64>)> {
    let (name, pinned) = match spec.split_once('@') {
        Some((name, t)) => match t.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => (name, Some(t)),
            _ => bail!("method `{spec}`: stepsize after `@` must be a positive number"),
        },
        None => (spec, None),
    };
    let method = match (kind, name) {
        (SolverKind::Dr, "fixed") => Method::Dr(ModeName::Fixed),
        (SolverKind::Dr, "lipschitz") => Method::Dr(ModeName::Lipschitz),
        (SolverKind::Dr, "adaptive" | "adaptive_single_valued") => Method::Dr(ModeName::AdaptiveSingleValued),
        (SolverKind::Dr, "adaptive_multivalued") => Method::Dr(ModeName::AdaptiveMultivalued),
        (SolverKind::Admm, "vanilla") => Method::Admm(AdmmMethodName::Vanilla),
        (SolverKind::Admm, "adaptive") => Method::Admm(AdmmMethodName::Adaptive),
        (SolverKind::Admm, "rb") => Method::Admm(AdmmMethodName::Rb),
        (kind, _) => bail!("unknown {} method `{name}`", kind.name()),
    };
    Ok((method, pinned))
}

#[derive(Debug, Clone)]
struct Cell {
    problem: String,
    label: String,
    method: Method,
    t: f64,
    seed: u64,
}

#[derive(Debug, Clone)]
struct CellOutcome {
    t: f64,
    converged: bool,
    iterations: usize,
    objective: Option<f64>,
    residual: f64,
}

fn grid(cfg: &RunConfig) -> Result<Vec<Cell>> {
    let kind = cfg.solver.kind;
    let sweep = &cfg.sweep;
    let problems = if sweep.problems.is_empty() { vec![cfg.problem.name.clone()] } else { sweep.problems.clone() };
    let methods = if sweep.methods.is_empty() {
        vec![match kind {
            SolverKind::Dr => cfg.stepsize.mode.to_string(),
            SolverKind::Admm => admm_name(cfg.solver.method).to_string(),
        }]
    } else {
        sweep.methods.clone()
    };
    let stepsizes = if sweep.stepsizes.is_empty() { vec![cfg.stepsize.t.unwrap_or(1.0)] } else { sweep.stepsizes.clone() };
    if let Some(t) = stepsizes.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        bail!("invalid [sweep] section: stepsizes must be positive, got {t}");
    }
    let seeds = sweep.seed_list(cfg.problem.seed)?;
    let mut cells = Vec::new();
    for problem in &problems {
        for label in &methods {
            let (method, pinned) = parse_method(kind, label)?;
            let ts = pinned.map_or_else(|| stepsizes.clone(), |t| vec![t]);
            for &t in &ts {
                for &seed in &seeds {
                    cells.push(Cell { problem: problem.clone(), label: label.clone(), method, t, seed });
                }
            }
        }
    }
    Ok(cells)
}

fn run_cell(cfg: &RunConfig, cell: &Cell) -> Result<CellOutcome> {
    let inst = problem::build(cfg.solver.kind, &cell.problem, &cfg.problem.dims, cell.seed)?;
    match cell.method {
        Method::Dr(mode) => {
            let ctrl = cfg.stepsize.controller_for(mode, Some(cell.t), || problem::lipschitz_norm(&inst))?;
            let t = ctrl.initial();
            let out = solve_dr_instance(&inst, ctrl, cfg.stop.dr_rule(), cfg.solver.form)?;
            let last = out.trace.last();
            Ok(CellOutcome {
                t,
                converged: out.status == drsplit::SolveStatus::Converged,
                iterations: out.state.n,
                objective: last.and_then(|r| r.objective),
                residual: last.map_or(f64::NAN, |r| r.linear_residual.unwrap_or(r.fixed_point_residual)),
            })
        }
        Method::Admm(name) => {
            let method = admm_method(cfg, name, Some(cell.t))?;
            let out = solve_admm_instance(&inst, &method, cfg)?;
            Ok(CellOutcome {
                t: cell.t,
                converged: out.converged,
                iterations: out.iterations,
                objective: Some(out.objective),
                residual: out.primal_residual,
            })
        }
    }
}

/// Sample mean and standard deviation.
fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Some((mean, var.sqrt()))
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<u8> {
    let cells = grid(cfg)?;
    if cells.is_empty() {
        bail!("sweep grid is empty");
    }
    let results: Vec<Result<CellOutcome>> = cells.par_iter().map(|c| run_cell(cfg, c)).collect();

    let mut file = CsvFile::create(out, "sweep.csv", SWEEP_HEADER)?;
    let mut errors = 0;
    for (cell, res) in cells.iter().zip(&results) {
        let row = match res {
            Ok(r) => [
                cell.problem.clone(),
                cell.label.clone(),
                cell.seed.to_string(),
                num(r.t),
                if r.converged { r.iterations.to_string() } else { String::new() },
                status_name(r.converged).into(),
                opt_num(r.objective),
                num(r.residual),
            ],
            Err(e) => {
                errors += 1;
                eprintln!("cell {} {} seed {} t {}: {e:#}", cell.problem, cell.label, cell.seed, cell.t);
                [
                    cell.problem.clone(),
                    cell.label.clone(),
                    cell.seed.to_string(),
                    num(cell.t),
                    String::new(),
                    "error".into(),
                    String::new(),
                    String::new(),
                ]
            }
        };
        file.row(row)?;
    }
    file.finish()?;

    type Group<'a> = ((String, String), Vec<&'a Result<CellOutcome>>);
    let mut groups: Vec<Group> = Vec::new();
    for (cell, res) in cells.iter().zip(&results) {
        let key = (cell.problem.clone(), cell.label.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(res),
            None => groups.push((key, vec![res])),
        }
    }
    let mut table = CsvFile::create(out, "table.csv", TABLE_HEADER)?;
    println!("{:<14} {:<24} {:>6} {:>10} {:>22}", "problem", "method", "runs", "converged", "iterations mean(std)");
    for ((problem, method), runs) in &groups {
        let its: Vec<f64> =
            runs.iter().filter_map(|r| r.as_ref().ok()).filter(|r| r.converged).map(|r| r.iterations as f64).collect();
        let stats = mean_std(&its);
        let display = stats.map(|(m, s)| format!("{m:.1}({s:.1})")).unwrap_or_default();
        println!("{problem:<14} {method:<24} {:>6} {:>10} {display:>22}", runs.len(), its.len());
        table.row([
            problem.clone(),
            method.clone(),
            runs.len().to_string(),
            its.len().to_string(),
            opt_num(stats.map(|s| s.0)),
            opt_num(stats.map(|s| s.1)),
            display,
        ])?;
    }
    table.finish()?;
    if errors > 0 {
        eprintln!("{errors} of {} cells failed", cells.len());
        return Ok(1);
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_specs() {
        assert_eq!(parse_method(SolverKind::Admm, "vanilla@10").unwrap(), (Method::Admm(AdmmMethodName::Vanilla), Some(10.0)));
        assert_eq!(parse_method(SolverKind::Dr, "adaptive").unwrap().0, Method::Dr(ModeName::AdaptiveSingleValued));
        assert!(parse_method(SolverKind::Dr, "rb").is_err());
        assert!(parse_method(SolverKind::Admm, "vanilla@-1").is_err());
    }

    #[test]
    fn grid_cardinality() {
        let cfg = RunConfig::parse("[sweep]\nstepsizes = [0.5, 1.0, 2.0]\nseeds = [1, 2]\nmethods = [\"fixed\", \"adaptive@3\"]\n")
            .unwrap();
        let cells = grid(&cfg).unwrap();
        assert_eq!(cells.len(), 3 * 2 + 2);
        assert!(cells[6..].iter().all(|c| c.t == 3.0));
    }

    #[test]
    fn sample_statistics() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[4.0]), Some((4.0, 0.0)));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((m, s), (2.0, 1.0));
    }
}
