//! Single solves.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use drsplit::admm::{solve_admm, AdmmMethod, AdmmOutcome};
use drsplit::dr::{check_compatibility, solve_dr_with, SolveHooks};
use drsplit::{Controller, Form, Instance, Outcome, SolveStatus, StopRule};

use crate::config::{AdmmMethodName, ModeName, RunConfig, SolverKind};
use crate::output::{num, opt_num, CsvFile, ADMM_TRACE_HEADER, SUMMARY_HEADER, TRACE_HEADER};
use crate::problem;

/// Exit status of a finished solve.
pub fn status_code(converged: bool) -> u8 {
    if converged {
        0
    } else {
        2
    }
}

pub fn solve_dr_instance(inst: &Instance, ctrl: Controller, stop: StopRule<f64>, form: Form) -> Result<Outcome> {
    let (a, b) = inst
        .pair()
        .with_context(|| format!("`{}` is an ADMM problem; set solver.kind = \"admm\"", inst.name))?;
    check_compatibility(a.as_ref(), b.as_ref(), &ctrl, &stop, form)?;
    let objective = inst.objective().map(|f| f.as_ref() as &dyn Fn(&[f64]) -> f64);
    let hooks = SolveHooks { objective, on_step: None };
    Ok(solve_dr_with(a.as_ref(), b.as_ref(), ctrl, stop, form, &inst.x0, hooks)?)
}

pub fn admm_method(cfg: &RunConfig, name: AdmmMethodName, t: Option<f64>) -> Result<AdmmMethod<f64>> {
    if cfg.stepsize.mode != ModeName::AdaptiveSingleValued {
        bail!("stepsize.mode applies to DR only; choose the ADMM variant with solver.method");
    }
    Ok(match name {
        AdmmMethodName::Vanilla => AdmmMethod::Vanilla { t: t.unwrap_or(1.0) },
        AdmmMethodName::Rb => AdmmMethod::residual_balancing(t.unwrap_or(1.0)),
        AdmmMethodName::Adaptive => {
            AdmmMethod::Adaptive(cfg.stepsize.controller_for(ModeName::AdaptiveSingleValued, t, || Ok(1.0))?)
        }
    })
}

pub fn solve_admm_instance(inst: &Instance, method: &AdmmMethod<f64>, cfg: &RunConfig) -> Result<AdmmOutcome<f64>> {
    let p = inst
        .split()
        .with_context(|| format!("`{}` is a DR problem; set solver.kind = \"dr\"", inst.name))?;
    Ok(solve_admm(p.as_ref(), method, cfg.stop.admm_stop(), None)?)
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<u8> {
    let inst = problem::build(cfg.solver.kind, &cfg.problem.name, &cfg.problem.dims, cfg.problem.seed)?;
    let clock = Instant::now();
    let (converged, summary) = match cfg.solver.kind {
        SolverKind::Dr => {
            let ctrl = cfg.stepsize.controller(|| problem::lipschitz_norm(&inst))?;
            let outcome = solve_dr_instance(&inst, ctrl, cfg.stop.dr_rule(), cfg.solver.form)?;
            let wall_ns = clock.elapsed().as_nanos() as u64;
            let mut trace = CsvFile::create(out, "trace.csv", TRACE_HEADER)?;
            for r in &outcome.trace.rows {
                trace.row([
                    r.n.to_string(),
                    num(r.t),
                    opt_num(r.kappa),
                    num(r.fixed_point_residual),
                    opt_num(r.linear_residual),
                    opt_num(r.objective),
                    r.wall_time_ns.to_string(),
                ])?;
            }
            trace.finish()?;
            let last = outcome.trace.last();
            let converged = outcome.status == SolveStatus::Converged;
            let summary = [
                format!("dr:{}", cfg.solver.form.name()),
                cfg.stepsize.mode.to_string(),
                status_name(converged).into(),
                outcome.state.n.to_string(),
                num(outcome.state.t),
                opt_num(last.map(|r| r.fixed_point_residual)),
                opt_num(last.and_then(|r| r.objective)),
                wall_ns.to_string(),
            ];
            (converged, summary)
        }
        SolverKind::Admm => {
            let method = admm_method(cfg, cfg.solver.method, cfg.stepsize.t)?;
            let outcome = solve_admm_instance(&inst, &method, cfg)?;
            let wall_ns = clock.elapsed().as_nanos() as u64;
            let mut trace = CsvFile::create(out, "trace.csv", ADMM_TRACE_HEADER)?;
            for r in &outcome.trace {
                trace.row([r.n.to_string(), num(r.t), num(r.primal_residual), num(r.dual_residual), num(r.objective)])?;
            }
            trace.finish()?;
            let summary = [
                "admm".into(),
                admm_name(cfg.solver.method).into(),
                status_name(outcome.converged).into(),
                outcome.iterations.to_string(),
                num(outcome.state.t),
                num(outcome.primal_residual),
                num(outcome.objective),
                wall_ns.to_string(),
            ];
            (outcome.converged, summary)
        }
    };
    let mut file = CsvFile::create(out, "summary.csv", SUMMARY_HEADER)?;
    let mut row = vec![inst.name.clone(), inst.seed.to_string()];
    row.extend(summary);
    println!("{} seed {}: {} after {} iterations", row[0], row[1], row[4], row[5]);
    file.row(row)?;
    file.finish()?;
    Ok(status_code(converged))
}

pub fn status_name(converged: bool) -> &'static str {
    if converged {
        "converged"
    } else {
        "max_iters"
    }
}

pub fn admm_name(m: AdmmMethodName) -> &'static str {
    match m {
        AdmmMethodName::Vanilla => "vanilla",
        AdmmMethodName::Adaptive => "adaptive",
        AdmmMethodName::Rb => "rb",
    }
}
