//! Quick invariant checks on seeded instances. Each check either returns a
//! one-line detail or fails with the first violation.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{ensure, Context, Result};

use drsplit::admm::dual_correspondence_check;
use drsplit::analysis::{disk_check, DEFAULT_SOLUTION_TOL};
use drsplit::diagnostics::{firm_nonexpansive_violation, resolvent_identity_error, skew_defect};
use drsplit::operators::random_monotone_matrix;
use drsplit::problems::{gen_dr_problem, gen_two_block_qp};
use drsplit::stepsize::verify_summable_increments;
use drsplit::{Controller, Form, Instance, Quotient, SeededRng, StopRule};

use crate::run::solve_dr_instance;

fn dr_problems() -> Result<Vec<Instance>> {
    let small = |pairs: &[(&str, f64)]| pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>();
    Ok(vec![
        gen_dr_problem("linear_toy", &small(&[("m", 20.0)]), 1)?,
        gen_dr_problem("lasso", &small(&[("rows", 8.0), ("cols", 30.0)]), 1)?,
        gen_dr_problem("rof", &small(&[("rows", 6.0), ("cols", 6.0)]), 1)?,
    ])
}

fn firm_nonexpansive() -> Result<String> {
    let mut worst = f64::NEG_INFINITY;
    for (i, p) in dr_problems()?.iter().enumerate() {
        let (a, b) = p.pair().context("DR problem without operators")?;
        for op in [a, b] {
            for t in [0.1, 1.0, 10.0] {
                let v = firm_nonexpansive_violation(op.as_ref(), t, 1000, i as u64, 1.0)?;
                ensure!(v <= 1e-9, "{} of {} at t = {t}: violation {v:e}", op.label(), p.name);
                worst = worst.max(v);
            }
        }
    }
    Ok(format!("max violation {worst:.3e}"))
}

fn resolvent_identity() -> Result<String> {
    let mut worst: f64 = 0.0;
    for p in dr_problems()? {
        let (a, b) = p.pair().context("DR problem without operators")?;
        for op in [a, b] {
            for t in [0.1, 1.0, 10.0] {
                if let Some(e) = resolvent_identity_error(op.as_ref(), t, 100, 3)? {
                    ensure!(e <= 1e-9, "{} of {} at t = {t}: error {e:e}", op.label(), p.name);
                    worst = worst.max(e);
                }
            }
        }
    }
    Ok(format!("max relative error {worst:.3e}"))
}

fn rof_skew() -> Result<String> {
    let p = &dr_problems()?[2];
    let (_, b) = p.pair().context("DR problem without operators")?;
    let d = skew_defect(b.as_ref(), 100, 4).context("ROF coupling has no forward map")?;
    ensure!(d <= 1e-10, "|<Bz, z>| / |z|^2 = {d:e}");
    Ok(format!("max |<Bz, z>|/|z|^2 = {d:.3e}"))
}

fn adaptive_trace() -> Result<String> {
    let dims = BTreeMap::from([("m".to_string(), 50.0)]);
    let inst = gen_dr_problem("linear_toy", &dims, 7)?;
    let ctrl = Controller::adaptive_single_valued();
    let out = solve_dr_instance(&inst, ctrl.clone(), StopRule::linear_residual(10_000, 1e-6), Form::Nonstationary)?;
    let ts = out.trace.stepsizes();
    ensure!(ts.iter().all(|&t| t >= ctrl.t_min && t <= ctrl.t_max), "stepsize left [t_min, t_max]");
    let report = verify_summable_increments(&ts, &ctrl);
    ensure!(report.passed, "increment bound violated at n = {:?}", report.first_violation);
    Ok(format!("{} iterations, total variation {:.3e}", out.state.n, report.total_variation))
}

fn controller_determinism() -> Result<String> {
    let mut rng = SeededRng::new(11);
    for case in 0..100 {
        let raws: Vec<Quotient<f64>> =
            (0..200).map(|_| Quotient::Finite(10f64.powf(rng.uniform_in(-6.0, 6.0)))).collect();
        let (mut c1, mut c2) = (Controller::adaptive_single_valued(), Controller::adaptive_single_valued());
        let same = raws.iter().all(|&r| c1.next_from_quotient(r).to_bits() == c2.next_from_quotient(r).to_bits());
        ensure!(same, "case {case}: identical inputs gave different stepsizes");
    }
    Ok("100 sequences bit-identical".into())
}

fn seed_determinism() -> Result<String> {
    let (a, b) = (dr_problems()?, dr_problems()?);
    for (x, y) in a.iter().zip(&b) {
        ensure!(x.fingerprint() == y.fingerprint(), "{} differs between generations", x.name);
    }
    Ok(format!("{} problems reproduced", a.len()))
}

fn disk_lemma() -> Result<String> {
    let mut rng = SeededRng::new(5);
    let mut eigenvalues = 0;
    for case in 0..10 {
        let n = 5 + rng.below(16) as usize;
        let (rank_a, rank_b) = (1 + rng.below(n as u64) as usize, 1 + rng.below(n as u64) as usize);
        let a = random_monotone_matrix(&mut rng, n, rank_a, 1.0);
        let b = random_monotone_matrix(&mut rng, n, rank_b, 1.0);
        for t in [0.1, 1.0, 10.0] {
            let report = disk_check(&a, &b, t, DEFAULT_SOLUTION_TOL)?;
            ensure!(report.disk_violations.is_empty(), "case {case}, t = {t}: {:?}", report.disk_violations);
            eigenvalues += report.eigenvalues.len();
        }
    }
    Ok(format!("{eigenvalues} eigenvalues inside the disk"))
}

fn admm_duality() -> Result<String> {
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let inst = gen_two_block_qp(8, seed)?;
        let p = inst.split().context("two-block QP is a split problem")?;
        let report = dual_correspondence_check(p.as_ref(), 50, seed, 1e-8, false)?;
        ensure!(report.passed, "seed {seed}: diverged at n = {:?}", report.first_divergence);
        worst = worst.max(report.max_w_gap);
    }
    Ok(format!("5 seeds, max w gap {worst:.3e}"))
}

type Check = (&'static str, fn() -> Result<String>);

const CHECKS: &[Check] = &[
    ("firm nonexpansiveness", firm_nonexpansive),
    ("resolvent identity", resolvent_identity),
    ("rof skew coupling", rof_skew),
    ("adaptive stepsize trace", adaptive_trace),
    ("controller determinism", controller_determinism),
    ("seed determinism", seed_determinism),
    ("disk lemma", disk_lemma),
    ("admm-dr duality", admm_duality),
];

pub fn selftest() -> Result<u8> {
    let mut failed = 0;
    for (name, check) in CHECKS {
        let clock = Instant::now();
        let result = check();
        let secs = clock.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("selftest {name:<24} PASS [{secs:.1}s] {detail}"),
            Err(e) => {
                failed += 1;
                println!("selftest {name:<24} FAIL [{secs:.1}s] {e:#}");
            }
        }
    }
    println!("selftest: {} passed, {failed} failed", CHECKS.len() - failed);
    Ok(u8::from(failed > 0))
}
