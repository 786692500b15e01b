use std::collections::BTreeMap;
use std::sync::Arc;

use drsplit::admm::{solve_admm, AdmmMethod, AdmmStop};
use drsplit::diagnostics::{firm_nonexpansive_violation, resolvent_identity_error, skew_defect};
use drsplit::operators::{
    linear_monotone_resolvent, random_monotone_matrix, BlockDiagonal, DiskNormalCone, GradientSkewOperator,
    L1Subdifferential, LinearOperator, MonotoneOperator, OperatorSpec, QuadraticFidelity, ShiftedOperator,
    ZeroOperator,
};
use drsplit::problems::{gen_admm_suite, gen_dr_problem, SuiteDims, SUITE_NAMES};
use drsplit::stepsize::verify_summable_increments;
use drsplit::{Controller, ConservationSchedule, Matrix, Quotient, SeededRng};
use proptest::prelude::*;

const STEPSIZES: [f64; 3] = [0.1, 1.0, 10.0];

fn catalog() -> Vec<OperatorSpec<f64>> {
    let mut rng = SeededRng::new(41);
    let mut ops: Vec<OperatorSpec<f64>> = vec![
        Arc::new(ZeroOperator::new(6)),
        Arc::new(LinearOperator::new(random_monotone_matrix(&mut rng, 8, 3, 1.0), "M")),
        Arc::new(LinearOperator::cached(random_monotone_matrix(&mut rng, 5, 5, 0.0), "M")),
        Arc::new(L1Subdifferential::new(7, 0.3)),
        Arc::new(QuadraticFidelity::new(rng.gaussian_vec(9))),
        Arc::new(DiskNormalCone::new(4, 0.5)),
        Arc::new(GradientSkewOperator::new(3, 4)),
        Arc::new(ShiftedOperator::new(Arc::new(L1Subdifferential::new(4, 1.0)), rng.gaussian_vec(4))),
        Arc::new(BlockDiagonal::new(vec![
            Arc::new(QuadraticFidelity::new(rng.gaussian_vec(3))) as OperatorSpec<f64>,
            Arc::new(DiskNormalCone::new(3, 0.2)),
        ])),
    ];
    for (name, dims) in [
        ("linear_toy", vec![("m", 20.0)]),
        ("lasso", vec![("rows", 6.0), ("cols", 15.0), ("alpha", 0.2)]),
        ("rof", vec![("rows", 5.0), ("cols", 6.0), ("lambda", 0.1), ("noise", 0.1)]),
    ] {
        let dims: BTreeMap<String, f64> = dims.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let p = gen_dr_problem::<f64>(name, &dims, 3).unwrap();
        let (a, b) = p.pair().unwrap();
        ops.push(a.clone());
        ops.push(b.clone());
    }
    ops
}

#[test]
fn every_resolvent_is_firmly_nonexpansive() {
    for (i, op) in catalog().iter().enumerate() {
        for t in STEPSIZES {
            for spread in [1.0, 100.0] {
                let v = firm_nonexpansive_violation(op.as_ref(), t, 1000, 7 + i as u64, spread).unwrap();
                assert!(v <= 1e-9, "{} at t = {t}: violation {v:e}", op.label());
            }
        }
    }
}

#[test]
fn resolvent_identity_for_single_valued_operators() {
    let mut checked = 0;
    for op in catalog() {
        for t in STEPSIZES {
            if let Some(err) = resolvent_identity_error(op.as_ref(), t, 200, 5).unwrap() {
                assert!(err <= 1e-9, "{} at t = {t}: {err:e}", op.label());
                checked += 1;
            }
        }
    }
    assert!(checked >= 15);
}

#[test]
fn rof_coupling_is_skew() {
    let dims = BTreeMap::from([("rows".to_string(), 7.0), ("cols".to_string(), 9.0)]);
    let p = gen_dr_problem::<f64>("rof", &dims, 12).unwrap();
    let (_, b) = p.pair().unwrap();
    assert!(skew_defect(b.as_ref(), 100, 3).unwrap() <= 1e-10);
}

#[test]
fn generation_is_seed_deterministic() {
    let dims = BTreeMap::new();
    for name in ["linear_toy", "lasso", "rof"] {
        let a = gen_dr_problem::<f64>(name, &dims, 77).unwrap();
        let b = gen_dr_problem::<f64>(name, &dims, 77).unwrap();
        let c = gen_dr_problem::<f64>(name, &dims, 78).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint(), "{name}");
        assert_ne!(a.fingerprint(), c.fingerprint(), "{name}");
    }
    let dims = SuiteDims::default();
    for name in SUITE_NAMES {
        let a = gen_admm_suite::<f64>(name, &dims, 5).unwrap();
        let b = gen_admm_suite::<f64>(name, &dims, 5).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint(), "{name}");
    }
}

#[test]
fn adaptive_admm_traces_obey_increment_bounds() {
    let dims = SuiteDims::default();
    for name in SUITE_NAMES {
        for seed in 0..3 {
            let p = gen_admm_suite::<f64>(name, &dims, 300 + seed).unwrap();
            let method = AdmmMethod::adaptive();
            let AdmmMethod::Adaptive(ctrl) = &method else { unreachable!() };
            let stop = AdmmStop { max_iters: 10_000, tol: 1e-9 };
            let out = solve_admm(p.split().unwrap().as_ref(), &method, stop, None).unwrap();
            assert!(out.primal_residual <= 1e-6, "{name} seed {seed}: {:e}", out.primal_residual);
            let ts: Vec<f64> = out.trace.iter().map(|r| r.t).collect();
            assert!(ts.iter().all(|&t| t >= ctrl.t_min && t <= ctrl.t_max), "{name} seed {seed}");
            assert!(verify_summable_increments(&ts, ctrl).passed, "{name} seed {seed}");
        }
    }
}

fn multiplicative_drift(schedule: ConservationSchedule<f64>, rng: &mut SeededRng) -> f64 {
    let t0 = 10f64.powf(rng.uniform_in(-2.0, 2.0));
    let mut ctrl = Controller::adaptive_multivalued().with_schedule(schedule).with_initial(t0);
    let mut at_1e3 = 0.0;
    for n in 1..=10_000 {
        let t = ctrl.next_from_kappa(Quotient::Finite(10f64.powf(rng.uniform_in(-6.0, 6.0))));
        assert!(t.is_finite() && t > 0.0);
        if n == 1_000 {
            at_1e3 = t;
        }
    }
    (ctrl.current() - at_1e3).abs() / at_1e3
}

#[test]
fn multiplicative_products_settle() {
    let mut rng = SeededRng::new(2024);
    let fast = ConservationSchedule::geometric(0.5, 10.0).unwrap();
    for case in 0..10_000 {
        let rel = multiplicative_drift(fast.clone(), &mut rng);
        assert!(rel < 1e-6, "case {case}: relative drift {rel:e}");
    }
}

fn quotient() -> impl Strategy<Value = Quotient<f64>> {
    prop_oneof![
        1 => Just(Quotient::Infinite),
        1 => Just(Quotient::Finite(0.0)),
        8 => (-8.0f64..8.0).prop_map(|e| Quotient::Finite(10f64.powf(e))),
    ]
}

fn dense(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, n)
}

proptest! {
    #[test]
    fn single_valued_controller_stays_in_box(
        lo in 1e-4f64..1.0,
        width in 1e-3f64..1e3,
        base in 0.05f64..0.95,
        scale in 1.0f64..200.0,
        raws in proptest::collection::vec(quotient(), 1..200),
    ) {
        let schedule = ConservationSchedule::geometric(base, scale).unwrap();
        let make = || Controller::adaptive_single_valued().with_bounds(lo, lo + width).with_schedule(schedule.clone());
        let (mut c1, mut c2) = (make(), make());
        let a: Vec<f64> = raws.iter().map(|&r| c1.next_from_quotient(r)).collect();
        let b: Vec<f64> = raws.iter().map(|&r| c2.next_from_quotient(r)).collect();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert!(a.iter().all(|&t| t >= lo && t <= lo + width));
        prop_assert!(verify_summable_increments(&a, &make()).passed);
    }

    #[test]
    fn schedule_weights_are_summable(base in 0.01f64..0.99, scale in 0.5f64..500.0) {
        let s = ConservationSchedule::geometric(base, scale).unwrap();
        prop_assert_eq!(s.omega(0), 1.0);
        prop_assert!((0..10).all(|n| s.omega(n) > 0.0));
        let partial: f64 = (0..5_000).map(|n| s.omega(n)).inspect(|w| assert!((0.0..=1.0).contains(w))).sum();
        prop_assert!(partial <= s.sum_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn linear_resolvent_matches_dense_solve(n in 1usize..=8, seed in any::<u64>(), t in 0.01f64..100.0, x in dense(8)) {
        let mut rng = SeededRng::new(seed);
        let rank = 1 + rng.below(n as u64) as usize;
        let skew = rng.uniform_in(0.0, 2.0);
        let m: Matrix = random_monotone_matrix(&mut rng, n, rank, skew);
        let x = &x[..n];
        let z = linear_monotone_resolvent(&m, t, x).unwrap();
        let oracle = nalgebra::DMatrix::from_fn(n, n, |i, j| f64::from(u8::from(i == j)) + t * m[(i, j)])
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(x))
            .unwrap();
        let scale = 1.0 + oracle.norm();
        for (a, b) in z.iter().zip(oracle.iter()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn l1_resolvent_is_soft_threshold(alpha in 0.0f64..2.0, t in 0.01f64..10.0, x in dense(6)) {
        let op = L1Subdifferential::new(6, alpha);
        let z = op.resolvent(t, &x).unwrap();
        for (zi, xi) in z.iter().zip(&x) {
            let expect = xi.signum() * (xi.abs() - alpha * t).max(0.0);
            prop_assert!((zi - expect).abs() <= 1e-15 * (1.0 + xi.abs()));
        }
    }
}
