use qlob_core::poisson::{norm_integral_expected, PoissonParams};
use qlob_core::verify::{
    classical_limit, eval_function, run_all, run_check, CheckParams, EvalParams,
    VerificationReport, CHECK_NAMES,
};
use qlob_core::{QContext, QError};

#[test]
fn registry_is_sorted_and_run_all_follows_it() {
    let mut sorted = CHECK_NAMES.to_vec();
    sorted.sort_unstable();
    assert_eq!(sorted, CHECK_NAMES.to_vec());
    let reports = run_all(&CheckParams::default()).unwrap();
    let names: Vec<_> = reports.iter().map(|r| r.check_name.as_str()).collect();
    assert_eq!(names, CHECK_NAMES.to_vec());
    for r in &reports {
        assert_eq!(r.passed, r.residual <= r.tolerance, "{}", r.check_name);
    }
}

fn without_time(mut r: VerificationReport) -> VerificationReport {
    r.runtime_ms = 0;
    r
}

#[test]
fn reports_are_deterministic() {
    let p = CheckParams::default();
    for name in ["lemma-a1", "fourier-roundtrip", "diagram"] {
        let a = without_time(run_check(name, &p).unwrap())
            .to_json()
            .unwrap();
        let b = without_time(run_check(name, &p).unwrap())
            .to_json()
            .unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn tolerance_override_is_applied() {
    let p = CheckParams {
        tol: Some(0.0),
        ..Default::default()
    };
    let r = run_check("qbinom-75", &p).unwrap();
    assert_eq!(r.tolerance, 0.0);
    assert_eq!(r.passed, r.residual == 0.0);
}

#[test]
fn invalid_ranges_are_rejected() {
    for p in [
        CheckParams {
            q: 0.0,
            ..Default::default()
        },
        CheckParams {
            delta: 3,
            ..Default::default()
        },
        CheckParams {
            cutoff: 0,
            ..Default::default()
        },
    ] {
        assert!(
            matches!(run_check("lemma-a1", &p), Err(QError::InvalidParameter(_))),
            "{p:?}"
        );
    }
    let p = CheckParams {
        nu: 1.0,
        ..Default::default()
    };
    assert!(run_check("qnu-crosscheck", &p).is_err());
}

#[test]
fn norm_check_compares_against_closed_value() {
    let ctx = QContext::default();
    let p = PoissonParams::new(0.5).unwrap();
    let q2 = ctx.q2();
    let expected = -(1.0 - q2) / (1.0 - q2.powf(-0.5));
    assert!((norm_integral_expected(&p, &ctx) - expected).abs() < 1e-15);
    let r = run_check("norm-integral-79", &CheckParams::default()).unwrap();
    assert!((r.details["expected"] - expected).abs() < 1e-15);
}

#[test]
fn classical_limit_table() {
    let rows = classical_limit(0.5, &[0.9, 0.99, 0.999]).unwrap();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        assert!(w[1].qgamma < w[0].qgamma);
        assert!(w[1].pkernel < w[0].pkernel);
        assert!(w[1].k2_shape < w[0].k2_shape);
    }
    assert!(rows[2].pkernel <= 1e-2);
    assert!(classical_limit(0.5, &[]).unwrap().is_empty());
}

#[test]
fn eval_reports_row_errors() {
    let ctx = QContext::default();
    let ep = EvalParams { nu: 0.5, h: 1.0 };
    let rows = eval_function("qexp-e", &[0.5, 1.0, 4.0], ep, &ctx).unwrap();
    assert!(rows[0].error.is_none());
    assert!(rows[1].error.is_some(), "z = 1 is a pole of e_q2");
    assert!(rows[2].error.is_some(), "z = 1/q^2 is a pole of e_q2");
    let rows = eval_function("j2", &[0.0], ep, &ctx).unwrap();
    assert_eq!(rows[0].re, Some(1.0));
}
