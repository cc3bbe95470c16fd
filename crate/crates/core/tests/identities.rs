use maitland::quad::{theorem_lhs_with, Form, QuadOptions, DEFAULT_MAX_NODES};
use maitland::series::MasterParams;
use maitland::verify::{
    reports_to_csv, sweep, verify_identity, IdentityId, ParamPoint, SweepConfig, SweepOutput, Variant, Verdict,
    LHS_QUAD_TOL,
};
use maitland::wright::{theorem_rhs_pfq, theorem_rhs_wright};
use proptest::prelude::*;

fn point(lambda: f64, mu: f64, a: f64, eta: f64, q: f64, gamma: f64, nu: f64) -> ParamPoint {
    ParamPoint {
        lambda,
        mu,
        a,
        eta,
        q,
        gamma,
        nu,
        p: 2.0,
        delta: 2.5,
        ..ParamPoint::NEUTRAL
    }
}

/// Series parameters a special case reduces to, written out independently.
fn special_case_series(sc: u8, pt: &ParamPoint) -> MasterParams {
    let (p, delta) = if sc >= 3 { (1.0, 1.0) } else { (pt.p, pt.delta) };
    let q = if sc >= 5 { 1.0 } else { pt.q };
    let gamma = if sc >= 7 { 1.0 } else { pt.gamma };
    let beta = if sc >= 9 { 1.0 } else { pt.nu };
    MasterParams::new(pt.eta, beta, gamma, delta, p, q).unwrap()
}

#[test]
fn special_cases_collapse_onto_general_form() {
    let points = [
        point(1.5, 0.75, 1.0, 2.0, 1.0, 2.5, 0.5),
        point(0.75, 2.5, -2.0, 1.0, 1.0, 1.0, 1.0),
        point(2.5, 1.5, 0.25, 2.0, 2.0, 2.5, 1.0),
    ];
    for id in IdentityId::ALL {
        let Some(sc) = id.special_case() else { continue };
        for pt in &points {
            let r = verify_identity(id, pt, 1e-6, Variant::Canonical).unwrap();
            if matches!(r.verdict, Verdict::Skipped { .. }) {
                continue;
            }
            let mp = special_case_series(sc, pt);
            let general = if id.is_pfq_form() {
                theorem_rhs_pfq(&mp, pt.lambda, pt.mu, -pt.a, 1e-15)
            } else {
                theorem_rhs_wright(&mp, pt.lambda, pt.mu, -pt.a, 1e-15)
            }
            .unwrap();
            let rhs = r.rhs.unwrap();
            assert!(
                (rhs - general.value).abs() <= 1e-12 * general.value.abs(),
                "{id} at {pt:?}: {rhs} vs {}",
                general.value
            );
            let opts = QuadOptions {
                tol: LHS_QUAD_TOL,
                max_nodes: DEFAULT_MAX_NODES,
            };
            let lhs = theorem_lhs_with(&mp, pt.lambda, pt.mu, pt.a, Form::E, opts).unwrap();
            assert_eq!(r.lhs, Some(lhs.value), "{id}");
            assert_eq!(r.verdict, Verdict::Pass, "{id} at {pt:?}");
        }
    }
}

#[test]
fn wright_and_pfq_verdicts_agree_on_integer_points() {
    for eta in [1.0, 2.0, 3.0] {
        for q in [1.0, 2.0, 3.0] {
            for a in [-2.0, 1.0] {
                let pt = ParamPoint {
                    lambda: 1.5,
                    mu: 0.75,
                    a,
                    eta,
                    q,
                    p: 2.0,
                    gamma: 2.5,
                    delta: 1.0,
                    nu: 0.5,
                    n: 0,
                };
                let w = verify_identity(IdentityId::Thm21Wright, &pt, 1e-6, Variant::Canonical).unwrap();
                let f = verify_identity(IdentityId::Thm21Pfq, &pt, 1e-6, Variant::Canonical).unwrap();
                assert_eq!(w.verdict.label(), f.verdict.label(), "η={eta} q={q} a={a}");
                assert_eq!(w.lhs, f.lhs);
                if let (Some(x), Some(y)) = (w.rhs, f.rhs) {
                    assert!((x - y).abs() <= 1e-10 * x.abs());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn verdicts_are_monotone_in_tolerance(
        lambda in 0.5f64..3.0, mu in 0.5f64..3.0, a in -2.0f64..2.0, t_exp in 1.0f64..14.0, factor in 1.0f64..1e6,
    ) {
        let pt = ParamPoint { lambda, mu, a, eta: 1.5, nu: 0.5, ..ParamPoint::NEUTRAL };
        let t = 10f64.powf(-t_exp);
        let tight = verify_identity(IdentityId::Thm21Wright, &pt, t, Variant::Canonical).unwrap();
        let loose = verify_identity(IdentityId::Thm21Wright, &pt, t * factor, Variant::Canonical).unwrap();
        if tight.verdict.is_pass() {
            prop_assert!(loose.verdict.is_pass());
        }
        prop_assert_eq!(tight.rel_diff, loose.rel_diff);
    }
}

fn small_config() -> SweepConfig {
    SweepConfig {
        ids: vec![
            IdentityId::Edward,
            IdentityId::Termwise,
            IdentityId::Thm21Pfq,
            IdentityId::Sc1,
            IdentityId::Sc8,
        ],
        lambda: vec![0.75, 2.5],
        mu: vec![1.5],
        a: vec![-1.0, 2.0],
        eta: vec![1.0, 2.0],
        p: vec![1.0],
        q: vec![1.0, 2.0],
        gamma: vec![2.5],
        delta: vec![1.0],
        nu: vec![0.5, 2.0],
        n: vec![0, 3],
        ..SweepConfig::default()
    }
}

#[test]
fn sweeps_are_bit_identical() {
    let cfg = small_config();
    let a = sweep(&cfg).unwrap();
    let b = sweep(&cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(reports_to_csv(&a.reports).unwrap(), reports_to_csv(&b.reports).unwrap());
    let back: SweepOutput = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn sweep_order_is_lexicographic_in_the_grid() {
    let cfg = small_config();
    let out = sweep(&cfg).unwrap();
    assert_eq!(out.reports.len(), cfg.report_count());
    let edward: Vec<(f64, f64)> = out
        .reports
        .iter()
        .filter(|r| r.id == IdentityId::Edward)
        .map(|r| (r.params.lambda, r.params.mu))
        .collect();
    assert_eq!(edward, vec![(0.75, 1.5), (2.5, 1.5)]);
    let ids: Vec<IdentityId> = out.reports.iter().map(|r| r.id).collect();
    let mut sorted = ids.clone();
    sorted.sort_by_key(|id| cfg.ids.iter().position(|x| x == id));
    assert_eq!(ids, sorted);
    // printed variants only exist for the special cases
    assert!(out
        .reports
        .iter()
        .all(|r| r.variant == Variant::Canonical || r.id.special_case().is_some()));
}

#[test]
fn a_zero_grid_passes_everywhere() {
    let cfg = SweepConfig {
        ids: vec![IdentityId::Thm21Wright],
        a: vec![0.0],
        q: vec![1.0],
        tolerance: Some(1e-8),
        ..SweepConfig::default()
    };
    let out = sweep(&cfg).unwrap();
    assert!(!out.reports.is_empty());
    assert_eq!(out.summary.total.pass, out.reports.len());
}

#[test]
fn typo_ledger_records_printed_pair_order() {
    let cfg = SweepConfig {
        ids: vec![IdentityId::Sc1],
        lambda: vec![1.5],
        mu: vec![0.75],
        a: vec![1.0],
        eta: vec![2.0],
        p: vec![1.0],
        q: vec![1.0],
        gamma: vec![1.0],
        delta: vec![1.0],
        nu: vec![0.5],
        ..SweepConfig::default()
    };
    let out = sweep(&cfg).unwrap();
    assert_eq!(out.reports.len(), 2);
    let entry = &out.summary.typo_ledger[0];
    assert_eq!(entry.id, IdentityId::Sc1);
    assert_eq!(entry.canonical.pass, 1);
    assert_eq!(entry.as_printed.fail, 1);
    let d = entry.first_divergence.as_ref().unwrap();
    assert_eq!((d.params.eta, d.params.nu), (2.0, 0.5));
    assert!(out.summary.has_failures());
}

#[test]
fn csv_has_one_row_per_report() {
    let out = sweep(&small_config()).unwrap();
    let csv = reports_to_csv(&out.reports).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("id,variant,lambda,mu,a,"));
    assert_eq!(lines.count(), out.reports.len());
}
