use std::collections::BTreeMap;

use wdvv_core::frobenius::{bundled, FrobeniusData};
use wdvv_core::hierarchy::{build_omega, build_theta};
use wdvv_core::report::Check;
use wdvv_core::solutions::{
    check_pde_residual, check_string_equation, check_tau_contract, parse_grid, pde_residual,
    verify_prop1, verify_prop2, verify_prop3, verify_string_covariance, GridSpec, HattedFrame,
    HodographSolution, SolveError, TimePoint,
};
use wdvv_core::symmetries::{apply_type1, apply_type2, hatted_tables};
use wdvv_core::symring::{parse, Expr, Q};

fn m(name: &str) -> FrobeniusData {
    bundled(name).unwrap()
}

fn solution(name: &str, order: usize, seed: Vec<f64>) -> HodographSolution {
    let man = m(name);
    let t = build_theta(&man, order).unwrap();
    let o = build_omega(&t, &man.euler).unwrap();
    HodographSolution::new(&man, &t, &o, seed).unwrap()
}

fn assert_all(checks: &[Check]) {
    for c in checks {
        println!("{c:?}");
    }
    let bad: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    assert!(bad.is_empty(), "failed: {bad:#?}");
}

/// Fixed-point iteration of `v = x + t v`, the E1 hodograph equation.
fn e1_oracle(x: f64, t: f64) -> f64 {
    let mut v = x;
    for _ in 0..200 {
        v = x + t * v;
    }
    v
}

fn e1_point(x: f64, t: f64) -> TimePoint {
    TimePoint::at_x(x).with((0, 1), t)
}

/// Small box around `t^{2,0} = 1`, where `v2` stays near 1.
fn a2_grid() -> Vec<TimePoint> {
    GridSpec::new(
        &[((0, 0), 0.5), ((1, 0), 1.0)],
        &[(0, 0), (1, 0), (0, 1)],
        0.01,
        3,
    )
    .points()
}

#[test]
fn e1_hodograph_examples() {
    let s = solution("e1", 4, vec![1.0]);
    let v = s.solve(&e1_point(1.0, 0.5)).unwrap();
    assert!((v[0] - e1_oracle(1.0, 0.5)).abs() < 1e-12);
    assert!((v[0] - 2.0).abs() < 1e-12);
    for x in [-0.7, 0.3, 1.9] {
        let v = s.solve_from(&TimePoint::at_x(x), &[0.0]).unwrap();
        assert!((v[0] - x).abs() < 1e-12);
    }
}

#[test]
fn e1_caustic_is_reported() {
    let s = solution("e1", 4, vec![1.0]);
    let err = s.solve(&e1_point(1.0, 1.0)).unwrap_err();
    assert!(matches!(err, SolveError::Singular { .. }), "{err}");
}

#[test]
fn out_of_range_time_is_rejected() {
    let s = solution("e1", 2, vec![1.0]);
    let err = s
        .solve(&TimePoint::at_x(1.0).with((0, 3), 0.1))
        .unwrap_err();
    assert!(matches!(err, SolveError::OutOfRange(_)), "{err}");
}

#[test]
fn e1_log_tau_values() {
    let s = solution("e1", 4, vec![1.0]);
    for x in [0.5, 1.0, 1.5] {
        let lt = s.log_tau(&TimePoint::at_x(x)).unwrap();
        assert!((lt - x * x * x / 6.0).abs() < 1e-12);
    }
    // Closed form x^3 / (6 (1 - t)) from substituting v = x/(1-t).
    let lt = s.log_tau(&e1_point(1.0, 0.5)).unwrap();
    assert!((lt - 1.0 / 3.0).abs() < 1e-12, "{lt}");
    let grid = GridSpec::new(&[((0, 0), 1.0), ((0, 1), 0.5)], &[(0, 0), (0, 1)], 0.01, 3).points();
    assert_all(&check_tau_contract(&s, &[(0, 0), (0, 1)], &grid));
}

#[test]
fn e1_log_tau_is_exact_cubic_at_zero_times() {
    let man = m("e1");
    let t = build_theta(&man, 2).unwrap();
    let o = build_omega(&t, &man.euler).unwrap();
    // t~ = (x, -1) and v = x: with x written as v1 the form must be v1^3/6.
    let x = Expr::coord(0);
    let w = |p, q| o.get(0, p, 0, q).unwrap().clone();
    let form =
        &(&(&(&x * &x) * &w(0, 0)) - &(&x * &w(0, 1)).scale(&Q::from_integer(2.into()))) + &w(1, 1);
    assert_eq!(
        form.scale(&Q::new(1.into(), 2.into())),
        parse("v1^3/6").unwrap()
    );
}

#[test]
fn pde_residual_examples() {
    let s = solution("e1", 4, vec![1.0]);
    // v = x/s with s = 1 - t: the central difference in t is exactly
    // x/(s^2 - h^2), and v_x is linear, so the residual is x h^2 / (s^2 (s^2 - h^2)).
    for h in [1e-3, 5e-4] {
        let r = pde_residual(&s, (0, 1), &e1_point(1.0, 0.5), h).unwrap();
        let want = h * h / (0.25 * (0.25 - h * h));
        assert!((r - want).abs() < 1e-9, "{r} vs {want}");
    }
    let r = pde_residual(&s, (0, 0), &e1_point(1.0, 0.5), 1e-3).unwrap();
    assert!(r < 1e-8, "{r}");

    let s = solution("cp1", 4, vec![0.5, 0.0]);
    let grid = GridSpec::new(&[((0, 0), 0.5)], &[(0, 0), (1, 0), (0, 1)], 0.01, 3).points();
    assert_eq!(grid.len(), 27);
    assert_all(&[check_pde_residual(&s, (1, 0), &grid, 1e-6)]);
}

#[test]
fn a2_solution_satisfies_flows_and_tau_contract() {
    let s = solution("a2", 4, vec![0.5, 1.0]);
    let grid = a2_grid();
    let mut checks = Vec::new();
    for f in [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)] {
        checks.push(check_pde_residual(&s, f, &grid, 1e-6));
    }
    checks.extend(check_tau_contract(
        &s,
        &[(0, 0), (1, 0), (0, 1), (1, 1)],
        &grid,
    ));
    checks.push(check_string_equation(&s, &grid, 1e-8));
    assert_all(&checks);
}

#[test]
fn e1_string_equation() {
    let s = solution("e1", 4, vec![1.0]);
    let grid = GridSpec::new(
        &[((0, 0), 1.0), ((0, 1), 0.5)],
        &[(0, 0), (0, 1), (0, 2)],
        0.01,
        3,
    )
    .points();
    assert_all(&[check_string_equation(&s, &grid, 1e-8)]);
}

#[test]
fn prop1_cp1_and_a2() {
    for (name, seed, center) in [
        ("cp1", vec![0.0, 0.0], vec![((0, 0), 0.0)]),
        ("a2", vec![0.5, 1.0], vec![((0, 0), 0.5), ((1, 0), 1.0)]),
    ] {
        let man = m(name);
        let t = build_theta(&man, 3).unwrap();
        let o = build_omega(&t, &man.euler).unwrap();
        let s = HodographSolution::new(&man, &t, &o, seed).unwrap();
        let map = apply_type1(&man, 1).unwrap();
        let h = hatted_tables(&map, &t, &o).unwrap();
        let f = HattedFrame::new(&s, &map, &h);
        let grid = GridSpec::new(&center, &[(0, 0), (1, 0), (0, 1)], 0.01, 3).points();
        let mut checks = verify_prop1(&f, &grid);
        checks.extend(verify_string_covariance(&f, &grid));
        println!("{name}");
        assert_all(&checks);
    }
}

fn a2_type2(shift: Option<BTreeMap<(usize, usize), f64>>) -> Vec<Check> {
    let man = m("a2");
    let t = build_theta(&man, 4).unwrap();
    let o = build_omega(&t, &man.euler).unwrap();
    let mut s = HodographSolution::new(&man, &t, &o, vec![0.5, 1.0]).unwrap();
    if let Some(c) = shift {
        s = s.with_shift(c);
    }
    let map = apply_type2(&man).unwrap();
    let h = hatted_tables(&map, &t, &o).unwrap();
    let f = HattedFrame::new(&s, &map, &h);
    let grid = a2_grid();
    let mut checks = verify_prop2(&f, &grid);
    checks.extend(verify_prop3(&f, &grid));
    checks.extend(verify_string_covariance(&f, &grid));
    checks
}

#[test]
fn type2_a2_analytic_suite() {
    let checks = a2_type2(None);
    assert!(checks.iter().any(|c| c.name == "string_equation_hat"));
    assert_all(&checks);
}

#[test]
fn type2_a2_generic_solution_keeps_covariance() {
    let man = m("a2");
    let t = build_theta(&man, 4).unwrap();
    let o = build_omega(&t, &man.euler).unwrap();
    let shift = BTreeMap::from([((0, 1), 1.0), ((1, 1), 0.2)]);
    let s = HodographSolution::new(&man, &t, &o, vec![0.5, 1.0])
        .unwrap()
        .with_shift(shift.clone());
    let tp = TimePoint::at_x(0.5).with((1, 0), 1.0);
    let a = s.string_operator(&tp, &tp.times).unwrap();
    let mut shifted = tp.times.clone();
    *shifted.entry((0, 1)).or_insert(0.0) -= 1.0;
    let top = s.string_operator(&tp, &shifted).unwrap();
    assert!(top.abs() > 1e-3, "{top}");
    assert!(a.is_finite());
    let checks = a2_type2(Some(shift));
    assert!(!checks.iter().any(|c| c.name == "string_equation"));
    assert_all(&checks);
}

#[test]
fn grid_spec_parsing() {
    let g = parse_grid("center=x:0.5,2.0:1.0;axes=x,2.0,1.1;radius=0.01;points=3").unwrap();
    assert_eq!(g.axes, vec![(0, 0), (1, 0), (0, 1)]);
    assert_eq!(g.center[&(1, 0)], 1.0);
    let pts = g.points();
    assert_eq!(pts.len(), 27);
    assert!((pts[0].get((0, 0)) - 0.49).abs() < 1e-15);
    assert_eq!(
        pts[13],
        TimePoint::at_x(0.5).with((1, 0), 1.0).with((0, 1), 0.0)
    );
    assert_eq!(parse_grid(&g.describe()).unwrap(), g);
    for bad in [
        "center=0.0:1",
        "axes=y",
        "radius=-1",
        "points=0",
        "foo=1",
        "center",
    ] {
        assert!(parse_grid(bad).is_err(), "{bad}");
    }
}

#[test]
fn mismatched_data_is_detected() {
    let a2 = m("a2");
    let cp1 = m("cp1");
    let t = build_theta(&a2, 4).unwrap();
    let o = build_omega(&t, &a2.euler).unwrap();
    let o_wrong = build_omega(&build_theta(&cp1, 4).unwrap(), &cp1.euler).unwrap();
    let grid = a2_grid();

    let s = HodographSolution::new(&a2, &t, &o_wrong, vec![0.5, 1.0]).unwrap();
    let checks = check_tau_contract(&s, &[(0, 0), (1, 0), (0, 1), (1, 1)], &grid);
    assert!(checks
        .iter()
        .any(|c| c.name == "tau_x_derivative_theta" && !c.passed));

    // Type-1 hatted tables read through the type-2 reciprocal fields.
    let s = HodographSolution::new(&a2, &t, &o, vec![0.5, 1.0]).unwrap();
    let map2 = apply_type2(&a2).unwrap();
    let map1 = apply_type1(&a2, 1).unwrap();
    let h1 = hatted_tables(&map1, &t, &o).unwrap();
    let f = HattedFrame::new(&s, &map2, &h1);
    let checks = verify_prop2(&f, &grid);
    assert!(checks
        .iter()
        .any(|c| c.name.starts_with("hatted_flow") && !c.passed));
}
