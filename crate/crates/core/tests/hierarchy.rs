use num_bigint::BigInt;
use num_traits::{One, Zero};
use wdvv_core::frobenius::{bundled, Chart, FrobeniusData};
use wdvv_core::hierarchy::checks::{
    check_bilinear, check_homogeneity, check_normalization, check_r_properties, check_recursion,
    check_unity_descent,
};
use wdvv_core::hierarchy::numeric::{commutation, PeriodicState};
use wdvv_core::hierarchy::{
    build_omega, build_theta, check_tau_symmetry, dump_r, dump_theta, flow_commutator, flows,
    HierError, ThetaTable,
};
use wdvv_core::symring::{parse, Expr, Q};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn m(name: &str) -> FrobeniusData {
    bundled(name).unwrap()
}

fn factorial(k: u64) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `c * v1^k` built directly, without the parser.
fn monomial(c: Q, k: i32) -> Expr {
    Expr::coord(0).pow(k).unwrap().scale(&c)
}

#[test]
fn e1_theta_is_exponential_series() {
    let t = build_theta(&m("e1"), 8).unwrap();
    for k in 0..=8u64 {
        let want = monomial(Q::new(BigInt::one(), factorial(k + 1)), k as i32 + 1);
        assert_eq!(t.theta(0, k as usize), &want, "p = {k}");
    }
    assert_eq!(t.r_count(), 0);
}

#[test]
fn cp1_theta_and_r() {
    let t = build_theta(&m("cp1"), 3).unwrap();
    assert_eq!(t.theta(0, 0), &p("v2"));
    assert_eq!(t.theta(1, 0), &p("v1"));
    assert_eq!(t.theta(0, 1), &p("v1*v2"));
    assert_eq!(t.theta(1, 1), &p("1/2*v1^2 + exp(v2)"));
    assert_eq!(dump_r(&t), "(R1)^2_1 = 2\n");
    assert_eq!(t.r_count(), 1);
}

#[test]
fn a2_has_no_r() {
    let t = build_theta(&m("a2"), 6).unwrap();
    assert_eq!(dump_r(&t), "R = 0\n");
    assert!(t.normalization_choices.is_empty());
}

#[test]
fn theta_dump_format() {
    let t = build_theta(&m("e1"), 2).unwrap();
    assert_eq!(
        dump_theta(&t),
        "theta[1,0] = v1\ntheta[1,1] = 1/2*v1^2\ntheta[1,2] = 1/6*v1^3\n"
    );
}

fn all_checks(mf: &FrobeniusData, t: &ThetaTable, order: usize) {
    let e = &mf.euler;
    let st = mf.structure_tensor();
    let chart = Chart::identity(e.n);
    let grid = t.grid();
    let r = |k: i64| t.r_matrix(k);
    let u = e.unity;
    let shift = |a: usize, p: usize| {
        if p == 0 {
            e.eta_expr(a, u)
        } else {
            Expr::zero()
        }
    };
    let mut checks = vec![
        check_normalization(&chart, e, &grid),
        check_recursion(&chart, &st.c_mixed, &grid),
        check_homogeneity(&chart, e, &grid, &r),
        check_bilinear(&chart, e, &grid, order),
        check_unity_descent(&chart, &grid, u, &shift),
    ];
    checks.extend(check_r_properties(e, &r, t.r.len()));
    for c in checks {
        assert!(c.passed, "{}: {c:?}", mf.name);
    }
}

#[test]
fn hierarchy_relations_hold_to_order_six() {
    for name in ["e1", "a2", "cp1"] {
        let mf = m(name);
        let t = build_theta(&mf, 6).unwrap();
        all_checks(&mf, &t, 6);
    }
}

#[test]
fn checks_detect_tampering() {
    let mf = m("cp1");
    let t = build_theta(&mf, 3).unwrap();
    let chart = Chart::identity(2);
    let mut grid = t.grid();
    grid[2][1] = Some(grid[2][1].as_ref().unwrap() + &p("v1"));
    let e = &mf.euler;
    assert!(!check_bilinear(&chart, e, &grid, 3).passed);
    assert!(!check_recursion(&chart, &mf.structure_tensor().c_mixed, &grid).passed);
    let zero_r = |_k: i64| vec![vec![Q::zero(); 2]; 2];
    assert!(!check_homogeneity(&chart, e, &t.grid(), &zero_r).passed);
}

#[test]
fn e1_omega_binomial_oracle() {
    let mf = m("e1");
    let t = build_theta(&mf, 6).unwrap();
    let o = build_omega(&t, &mf.euler).unwrap();
    for pp in 0..=6u64 {
        for qq in 0..=6 - pp {
            let c = Q::new(binomial(pp + qq, pp), factorial(pp + qq + 1));
            let want = monomial(c, (pp + qq + 1) as i32);
            assert_eq!(o.get(0, pp as usize, 0, qq as usize).unwrap(), &want);
        }
    }
    assert_eq!(o.get(0, 1, 0, 1).unwrap(), &p("v1^3/3"));
    assert_eq!(o.get(0, 0, 0, 1).unwrap(), &p("v1^2/2"));
    assert!(check_tau_symmetry(&o).passed);
}

#[test]
fn omega_unity_column_is_theta() {
    for (name, order) in [("e1", 6), ("a2", 4), ("cp1", 4)] {
        let mf = m(name);
        let t = build_theta(&mf, order).unwrap();
        let o = build_omega(&t, &mf.euler).unwrap();
        let u = mf.euler.unity;
        for a in 0..t.n {
            for k in 0..=order {
                assert_eq!(
                    o.get(a, k, u, 0).unwrap(),
                    t.theta(a, k),
                    "{name} ({a},{k})"
                );
            }
        }
        assert!(check_tau_symmetry(&o).passed, "{name}");
        assert!(o.get(0, order, 0, 1).is_none());
    }
}

#[test]
fn omega_rejects_misnormalized_theta() {
    let mf = m("cp1");
    let mut t = build_theta(&mf, 3).unwrap();
    t.grad[2][0][0] = &t.grad[2][0][0] + &p("1");
    assert!(matches!(
        build_omega(&t, &mf.euler),
        Err(HierError::Recurrence { .. })
    ));
}

#[test]
fn flow_examples() {
    let e1 = m("e1");
    let f = flows(&build_theta(&e1, 2).unwrap(), &e1.euler).unwrap();
    assert_eq!(f.flow(0, 1).unwrap()[0], p("v1*v1_x"));
    assert!(matches!(
        f.flow(0, 3),
        Err(HierError::OrderExceeded {
            requested: 3,
            built: 2
        })
    ));

    let cp1 = m("cp1");
    let f = flows(&build_theta(&cp1, 2).unwrap(), &cp1.euler).unwrap();
    assert_eq!(f.flow(1, 0).unwrap()[0], p("exp(v2)*v2_x"));
    for name in ["e1", "a2", "cp1"] {
        let mf = m(name);
        let f = flows(&build_theta(&mf, 1).unwrap(), &mf.euler).unwrap();
        let x = f.flow(mf.euler.unity, 0).unwrap();
        for (a, r) in x.iter().enumerate() {
            assert_eq!(r, &Expr::jet(a), "{name}");
        }
    }
}

#[test]
fn flows_commute_symbolically() {
    for name in ["a2", "cp1"] {
        let mf = m(name);
        let f = flows(&build_theta(&mf, 3).unwrap(), &mf.euler).unwrap();
        let ids: Vec<(usize, usize)> = (0..2).flat_map(|b| (0..=2).map(move |q| (b, q))).collect();
        for &(b, q) in &ids {
            for &(b2, q2) in &ids {
                let br = flow_commutator(f.flow(b, q).unwrap(), f.flow(b2, q2).unwrap()).unwrap();
                assert!(br.iter().all(Expr::is_zero), "{name} ({b},{q}) ({b2},{q2})");
            }
        }
    }
}

#[test]
fn commutator_sees_non_hierarchy_field() {
    let x = vec![p("v1*v1_x"), p("v2_x")];
    let y = vec![p("v2*v1_x"), p("v1^2*v2_x")];
    let br = flow_commutator(&x, &y).unwrap();
    assert!(br.iter().any(|c| !c.is_zero()));
}

#[test]
fn flows_commute_numerically() {
    for (name, base) in [("a2", [0.3, 1.0]), ("cp1", [0.2, 0.1])] {
        let mf = m(name);
        let f = flows(&build_theta(&mf, 2).unwrap(), &mf.euler).unwrap();
        let init = |k| PeriodicState::sine(&base, 0.1, k, std::f64::consts::TAU);
        let c = commutation(
            f.flow(1, 0).unwrap(),
            f.flow(0, 1).unwrap(),
            &init,
            32,
            0.1,
            8,
        )
        .unwrap();
        let chk = c.check("flow_commutation");
        println!("{name}: {c:?}");
        assert!(chk.passed, "{name}: {c:?}");
    }
}

#[test]
fn numeric_commutation_flags_non_commuting_pair() {
    let x = vec![p("v1*v1_x"), p("v2_x")];
    let y = vec![p("v2*v1_x"), p("v1^2*v2_x")];
    let init = |k| PeriodicState::sine(&[0.3, 1.0], 0.1, k, std::f64::consts::TAU);
    let c = commutation(&x, &y, &init, 32, 0.1, 8).unwrap();
    assert!(!c.vacuous());
    assert!((c.step_ratio - 4.0).abs() < 0.5, "{c:?}");
    assert!(c.grid_ratio < 2.0, "{c:?}");
    assert!(!c.check("negative").passed);
}
