use num_traits::Zero;
use proptest::prelude::*;
use wdvv_core::frobenius::EulerData;
use wdvv_core::frobenius::{bundled, sign, FrobeniusData, QMatrix};
use wdvv_core::hierarchy::checks::check_r_properties;
use wdvv_core::hierarchy::{build_omega, build_theta};
use wdvv_core::report::Check;
use wdvv_core::symmetries::identities::{
    eta_c_identities, g_function_rule, genus1_identity, hatted_checks, map_checks, metric_rules,
};
use wdvv_core::symmetries::{
    apply_type1, apply_type2, hatted_mu, hatted_r, hatted_tables, Kind, SymmetryError, TimeImage,
};
use wdvv_core::symring::{parse, Expr, Q};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn m(name: &str) -> FrobeniusData {
    bundled(name).unwrap()
}

fn assert_all(checks: &[Check]) {
    for c in checks {
        assert!(c.passed, "{c:?}");
    }
}

#[test]
fn type1_cp1_coordinates_and_closed_form() {
    let s = apply_type1(&m("cp1"), 1).unwrap();
    assert_eq!(s.vhat, vec![p("exp(v2)"), p("v1")]);
    let want = p("1/2*v1*v2^2 + 1/2*v1^2*log(v1) - 3/4*v1^2");
    assert_eq!(s.fhat_closed.as_ref().unwrap(), &want);
    assert_eq!(s.target_euler.d, q(-1, 1));
    assert_eq!(s.target_euler.mu, vec![q(-1, 2), q(1, 2)]);
    assert!(s.target_euler.r.iter().all(Zero::is_zero));
    assert_eq!(s.target_euler.unity, 1);
    assert_all(&map_checks(&s));
}

#[test]
fn type1_rejects_singular_kappa() {
    let mut f = m("a2");
    // F = 1/2 v1^2 v2 has c^a_(b,2) singular.
    f.f = p("1/2*v1^2*v2");
    assert!(matches!(
        apply_type1(&f, 1),
        Err(SymmetryError::SingularType1(2))
    ));
    assert!(matches!(
        apply_type1(&f, 5),
        Err(SymmetryError::BadIndex(6))
    ));
}

#[test]
fn type1_a2_has_no_closed_form_but_parametric_checks_pass() {
    let s = apply_type1(&m("a2"), 1).unwrap();
    assert!(s.fhat_closed.is_none());
    assert_all(&map_checks(&s));
    assert_all(&metric_rules(&s));
}

#[test]
fn type2_a2_map() {
    let s = apply_type2(&m("a2")).unwrap();
    assert_eq!(s.vhat, vec![p("-v1"), p("1/v2")]);
    assert_eq!(
        s.fhat_closed.as_ref().unwrap(),
        &p("1/2*v1^2*v2 - 1/72*v2^-2")
    );
    assert_eq!(s.target_euler.mu, vec![q(-5, 6), q(5, 6)]);
    assert_eq!(s.target_euler.d, q(5, 3));
    assert_all(&map_checks(&s));
}

#[test]
fn type2_rejects_ineligible() {
    match apply_type2(&m("cp1")) {
        Err(SymmetryError::Ineligible(r)) => assert!(r.iter().any(|x| x.contains("r_2"))),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        apply_type2(&m("e1")),
        Err(SymmetryError::Ineligible(_))
    ));
}

#[test]
fn type2_hatted_theta_examples() {
    let mf = m("a2");
    let s = apply_type2(&mf).unwrap();
    let t = build_theta(&mf, 4).unwrap();
    let o = build_omega(&t, &mf.euler).unwrap();
    let h = hatted_tables(&s, &t, &o).unwrap();
    assert_eq!(h.order, 3);
    assert_eq!(h.theta[0][0], p("1/v2"));
    assert_eq!(h.theta[1][0], p("-v1/v2"));
    // thetahat_{1,1} = 1/2 eta(vhat, vhat) = vhat^1 vhat^2.
    assert_eq!(h.theta[1][0], &s.vhat[0] * &s.vhat[1]);
    assert_eq!(h.r_matrix(1), vec![vec![Q::zero(); 2]; 2]);
}

#[test]
fn type2_a2_symbolic_suite() {
    let mf = m("a2");
    let s = apply_type2(&mf).unwrap();
    let t = build_theta(&mf, 5).unwrap();
    let o = build_omega(&t, &mf.euler).unwrap();
    let h = hatted_tables(&s, &t, &o).unwrap();
    assert_all(&hatted_checks(&s, &h));
    assert_all(&eta_c_identities(&s));
    assert_all(&metric_rules(&s));
    assert!(genus1_identity(&s).passed);
}

#[test]
fn type1_cp1_hatted_suite() {
    let mf = m("cp1");
    let s = apply_type1(&mf, 1).unwrap();
    let t = build_theta(&mf, 4).unwrap();
    let o = build_omega(&t, &mf.euler).unwrap();
    let h = hatted_tables(&s, &t, &o).unwrap();
    for a in 0..2 {
        assert_eq!(h.theta[0][a], s.chart().lowered(&s.target_euler, a));
    }
    assert_all(&hatted_checks(&s, &h));
    assert_all(&metric_rules(&s));
}

#[test]
fn genus1_identity_is_type2_only() {
    let s = apply_type2(&m("a2")).unwrap();
    assert!(genus1_identity(&s).passed);
    let s1 = apply_type1(&m("cp1"), 1).unwrap();
    assert!(!genus1_identity(&s1).passed);
}

#[test]
fn g_function_rule_examples() {
    let s = apply_type2(&m("a2")).unwrap();
    // n = 2: coefficient 2/24 - 1/2 = -5/12, and log(vhat^2) = -log(v2).
    assert!(g_function_rule(&s, &Expr::zero(), &p("5/12*log(v2)")).passed);
    let bad = g_function_rule(&s, &Expr::zero(), &Expr::zero());
    assert!(!bad.passed);
    assert_eq!(bad.residual.as_deref(), Some("5/12*log(v2)"));
}

#[test]
fn time_maps() {
    let s = apply_type2(&m("a2")).unwrap();
    assert_eq!(s.time_image(0, 0), TimeImage::HatSpace);
    assert_eq!(
        s.time_image(0, 2),
        TimeImage::Time {
            sign: 1,
            index: 1,
            order: 1
        }
    );
    assert_eq!(
        s.time_image(1, 0),
        TimeImage::Time {
            sign: -1,
            index: 0,
            order: 1
        }
    );
    let s1 = apply_type1(&m("cp1"), 1).unwrap();
    assert_eq!(s1.kind, Kind::Type1(1));
    assert_eq!(s1.time_image(0, 0), TimeImage::Space);
    assert_eq!(
        s1.time_image(1, 0),
        TimeImage::Time {
            sign: 1,
            index: 1,
            order: 0
        }
    );
}

fn zero3() -> QMatrix {
    vec![vec![Q::zero(); 3]; 3]
}

#[test]
fn formal_rhat_examples() {
    // Only (R_1)^2_1 != 0: every Rhat entry reads R at a shifted level or a
    // relabeled index pair, none of which is (1; 2,1).
    let mut r1 = zero3();
    r1[1][0] = q(1, 1);
    let r = move |k: i64| if k == 1 { r1.clone() } else { zero3() };
    for k in 1..=4 {
        assert!(
            hatted_r(3, &r, k).iter().flatten().all(Zero::is_zero),
            "k = {k}"
        );
    }
    // Only (R_3)^3_1 != 0: (Rhat_1)^1_3 = (-1)^{1+0+1} (R_{1+1+1})^3_1.
    let mut r3 = zero3();
    r3[2][0] = q(4, 1);
    let r = move |k: i64| if k == 3 { r3.clone() } else { zero3() };
    let rh = hatted_r(3, &r, 1);
    assert_eq!(rh[0][2], q(4, 1));
    assert_eq!(rh.iter().flatten().filter(|x| !x.is_zero()).count(), 1);
    // Only (R_2)^2_1 != 0: (Rhat_1)^2_3 = (-1)^{1+0+1} (R_{1+0+1})^2_1.
    let mut r2 = zero3();
    r2[1][0] = q(-3, 1);
    let r = move |k: i64| if k == 2 { r2.clone() } else { zero3() };
    assert_eq!(hatted_r(3, &r, 1)[1][2], q(-3, 1));
}

#[test]
fn hatted_checks_detect_tampering() {
    let mf = m("cp1");
    let s = apply_type1(&mf, 1).unwrap();
    let t = build_theta(&mf, 3).unwrap();
    let o = build_omega(&t, &mf.euler).unwrap();
    let mut h = hatted_tables(&s, &t, &o).unwrap();
    h.r[0][1][0] = q(3, 1);
    let failed: Vec<String> = hatted_checks(&s, &h)
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    assert_eq!(failed, vec!["theta_homogeneity".to_string()]);

    let mf = m("a2");
    let s = apply_type2(&mf).unwrap();
    let t = build_theta(&mf, 4).unwrap();
    let o = build_omega(&t, &mf.euler).unwrap();
    let mut h = hatted_tables(&s, &t, &o).unwrap();
    h.theta[2][1] = -h.theta[2][1].clone();
    let failed: Vec<String> = hatted_checks(&s, &h)
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    assert!(
        failed.contains(&"theta_recursion".to_string()),
        "{failed:?}"
    );
    assert!(
        failed.contains(&"omega_hat_unity_column".to_string()),
        "{failed:?}"
    );
}

fn antidiag(n: usize) -> QMatrix {
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a + b + 1 == n {
                        Q::from_integer(1.into())
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect()
}

prop_compose! {
    /// Spectrum symmetric under `a -> n+1-a` with half-integer steps, and
    /// R-matrices satisfying both properties by construction.
    fn formal_instance()(n in 2usize..=5, raw in prop::collection::vec(-3i64..=3, 5),
                         entries in prop::collection::vec(-3i64..=3, 4 * 25))
        -> (usize, Vec<Q>, Vec<QMatrix>) {
        let mut mu = vec![Q::zero(); n];
        for a in 0..n {
            let b = n - 1 - a;
            if a < b {
                mu[a] = q(raw[a], 2);
                mu[b] = -mu[a].clone();
            }
        }
        let mut rs = Vec::new();
        for k in 1..=4i64 {
            let mut r: QMatrix = vec![vec![Q::zero(); n]; n];
            for a in 0..n {
                for b in 0..n {
                    if &mu[a] - &mu[b] == Q::from_integer(k.into()) {
                        r[a][b] = Q::from_integer(entries[((k as usize - 1) * 25) + a * 5 + b].into());
                    }
                }
            }
            // Project onto eta_ag R^g_b = (-1)^{k+1} eta_bg R^g_a.
            let s = sign(k + 1);
            let mut sym = r.clone();
            for a in 0..n {
                for b in 0..n {
                    sym[n - 1 - a][b] = (&r[n - 1 - a][b] + &r[n - 1 - b][a] * &s) / Q::from_integer(2.into());
                }
            }
            rs.push(sym);
        }
        (n, mu, rs)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn rhat_keeps_both_properties((n, mu, rs) in formal_instance()) {
        let d = -Q::from_integer(2.into()) * &mu[0];
        let zero_r = vec![Q::zero(); n];
        let e = EulerData::new(antidiag(n), d.clone(), mu.clone(), zero_r.clone(), 0).unwrap();
        let r = |k: i64| if (1..=4).contains(&k) { rs[k as usize - 1].clone() } else { vec![vec![Q::zero(); n]; n] };
        prop_assert!(check_r_properties(&e, &r, 4).iter().all(|c| c.passed));
        let eh = EulerData::new(antidiag(n), Q::from_integer(2.into()) - d, hatted_mu(&mu), zero_r, 0).unwrap();
        let rh = |k: i64| hatted_r(n, &r, k);
        for c in check_r_properties(&eh, &rh, 6) {
            prop_assert!(c.passed, "{:?}", c);
        }
    }
}
