#![allow(clippy::needless_range_loop)]

use num_traits::{One, Zero};
use wdvv_core::frobenius::{bundled, parse_manifest, FrobError, FrobeniusData, QMatrix};
use wdvv_core::symring::{parse, Expr, Point, Q};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn m(name: &str) -> FrobeniusData {
    bundled(name).unwrap()
}

#[test]
fn structure_constants() {
    let a2 = m("a2").structure_tensor();
    assert_eq!(a2.c[1][1][1], p("v2/3"));
    assert_eq!(a2.c[0][0][1], p("1"));
    let cp1 = m("cp1").structure_tensor();
    assert_eq!(cp1.c[1][1][1], p("exp(v2)"));
}

#[test]
fn bundled_axioms_hold() {
    for name in ["e1", "a2", "cp1"] {
        let checks = m(name).check_all();
        for c in &checks {
            assert!(c.passed, "{name}: {c:?}");
        }
    }
}

#[test]
fn negative_control_fails_at_metric() {
    let checks = m("bad").check_wdvv();
    assert!(!checks[0].passed);
    assert_eq!(checks[0].name, "eta_constant");
    assert!(checks[0].detail.as_ref().unwrap().contains("eta_22"));
    assert!(checks[0].detail.as_ref().unwrap().contains("6*v2"));
}

#[test]
fn quasihomogeneity_residues() {
    let a2 = m("a2").residue.unwrap();
    assert!(a2.is_zero());
    let e1 = m("e1").residue.unwrap();
    assert!(e1.is_zero());
    let cp1 = m("cp1").residue.unwrap();
    assert_eq!(cp1.a[0][0], q(2, 1));
    assert!(cp1.a[0][1].is_zero() && cp1.a[1][1].is_zero());
    assert!(cp1.b.iter().all(Zero::is_zero) && cp1.c.is_zero());
}

#[test]
fn wrong_spectrum_is_not_quasihomogeneous() {
    let src = "n = 2\nF = 1/2*v1^2*v2 + v2^4/72\neta = 0 1 1 0\nd = 1/3\nmu = -1/6 1/3\n";
    let m = parse_manifest(src).unwrap();
    assert!(m.residue.is_none());
    let checks = m.check_all();
    assert!(
        !checks
            .iter()
            .find(|c| c.name == "quasihomogeneity")
            .unwrap()
            .passed
    );
    assert!(
        !checks
            .iter()
            .find(|c| c.name == "mu_antisymmetry")
            .unwrap()
            .passed
    );
}

#[test]
fn intersection_forms() {
    let e1 = m("e1").intersection_form().unwrap();
    assert_eq!(e1.g_upper.get(0, 0), &p("v1"));
    let cp1 = m("cp1").intersection_form().unwrap();
    assert_eq!(cp1.g_upper.get(1, 1), &p("2"));
    let a2m = m("a2");
    let a2 = a2m.intersection_form().unwrap();
    // Direct E^c c^{12}_c at v = (1, 1), with c^{12}_c = c_{21c}.
    let st = a2m.structure_tensor();
    let e = a2m.euler.euler_components();
    let direct = &(&e[0] * &st.c[1][0][0]) + &(&e[1] * &st.c[1][0][1]);
    let pt = Point::new(vec![Q::one(), Q::one()]);
    assert_eq!(
        a2.g_upper.get(0, 1).eval_exact(&pt).unwrap(),
        direct.eval_exact(&pt).unwrap()
    );
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(a2.g_upper.get(a, b), a2.g_upper.get(b, a));
        }
    }
}

#[test]
fn pencil_for_cubic() {
    let e1 = m("e1").intersection_form().unwrap();
    let lambda = p("v2");
    let pencil = e1.g_upper.get(0, 0) - &(&lambda * &Expr::one());
    assert_eq!(pencil, p("v1 - v2"));
}

// In flat coordinates the contravariant symbols are (1/2 - mu_b) c^{ab}_c.
#[test]
fn connection_matches_flat_coordinate_formula() {
    for name in ["e1", "a2", "cp1"] {
        let mf = m(name);
        let n = mf.n();
        let st = mf.structure_tensor();
        let data = mf.intersection_form().unwrap();
        let einv = &mf.euler.eta_inv;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut cab = Expr::zero();
                    for d in 0..n {
                        cab += &st.c_mixed[b][d][c].scale(&einv[a][d]);
                    }
                    let want = cab.scale(&(q(1, 2) - &mf.euler.mu[b]));
                    assert_eq!(data.gamma[a][b][c], want, "{name} ({a},{b},{c})");
                }
            }
        }
    }
}

fn diag(a: i64, b: i64) -> QMatrix {
    vec![vec![q(a, 1), Q::zero()], vec![Q::zero(), q(b, 1)]]
}

#[test]
fn linear_changes() {
    let a2 = m("a2");
    let same = a2.linear_change(&diag(1, 1)).unwrap();
    assert_eq!(same.f, a2.f);
    assert_eq!(same.euler, a2.euler);

    let scaled = a2.linear_change(&diag(1, 2)).unwrap();
    assert_eq!(scaled.euler.eta[0][1], q(1, 2));
    assert!(scaled.check_all().iter().all(|c| c.passed));
    let back = scaled
        .linear_change(
            &diag(2, 1)
                .iter()
                .map(|r| r.iter().map(|x| x / q(2, 1)).collect())
                .collect::<Vec<Vec<Q>>>(),
        )
        .unwrap();
    // diag(1, 1/2) undoes diag(1, 2)
    assert_eq!(back.f, a2.f);
    assert_eq!(back.euler, a2.euler);

    let swap = vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]];
    assert_eq!(
        a2.linear_change(&swap).unwrap_err(),
        FrobError::UnityNotPreserved
    );
    let singular = diag(1, 0);
    assert_eq!(
        a2.linear_change(&singular).unwrap_err(),
        FrobError::Singular
    );
    let mixing = vec![vec![Q::one(), Q::one()], vec![Q::zero(), Q::one()]];
    assert_eq!(
        a2.linear_change(&mixing).unwrap_err(),
        FrobError::EulerNotDiagonal
    );
}

#[test]
fn unity_scaling_round_trip() {
    let a2 = m("a2");
    let l = diag(3, 1);
    let w = a2.linear_change(&l).unwrap();
    assert!(
        w.check_all().iter().all(|c| c.passed),
        "{:?}",
        w.check_all()
    );
    let back = w
        .linear_change(&vec![vec![q(1, 3), Q::zero()], vec![Q::zero(), Q::one()]])
        .unwrap();
    assert_eq!(back.f, a2.f);
    assert_eq!(back.euler, a2.euler);
}

#[test]
fn type2_eligibility() {
    assert!(m("a2").check_type2_eligibility().eligible);
    let cp1 = m("cp1").check_type2_eligibility();
    assert!(!cp1.eligible);
    assert!(cp1.reasons.iter().any(|r| r.contains("r_2")));
    let e1 = m("e1").check_type2_eligibility();
    assert!(!e1.eligible);
    assert!(e1.reasons.iter().any(|r| r.contains("n < 2")));
}

#[test]
fn manifest_errors_carry_lines() {
    let e = parse_manifest("n = 2\nF = v1^2 +\neta = 1 0 0 1\nd = 0\nmu = 0 0\n").unwrap_err();
    match e {
        FrobError::Manifest(me) => assert_eq!(me.line, 2),
        other => panic!("{other:?}"),
    }
    let e = parse_manifest("n = 2\nF = v1\neta = 1 0 0\nd = 0\nmu = 0 0\n").unwrap_err();
    assert!(
        matches!(e, FrobError::Manifest(ref me) if me.line == 3),
        "{e:?}"
    );
    let e = parse_manifest("n = 1\nF = v2\neta = 1\nd = 0\nmu = 0\n").unwrap_err();
    assert!(
        matches!(e, FrobError::Manifest(ref me) if me.line == 2),
        "{e:?}"
    );
    let e = parse_manifest("n = 1\nF = v1\neta = 1\nmu = 0\n").unwrap_err();
    assert!(e.to_string().contains("missing key `d`"));
    let e = parse_manifest("n = 1\nF = v1\neta = 1\nd = 0\nmu = 0\ncolour = red\n").unwrap_err();
    assert!(e.to_string().contains("unknown key"));
}

#[test]
fn optional_g_functions() {
    let src = "n = 2\nF = 1/2*v1^2*v2 + v2^4/72\neta = 0 1\n 1 0\nd = 1/3\nmu = -1/6 1/6\nG = 0\nGhat = 5/12*log(v2)\n";
    let m = parse_manifest(src).unwrap();
    assert_eq!(m.g, Some(Expr::zero()));
    assert_eq!(m.ghat, Some(p("5/12*log(v2)")));
}
