use wdvv_web::{check, example_source, examples, hierarchy, verify, MAX_ORDER};

fn src(name: &str) -> String {
    example_source(name).unwrap()
}

#[test]
fn bundled_examples_are_listed() {
    assert_eq!(examples(), vec!["e1", "a2", "cp1", "bad"]);
    assert!(example_source("nope").is_none());
}

#[test]
fn check_reports() {
    assert!(check(&src("a2")).unwrap().starts_with("# check a2: PASS"));
    assert!(check(&src("bad")).unwrap().starts_with("# check bad: FAIL"));
    assert!(check("n = 2\n").is_err());
}

#[test]
fn hierarchy_dump() {
    let d = hierarchy(&src("cp1"), 2).unwrap();
    assert!(d.contains("(R1)^2_1 = 2"));
    assert!(d.contains("theta[2,1] = 1/2*v1^2 + exp(v2)"), "{d}");
    assert!(hierarchy(&src("e1"), MAX_ORDER + 1).is_err());
    assert!(hierarchy(&src("e1"), 0).is_err());
}

#[test]
fn verify_runs_applicable_suite() {
    let md = verify(&src("a2"), "type2", 0, 4).unwrap();
    assert!(md.contains("# verify a2: PASS"), "{md}");
    assert!(md.contains("## prop3 (PASS)"));
    let md = verify(&src("cp1"), "type1", 2, 3).unwrap();
    assert!(md.contains("vhat1 = exp(v2)"), "{md}");
    assert!(md.contains("# verify cp1: PASS"), "{md}");
    assert!(verify(&src("cp1"), "type2", 0, 3)
        .unwrap_err()
        .contains("ineligible"));
    assert!(verify(&src("a2"), "type3", 0, 3).is_err());
}
