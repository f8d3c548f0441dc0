use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdvv-kit"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    bin(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(bin(args).stdout).unwrap()
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn validator() -> jsonschema::Validator {
    let src = std::fs::read_to_string(repo().join("schemas/report-v1.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&src).unwrap()).unwrap()
}

fn assert_schema(json: &str) {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check", "a2"]), 0);
    assert_eq!(code(&["check", "e1"]), 0);
    assert_eq!(code(&["check", "bad"]), 1);
    assert_eq!(code(&["check", "no-such-manifold"]), 2);
    let out = stdout(&["check", "cp1"]);
    assert!(out.contains("type-2: ineligible"), "{out}");
    assert_eq!(code(&["check", "cp1"]), 0);
}

#[test]
fn check_accepts_file_paths() {
    let p = repo().join("manifolds/a2.fm");
    assert_eq!(code(&["check", p.to_str().unwrap()]), 0);
    let d = scratch("broken");
    let f = d.join("x.fm");
    std::fs::write(&f, "this is not a manifold\n").unwrap();
    assert_eq!(code(&["check", f.to_str().unwrap()]), 2);
}

#[test]
fn hierarchy_dumps() {
    let e1 = stdout(&["hierarchy", "e1", "--order", "4"]);
    assert!(e1.contains("theta[1,2] = 1/6*v1^3"), "{e1}");
    let cp1 = stdout(&["hierarchy", "cp1", "--order", "2"]);
    assert!(cp1.contains("(R1)^2_1 = 2"), "{cp1}");

    let d = scratch("hier");
    assert_eq!(
        code(&[
            "hierarchy",
            "a2",
            "--order",
            "3",
            "--out",
            d.to_str().unwrap()
        ]),
        0
    );
    for f in [
        "theta.txt",
        "r.txt",
        "omega.txt",
        "flows.txt",
        "report.json",
    ] {
        assert!(d.join(f).exists(), "{f}");
    }
    assert_schema(&std::fs::read_to_string(d.join("report.json")).unwrap());
    assert_eq!(code(&["hierarchy", "bad", "--order", "2"]), 1);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&["verify", "--type2", "--all", "a2"]), 0);
    assert_eq!(
        code(&["verify", "--type1", "--kappa", "2", "--prop1", "cp1"]),
        0
    );
    assert_eq!(code(&["verify", "--type2", "cp1"]), 3);
    assert_eq!(code(&["verify", "--type2", "--prop1", "a2"]), 3);
    assert_eq!(
        code(&["verify", "--type1", "--kappa", "2", "--prop2", "a2"]),
        3
    );
    assert_eq!(code(&["verify", "--type2", "e1"]), 3);
    assert_eq!(code(&["verify", "a2"]), 2);
    assert_eq!(code(&["verify", "--type1", "--kappa", "7", "a2"]), 2);
    assert_eq!(code(&["verify", "--type2", "--select", "nope", "a2"]), 2);
    assert_eq!(code(&["verify", "--type2", "--grid", "axes=5.0", "a2"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
}

#[test]
fn reports_match_schema() {
    for args in [
        &["check", "a2"][..],
        &["check", "bad"],
        &["verify", "--type2", "--all", "a2"],
        &["verify", "--type1", "--kappa", "1", "--all", "cp1"],
    ] {
        assert_schema(&stdout(args));
    }
    let d = scratch("transform");
    let dir = d.to_str().unwrap();
    assert_eq!(
        code(&["transform", "cp1", "--type1", "--kappa", "2", "--out", dir]),
        0
    );
    assert_schema(&std::fs::read_to_string(d.join("report.json")).unwrap());
    assert!(std::fs::read_to_string(d.join("transform.txt"))
        .unwrap()
        .contains("vhat1 = exp(v2)"));
}

#[test]
fn markdown_format() {
    let md = stdout(&[
        "verify",
        "--type2",
        "--select",
        "map,genus1",
        "a2",
        "--format",
        "markdown",
    ]);
    assert!(md.starts_with("# verify a2: PASS"), "{md}");
    assert!(md.contains("## genus1 (PASS)"));
}

#[test]
fn grid_flag_is_recorded() {
    let g = "center=x:0.5,2.0:1;axes=x,1.1;radius=0.02;points=3";
    let out = stdout(&["verify", "--type2", "--prop2", "a2", "--grid", g]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["grid"], g);
    assert_eq!(v["passed"], true);
    let counts: Vec<u64> = v["sections"][1]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|c| c["grid_points"].as_u64())
        .collect();
    assert!(
        !counts.is_empty() && counts.iter().all(|&c| c == 9),
        "{counts:?}"
    );
}

#[test]
fn config_file_supplies_defaults() {
    let d = scratch("config");
    let cfg = d.join("run.toml");
    std::fs::write(
        &cfg,
        "manifold = \"a2\"\ntype2 = true\nselect = [\"metrics\"]\nformat = \"markdown\"\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let md = stdout(&["verify", "--config", c]);
    assert!(
        md.contains("## metrics (PASS)") && !md.contains("## map"),
        "{md}"
    );
    // Flags override the file.
    let json = stdout(&[
        "verify", "--config", c, "--format", "json", "--select", "map",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["sections"][1]["name"], "map");
    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&["check", "a2", "--config", c]), 2);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["verify", "--type2", "--all", "a2", "--order", "4"][..],
        &["hierarchy", "cp1", "--order", "3"],
        &["transform", "a2", "--type2"],
    ] {
        let a = bin(args).stdout;
        let b = bin(args).stdout;
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn examples_lists_bundled_manifolds() {
    let out = stdout(&["examples"]);
    for n in ["a2", "bad", "cp1", "e1"] {
        assert!(out.lines().any(|l| l.starts_with(n)), "{out}");
    }
}
