use std::path::PathBuf;
use std::process::{Command, Output};

fn theory(f: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../theories")
        .join(f)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nomalg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn signature_verdicts() {
    let o = run(&["check-signature", &theory("lambda.thy")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("uniform\n"));
    let o = run(&["check-signature", &theory("nonuniform.thy")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("arity transport: w_{{},a} . app{} must have arity {a}, {a} -> {a}"));
}

#[test]
fn structured_reports_are_json() {
    let o = run(&["--format", "structured", "check-signature", &theory("nonuniform.thy")]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["uniform"], false);
    assert_eq!(v["report"]["issues"][0]["kind"], "arity-transport");
}

#[test]
fn translate_gives_the_family_member() {
    let o = run(&["translate", &theory("lambda.thy"), "--eq", "eta", "--names", "b"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("eq eta.b (X'{b} : {b}) : lam[a]{b}(app{a,b}(w_a(X'{b}), var[a]{b})) = X'{b} : {b}\n"));
    let o = run(&["translate", &theory("lambda.thy"), "--eq", "nope", "--names", "b"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_carry_locations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.thy");
    std::fs::write(&bad, "universe {a,b}\neq e (X : {}) : X = Y : {}\n").unwrap();
    let o = run(&["check-signature", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 21"));
    let o = run(&["check-signature", dir.path().join("missing.thy").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["lambda-demo", "--depth", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn model_checks_and_abstraction() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.json");
    let quo = dir.path().join("quo.json");
    let lambda = theory("lambda.thy");
    let o = run(&[
        "lambda-demo",
        "--universe",
        "3",
        "--depth",
        "3",
        "--emit-model",
        raw.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    run(&[
        "lambda-demo",
        "--universe",
        "3",
        "--depth",
        "3",
        "--emit-model",
        quo.to_str().unwrap(),
        "--eta",
    ]);
    let o = run(&["check-model", &lambda, raw.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails at X'{b} := var:b"));
    let o = run(&["check-model", &lambda, quo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("result: 8 of 8 instances hold\n"));
    let o = run(&["check-model", &lambda, quo.to_str().unwrap(), "--universe", "2"]);
    assert!(stdout(&o).ends_with("result: 4 of 4 instances hold\n"));
    let o = run(&["check-model", &lambda, quo.to_str().unwrap(), "--universe", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let abs = dir.path().join("abs.json");
    let o = run(&["abstract-model", quo.to_str().unwrap(), "--theory", &lambda]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&abs, &o.stdout).unwrap();
    let o = run(&["check-model", &lambda, abs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["abstract-model", raw.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("{\n  \"universe\": \"{a,b}\""));
}

#[test]
fn broken_models_are_validation_failures() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    run(&[
        "lambda-demo",
        "--universe",
        "2",
        "--depth",
        "2",
        "--emit-model",
        m.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&m).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // send the weakening of the only closed term somewhere else
    v["wk"]["{}+a"]["lam:[a]var:a"] = serde_json::json!("var:a");
    std::fs::write(&m, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["check-model", &theory("lambda.thy"), m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&m, "{ not json").unwrap();
    let o = run(&["check-model", &theory("lambda.thy"), m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_eop_lists_instances() {
    let o = run(&[
        "--format",
        "structured",
        "gen-eop",
        &theory("delta.thy"),
        "--universe",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equations"].as_array().unwrap().len(), 4);
    assert_eq!(
        v["equations"][0]["equation"],
        "abs[a]{b}(w_b(X1)) = w_b(abs[a]{}(X1)) : {b}"
    );
}
