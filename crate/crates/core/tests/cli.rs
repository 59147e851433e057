use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn zefc(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_zefc"))
        .args(args)
        .output()
        .expect("run zefc");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf8"),
    )
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn assert_schema(name: &str, doc: &Value) {
    let text = std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).expect("schema file");
    let schema: Value = serde_json::from_str(&text).expect("schema json");
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("valid schema");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name} output violates schema: {msgs:?}\n{doc:#}");
}

fn json_ok(args: &[&str]) -> Value {
    let (code, out) = zefc(args);
    assert_eq!(code, 0, "{args:?} exited {code}: {out}");
    serde_json::from_str(&out).expect("json output")
}

#[test]
fn every_command_matches_its_schema() {
    let cases: &[(&str, &[&str])] = &[
        ("capacity", &["capacity", "--case", "01", "--c1", "2", "--c2", "1"]),
        (
            "capacity",
            &[
                "capacity",
                "--case",
                "11",
                "--c1",
                "3/2",
                "--c2",
                "1",
                "--sandwich",
                "1,2,...,8",
            ],
        ),
        (
            "capacity",
            &[
                "capacity", "--case", "00", "--c1", "inf", "--c2", "1", "--target", "identity",
            ],
        ),
        (
            "construct",
            &["construct", "--case", "01", "--c1", "2", "--c2", "1", "--k", "4"],
        ),
        (
            "construct",
            &["construct", "--case", "11", "--c1", "3", "--c2", "2", "--k", "40"],
        ),
        ("verify-aitch", &["verify", "aitch", "--lmax", "64"]),
        (
            "verify-sumset-bound",
            &["verify", "sumset-bound", "--kmax", "5", "--samples", "50"],
        ),
        ("qk", &["qk", "--k", "3"]),
        ("qk", &["qk", "--k", "2", "--l", "2"]),
        ("qk", &["qk", "--k", "12", "--l", "100", "--bracket"]),
        ("chim", &["chim", "--k", "2"]),
        ("chim", &["chim", "--k", "3", "--m", "3"]),
        ("gamma-pair", &["gamma-pair", "--k", "4"]),
        ("nfc", &["nfc", "--c1", "2", "--c2", "1", "--list-cuts", "--report"]),
    ];
    for (schema, args) in cases {
        assert_schema(schema, &json_ok(args));
    }
}

#[test]
fn reproduce_passes_and_matches_schema() {
    let doc = json_ok(&["reproduce"]);
    assert_schema("reproduce", &doc);
    assert_eq!(doc["value"], json!(true));
    assert_eq!(doc["summary"], json!({"passed": 8, "total": 8}));
}

#[test]
fn headline_values() {
    let doc = json_ok(&["capacity", "--case", "01", "--c1", "2", "--c2", "1"]);
    assert_eq!(doc["value"], json!(1.630929753571));
    assert_eq!(doc["formula"], json!("log3(6)"));
    assert_eq!(doc["model"], json!("(01;2,1;sum)"));

    let doc = json_ok(&["capacity", "--case", "01", "--c1", "1", "--c2", "2"]);
    assert_eq!(doc["model"], json!("(10;2,1;sum)"));
    assert_eq!(doc["value"], json!(1.0));

    let doc = json_ok(&["construct", "--case", "01", "--c1", "2", "--c2", "1", "--k", "100"]);
    assert_eq!(doc["rate"], json!("50/31"));
    assert_eq!(doc["n"], json!(62));
    assert_eq!(doc["witness"], json!({"name": "split", "k1": 39}));
    assert_eq!(doc["admissible"], Value::Null);

    let doc = json_ok(&["qk", "--k", "2", "--l", "2"]);
    assert_eq!(doc["value"], json!(6));
    assert_eq!(doc["witness"], json!(["00", "01"]));

    let doc = json_ok(&["nfc", "--c1", "2", "--c2", "1"]);
    assert_eq!(doc["value"], json!(1.892789260714));
    assert_eq!(doc["witness"], json!(["e1", "e2", "e3"]));
    assert_eq!(doc["n_cf"], json!(3));

    let doc = json_ok(&["gamma-pair", "--k", "5"]);
    assert_eq!(doc["value"], json!(48));
}

#[test]
fn output_is_deterministic_without_timing() {
    for args in [
        &["--no-timing", "nfc", "--c1", "3", "--c2", "1", "--list-cuts"][..],
        &[
            "--no-timing",
            "--seed",
            "7",
            "verify",
            "sumset-bound",
            "--kmax",
            "6",
            "--samples",
            "100",
        ],
        &["--no-timing", "--threads", "1", "chim", "--k", "3"],
        &[
            "--no-timing",
            "capacity",
            "--case",
            "01",
            "--c1",
            "5/2",
            "--c2",
            "1",
            "--sandwich",
            "1,2,4,...,64",
        ],
    ] {
        let first = zefc(args);
        assert_eq!(first.0, 0);
        assert_eq!(first, zefc(args), "{args:?}");
    }
    let threaded = zefc(&["--no-timing", "--threads", "4", "chim", "--k", "3"]);
    assert_eq!(threaded, zefc(&["--no-timing", "--threads", "1", "chim", "--k", "3"]));
}

#[test]
fn invalid_input_exits_with_error_object() {
    for args in [
        &["qk", "--k", "9"][..],
        &["qk", "--k", "3", "--l", "9"],
        &["capacity", "--case", "2", "--c1", "1", "--c2", "1"],
        &["capacity", "--case", "01", "--c1", "-1", "--c2", "1"],
        &["capacity", "--case", "01", "--c1", "1", "--c2", "x"],
        &["chim", "--k", "4"],
        &["nfc", "--c1", "3/2", "--c2", "1"],
        &[
            "capacity",
            "--case",
            "01",
            "--c1",
            "2",
            "--c2",
            "1",
            "--sandwich",
            "1,...",
        ],
        &["frobnicate"],
        &["qk"],
        &["--threads", "0", "qk", "--k", "2"],
    ] {
        let (code, out) = zefc(args);
        assert_eq!(code, 2, "{args:?}: {out}");
        let doc: Value = serde_json::from_str(&out).unwrap_or_else(|_| panic!("{args:?}: {out}"));
        assert_schema("error", &doc);
    }
    let (_, out) = zefc(&["qk", "--k", "9"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        doc["error"]["message"],
        json!("exact mode limited to k<=4; use --bracket")
    );
}

#[test]
fn help_and_version_succeed() {
    let (code, out) = zefc(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("capacity"));
    let (code, out) = zefc(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn emitted_code_loads_and_decodes() {
    let path = std::env::temp_dir().join(format!("zefc-emit-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let doc = json_ok(&[
        "construct",
        "--case",
        "01",
        "--c1",
        "3",
        "--c2",
        "1",
        "--k",
        "5",
        "--emit",
        p,
    ]);
    assert_eq!(doc["admissible"], json!(true));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let code = zefc::codec::KShotCode::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert!(zefc::codec::check_admissible(&code).unwrap().is_admissible());
    assert_eq!(code.k(), 5);
}

#[test]
fn table_format_renders_rows() {
    let (code, out) = zefc(&["--format", "table", "--no-timing", "qk", "--k", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("command: qk"));
    assert!(out
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["l", "lower", "upper", "exact"]));
}
