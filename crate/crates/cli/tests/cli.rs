use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hecke-mod"));
    c.env_remove("HECKE_MOD_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn charpoly_examples() {
    assert_eq!(stdout(&["charpoly", "--prime", "2", "--weight", "12"]), "x + 24\n");
    assert_eq!(
        stdout(&["charpoly", "--prime", "2", "--weight", "24", "--ell", "5"]),
        "(x + 1)(x + 4) over F_5\n"
    );
    assert_eq!(stdout(&["charpoly", "--prime", "2", "--weight", "10"]), "1 (dim 0)\n");
    assert_eq!(
        stdout(&["charpoly", "--prime", "2", "--weight", "24"]),
        "x^2 - 1080x - 20468736\n"
    );
}

#[test]
fn table_examples() {
    let t13 = stdout(&["table", "--ell", "13"]);
    assert!(t13.contains("k = 10 mod 12   (11, 2, 7, 12, 9, 12, 7, 2, 11, 6, 1, 4, 1, 6)"));
    let t7: Value = serde_json::from_str(&stdout(&["table", "--ell", "7", "--format", "json"])).unwrap();
    let cell = t7["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["p"] == 5 && c["kclass"] == 0)
        .unwrap();
    assert_eq!(cell["one_period"], serde_json::json!([0, 3, 0, 4]));
    let t5 = stdout(&["table", "--ell", "5"]);
    assert!(t5.lines().any(|l| l.starts_with("p = 19") && l.matches("(0)").count() == 2));
}

#[test]
fn trace_period_and_deduce_examples() {
    assert_eq!(stdout(&["trace", "--n", "2", "--weight", "12"]), "-24\n");
    assert_eq!(stdout(&["period", "--prime", "2", "--ell", "13", "--kclass", "0"]), "14\n");
    let d = stdout(&["deduce", "--weight", "24", "--target-prime", "3", "--no-discharge"]);
    assert!(d.starts_with("conditional:"));
    assert!(d.contains("mod 5 roots (2,3)"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["charpoly", "--prime", "2", "--weight", "13"]), 1);
    assert_eq!(code(&["charpoly", "--prime", "4", "--weight", "12"]), 1);
    assert_eq!(code(&["charpoly", "--prime", "5", "--weight", "12", "--ell", "5"]), 1);
    assert_eq!(code(&["table", "--ell", "11"]), 1);
    assert_eq!(code(&["no-such-command"]), 1);
    assert_eq!(code(&["charpoly", "--prime", "2"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn corrupt_cache_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("T_2.jsonl"), "{ not json\n").unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["--cache-dir", d, "charpoly", "--prime", "2", "--weight", "12"]), 2);
}

/// A wrong cached polynomial breaks the divisibility chain, which must be
/// reported as a falsification rather than a crash or a silent pass.
#[test]
fn poisoned_cache_is_a_falsification() {
    let dir = tempfile::tempdir().unwrap();
    // T_{2,16} is really x + 216; x + 217 is not divisible into T_{2,20} mod 5
    let line = r#"{"coeffs":["217","1"],"k":16,"p":2}"#;
    fs::write(dir.path().join("T_2.jsonl"), format!("{line}\n")).unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&["--cache-dir", d, "period", "--prime", "2", "--ell", "5", "--kclass", "0"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["--cache-dir", d, "--format", "json", "table", "--ell", "5"];
    let first = stdout(&args);
    let files = dir_bytes(dir.path());
    assert!(files.iter().any(|(n, _)| n == "T_2.jsonl"));
    let warm = stdout(&args);
    assert_eq!(first, warm);
    for (name, _) in &files {
        fs::remove_file(dir.path().join(name)).unwrap();
    }
    let cold = stdout(&args);
    assert_eq!(first, cold);
    assert_eq!(files, dir_bytes(dir.path()));
}

#[test]
fn environment_overrides_cache_flag() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let out = bin()
        .env("HECKE_MOD_CACHE", env.path())
        .args(["--cache-dir", flag.path().to_str().unwrap()])
        .args(["charpoly", "--prime", "3", "--weight", "24"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env.path().join("T_3.jsonl").exists());
    assert!(!flag.path().join("T_3.jsonl").exists());
}

#[test]
fn jobs_do_not_change_output() {
    for args in [
        &["deduce", "--weight", "24", "--below", "60", "--format", "json"][..],
        &["table", "--ell", "7", "--format", "csv"],
    ] {
        let one = stdout(&[&["--jobs", "1"], args].concat());
        let four = stdout(&[&["--jobs", "4"], args].concat());
        assert_eq!(one, four, "{args:?}");
    }
}

#[test]
fn seed_does_not_change_output() {
    let args = ["charpoly", "--prime", "3", "--weight", "96", "--ell", "7"];
    let a = stdout(&[&["--seed", "0"], &args[..]].concat());
    let b = stdout(&[&["--seed", "12345"], &args[..]].concat());
    assert_eq!(a, b);
}

#[test]
fn json_outputs_match_schemas() {
    let cases: &[(&str, &[&str])] = &[
        ("charpoly", &["charpoly", "--prime", "2", "--weight", "24", "--ell", "5"]),
        ("charpoly", &["charpoly", "--prime", "2", "--weight", "10"]),
        ("table", &["table", "--ell", "5"]),
        ("table", &["table", "--ell", "13", "--single-period"]),
        ("trace", &["trace", "--n", "3", "--weight", "20", "--ell", "7"]),
        ("period", &["period", "--prime", "3", "--ell", "7", "--kclass", "2", "--trace"]),
        ("certify", &["certify", "--prime", "2", "--weight", "48"]),
        ("certify", &["certify", "--poly", "1,0,0,0,1", "--bound", "100"]),
        ("deduce", &["deduce", "--weight", "24", "--below", "30"]),
        ("deduce", &["deduce", "--weight", "60", "--target-prime", "3", "--no-discharge"]),
    ];
    let schema_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    for (name, args) in cases {
        let schema: Value = serde_json::from_str(
            &fs::read_to_string(schema_dir.join(format!("{name}.schema.json"))).unwrap(),
        )
        .unwrap();
        let validator = jsonschema::JSONSchema::options()
            .with_draft(jsonschema::Draft::Draft202012)
            .compile(&schema)
            .unwrap();
        let out: Value = serde_json::from_str(&stdout(&[*args, &["--format", "json"]].concat())).unwrap();
        let msgs: Vec<String> = match validator.validate(&out) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
        };
        assert!(msgs.is_empty(), "{args:?}: {msgs:?}");
    }
}

#[test]
fn csv_column_counts_are_fixed() {
    for (args, cols) in [
        (&["table", "--ell", "7"][..], 6),
        (&["charpoly", "--prime", "2", "--weight", "36", "--ell", "7"], 6),
        (&["trace", "--n", "5", "--weight", "24"], 5),
        (&["period", "--prime", "2", "--ell", "7", "--kclass", "4"], 7),
        (&["certify", "--prime", "3", "--weight", "36"], 6),
        (&["deduce", "--weight", "24", "--below", "40"], 7),
    ] {
        let text = stdout(&[args, &["--format", "csv"]].concat());
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(r.headers().unwrap().len(), cols, "{args:?}");
        for rec in r.records() {
            assert_eq!(rec.unwrap().len(), cols, "{args:?}");
        }
    }
}
