use std::process::{Command, Output};

use serde_json::Value;

fn pfcme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfcme")).args(args).output().expect("spawn pfcme")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of CSV output as floats, skipping the comment and column lines.
fn csv_rows(o: &Output) -> Vec<Vec<Option<f64>>> {
    let text = stdout(o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# pfcme "));
    lines.next().unwrap();
    lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) }).collect())
        .collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn table_rows_follow_input_order() {
    let o = pfcme(&["table", "--m-list", "520,200,519"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&o);
    let ms: Vec<f64> = rows.iter().map(|r| r[0].unwrap()).collect();
    assert_eq!(ms, [520.0, 200.0, 519.0]);
    assert_eq!(rows[1][2], Some(2389.0));
    assert!((rows[1][3].unwrap() / 8.003e-4 - 1.0).abs() < 1e-3);
    assert!(rows[2][4].unwrap() >= 1.0 && rows[0][4].unwrap() < 1.0);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("m,r,n,scv,"));
}

#[test]
fn table_json_mirrors_csv() {
    let csv = csv_rows(&pfcme(&["table", "--m", "10,50"]));
    let o = pfcme(&["table", "--m", "10,50", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    let rows = doc["rows"].as_array().unwrap();
    for (j, c) in rows.iter().zip(&csv) {
        for (a, b) in j.as_array().unwrap().iter().zip(c) {
            assert_eq!(a.as_f64().unwrap().to_bits(), b.unwrap().to_bits());
        }
    }
}

#[test]
fn printed_numbers_round_trip() {
    let o = pfcme(&["moments", "--m", "200"]);
    let text = stdout(&o);
    let line = text.lines().nth(2).unwrap();
    for field in line.split(',').skip(1) {
        let v: f64 = field.parse().unwrap();
        assert_eq!(format!("{v:.16e}"), field);
    }
    let scv: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
    let exact = pfcme::PfCme64::new(200).unwrap().scv();
    assert_eq!(scv.to_bits(), exact.to_bits());
}

#[test]
fn density_grid_and_peak() {
    let o = pfcme(&["density", "--m", "50", "--start", "0", "--stop", "3", "--step", "0.001"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 3001);
    assert!(rows.iter().all(|r| r[1].unwrap() >= 0.0));
    let (t_max, _) = rows
        .iter()
        .map(|r| (r[0].unwrap(), r[1].unwrap()))
        .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    // one grid step, with slack for the decimal step not being exact
    assert!((t_max - 1.0).abs() <= 0.001 * (1.0 + 1e-9), "peak at {t_max}");
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert!(header.contains("m:50") && header.contains("version=0.1.0"));
}

#[test]
fn density_row_count_rule() {
    for (start, stop, step, rows) in [("0", "1", "0.1", 11), ("0.5", "0.5", "1", 1), ("0", "1", "0.3", 4)] {
        let o = pfcme(&["density", "--m", "10", "--start", start, "--stop", stop, "--step", step]);
        assert_eq!(csv_rows(&o).len(), rows, "{start}..{stop} by {step}");
    }
}

#[test]
fn sample_is_reproducible() {
    let args = ["sample", "--m", "60", "--count", "1000", "--seed", "17"];
    let a = pfcme(&args);
    let b = pfcme(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = pfcme(&["sample", "--m", "60", "--count", "1000", "--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);
    let header = stdout(&a).lines().next().unwrap().to_string();
    assert!(header.contains("seed=17") && header.contains("generator=xoshiro256++"));
}

#[test]
fn sample_mean_within_standard_errors() {
    let o = pfcme(&["sample", "--m", "100", "--count", "100000", "--seed", "5"]);
    let xs: Vec<f64> = csv_rows(&o).into_iter().map(|r| r[0].unwrap()).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let d = pfcme::PfCme64::new(100).unwrap();
    let se = (d.variance() / n).sqrt();
    assert!((mean - d.mean()).abs() <= 4.0 * se);
}

#[test]
fn invert_constant_and_exponential() {
    let o = pfcme(&["invert", "--m", "200", "--transform", "const", "--t", "0.5,1,2"]);
    assert_eq!(code(&o), 0);
    for r in csv_rows(&o) {
        assert!((r[1].unwrap() - 1.0).abs() <= 1e-12);
        assert!(r[3].unwrap() <= 1e-12);
    }
    let o = pfcme(&["invert", "--m", "1000", "--transform", "exp", "--t", "1"]);
    let r = &csv_rows(&o)[0];
    assert!(r[3].unwrap() <= 1e-4, "error {:?}", r[3]);
}

#[test]
fn rational_matches_catalog_bitwise() {
    let a = csv_rows(&pfcme(&["invert", "--m", "200", "--transform", "exp", "--t", "0.5,1,3"]));
    let o = pfcme(&["invert", "--m", "200", "--rational", "num=1; den=1,1", "--t", "0.5,1,3"]);
    let b = csv_rows(&o);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[1].unwrap().to_bits(), y[1].unwrap().to_bits());
        // no reference inverse for user input
        assert!(y[2].is_none() && y[3].is_none());
    }
}

fn schema() -> jsonschema::JSONSchema {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/bound_report.schema.json");
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&raw).expect("schema compiles")
}

fn assert_valid(doc: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}");
}

#[test]
fn verify_bounds_passes_at_512() {
    let o = pfcme(&["verify-bounds", "--m-list", "512"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&doc);
    let r = &doc["reports"][0];
    for k in ["peak_ok", "transition_ok", "tail_ok"] {
        assert_eq!(r[k], Value::Bool(true), "{k}");
    }
}

#[test]
fn verify_bounds_flags_small_index() {
    let o = pfcme(&["verify-bounds", "--m-list", "4"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&doc);
    assert_eq!(doc["reports"][0]["below_recommended_range"], Value::Bool(true));
}

#[test]
fn verify_bounds_failure_exit_code() {
    let o = pfcme(&["verify-bounds", "--m-list", "64", "--a1", "0.125"]);
    assert_eq!(code(&o), 4);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&doc);
    assert_eq!(doc["ok"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["table", "--m-list", ""],
        &["table"],
        &["table", "--m-list", "2"],
        &["sample", "--m", "10", "--count", "0"],
        &["density", "--m", "10", "--start", "-1", "--stop", "1", "--step", "0.1"],
        &["density", "--m", "10", "--stop", "1", "--step", "0"],
        &["invert", "--m", "10", "--transform", "nope", "--t", "1"],
        &["invert", "--m", "10", "--rational", "num=1", "--t", "1"],
        &["table", "--m-list", "6000"],
        &["verify-bounds", "--m-list", "64", "--a1", "0.2"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = pfcme(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unknown_transform_lists_catalog() {
    let o = pfcme(&["invert", "--m", "10", "--transform", "nope", "--t", "1"]);
    let err = String::from_utf8(o.stderr).unwrap();
    for name in ["const", "ramp", "exp", "sin", "step"] {
        assert!(err.contains(name), "{name} missing from {err}");
    }
}

#[test]
fn guardrail_can_be_lifted() {
    let o = pfcme(&["--max-m", "20", "table", "--m-list", "30"]);
    assert_eq!(code(&o), 2);
    let o = pfcme(&["--max-m", "20", "--allow-large-m", "table", "--m-list", "30"]);
    assert_eq!(code(&o), 0);
}
