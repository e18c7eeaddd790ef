//! End-to-end runs of the `gibbs-rigidity` binary on the fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbs-rigidity"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs with `--input <fixture>` appended and returns the exit code and
/// the parsed document (Null when stdout is empty).
fn run_on(args: &[&str], input: &str) -> (i32, Value, String) {
    let path = fixture(input);
    let mut all = args.to_vec();
    all.extend(["--input", path.to_str().unwrap()]);
    let out = run(&all);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let doc = if stdout.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"))
    };
    (
        out.status.code().unwrap(),
        doc,
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Number literals outside strings, in document order.
fn number_tokens(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        match bytes[k] {
            b'"' => {
                k += 1;
                while bytes[k] != b'"' {
                    k += if bytes[k] == b'\\' { 2 } else { 1 };
                }
                k += 1;
            }
            b'-' | b'0'..=b'9' => {
                let start = k;
                while k < bytes.len()
                    && matches!(bytes[k], b'-' | b'+' | b'.' | b'e' | b'E' | b'0'..=b'9')
                {
                    k += 1;
                }
                out.push(&text[start..k]);
            }
            _ => k += 1,
        }
    }
    out
}

fn numbers(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Number(_) => out.push(v.clone()),
        Value::Array(items) => items.iter().for_each(|x| numbers(x, out)),
        Value::Object(map) => map.values().for_each(|x| numbers(x, out)),
        _ => {}
    }
}

/// Every real is printed in the canonical 17-digit form of the value the
/// parser reads back.
fn assert_round_trip(text: &str) {
    let doc: Value = serde_json::from_str(text).unwrap();
    let tokens = number_tokens(text);
    let mut parsed = Vec::new();
    numbers(&doc, &mut parsed);
    assert_eq!(tokens.len(), parsed.len());
    for (t, v) in tokens.iter().zip(&parsed) {
        if t.contains('e') {
            let x = v.as_f64().unwrap();
            assert_eq!(x.to_bits(), t.parse::<f64>().unwrap().to_bits(), "{t}");
            assert_eq!(format!("{x:.16e}"), *t);
        } else {
            assert_eq!(v.to_string(), *t);
        }
    }
}

#[test]
fn certificate_for_the_example_potential() {
    let (code, doc, _) = run_on(&["rigidity", "certificate"], "example2978.json");
    assert_eq!(code, 0);
    assert_eq!(doc["verdict"], true);
    assert_eq!(doc["mode"], "numerical");
    for check in [
        "f_in_g",
        "spectra_equal",
        "not_cohomologous",
        "aut_trivial",
        "e0_value_sets_differ",
    ] {
        assert_eq!(doc["checks"][check], true, "{check}");
    }
    assert_eq!(doc["witness_cycle"], "1321");
    // Cycle 1321 runs over Q_13 = 1, Q_32 and Q_21 = 1, with Q_32 = a2 for f
    // and a3 b1 for g.
    assert!((f(&doc["cycle_sum_f"]) - 0.3f64.ln()).abs() < 1e-12);
    assert!((f(&doc["cycle_sum_g"]) - (0.5f64 * 0.4).ln()).abs() < 1e-12);
    assert_eq!(doc["automorphisms"]["result"], "trivial");
    assert_eq!(doc["amalgamation_is_identity"], true);
    assert!(f(&doc["spectra_max_deviation"]) <= f(&doc["tolerances"]["char_poly"]));
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    let bytes = std::fs::read(fixture("example2978.json")).unwrap();
    assert_eq!(doc["input_sha256"], hex::encode(Sha256::digest(&bytes)));
    let q_g = &doc["q_g"];
    let expected = [(0, 3, 0.5), (1, 3, 0.5), (2, 1, 0.2), (3, 1, 0.6)];
    for (i, j, x) in expected {
        assert!((f(&q_g[i][j]) - x).abs() < 1e-12, "{i}{j}");
    }
    assert!(q_g[0][0].is_null());
}

#[test]
fn exact_certificate_and_partner() {
    let (code, doc, _) = run_on(&["rigidity", "certificate"], "example2978_exact.json");
    assert_eq!(code, 0);
    assert_eq!(doc["mode"], "exact");
    assert_eq!(doc["verdict"], true);
    let q_g: Vec<Vec<Option<String>>> = serde_json::from_value(doc["q_g_exact"].clone()).unwrap();
    let s = |x: &str| Some(x.to_string());
    assert_eq!(
        q_g,
        vec![
            vec![None, s("1/5"), s("1"), s("1/2")],
            vec![s("1"), None, None, s("1/2")],
            vec![None, s("1/5"), None, None],
            vec![None, s("3/5"), None, None],
        ]
    );
}

#[test]
fn colliding_values_give_a_negative_verdict() {
    let (code, doc, _) = run_on(&["rigidity", "certificate"], "collision.json");
    assert_eq!(code, 4);
    assert_eq!(doc["verdict"], false);
    assert_eq!(doc["checks"]["f_in_g"], false);
    // a3 = b1 = b2 = 1/2; the first repeat in E0 order 12, 32, 42, 14, 24.
    assert_eq!(doc["collision"], serde_json::json!(["42", "14"]));
    let (code, doc, _) = run_on(&["rigidity", "check-g"], "collision.json");
    assert_eq!(code, 0);
    assert_eq!(doc["member"], false);
}

#[test]
fn cylinder_measure_of_132() {
    for input in [
        "example2978.json",
        "example2978_exact.json",
        "example2978_shifted.json",
    ] {
        let (code, doc, _) = run_on(&["gibbs", "measure", "--word", "132"], input);
        assert_eq!(code, 0);
        // pi_2 * Q_32 * Q_13 = 0.4 * 0.3 * 1.
        assert!((f(&doc["measure"]) - 0.12).abs() < 1e-12, "{input}: {doc}");
    }
    let (code, doc, _) = run_on(&["gibbs", "measure", "--word", "133"], "example2978.json");
    assert_eq!(
        (code, doc["measure"].as_f64(), doc["admissible"].as_bool()),
        (0, Some(0.0), Some(false))
    );
    let (code, _, err) = run_on(&["gibbs", "measure", "--word", "152"], "example2978.json");
    assert_eq!(code, 2, "{err}");
}

#[test]
fn curve_of_the_uniform_full_two_shift_is_a_point() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("curve.csv");
    let args = [
        "spectrum",
        "curve",
        "--qmin",
        "-3",
        "--qmax",
        "3",
        "--steps",
        "25",
        "--table",
        table.to_str().unwrap(),
    ];
    let (code, doc, _) = run_on(&args, "full2.json");
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&table).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("q,alpha,entropy"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    let samples = doc["samples"].as_array().unwrap();
    for (k, (row, s)) in rows.iter().zip(samples).enumerate() {
        assert!((row[0] - (-3.0 + 0.25 * k as f64)).abs() < 1e-12);
        assert!(
            (row[1] - 2f64.ln()).abs() < 1e-12 && (row[2] - 2f64.ln()).abs() < 1e-12,
            "{row:?}"
        );
        assert_eq!([f(&s["q"]), f(&s["alpha"]), f(&s["entropy"])], row[..]);
    }
}

#[test]
fn counterexample_partner_is_a_valid_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    for (input, mode) in [
        ("example2978.json", "numerical"),
        ("example2978_exact.json", "exact"),
    ] {
        let (code, doc, _) = run_on(&["rigidity", "counterexample"], input);
        assert_eq!(code, 0);
        let partner = dir.path().join(format!("partner_{mode}.json"));
        std::fs::write(&partner, doc["partner"].to_string()).unwrap();
        let other = ["--other", partner.to_str().unwrap()];
        let (code, cmp, _) = run_on(&[&["spectrum", "compare"][..], &other[..]].concat(), input);
        assert_eq!(
            (code, &cmp["equal"], &cmp["mode"]),
            (0, &Value::Bool(true), &Value::from(mode))
        );
        let (code, coh, _) = run_on(&[&["gibbs", "cohomology"][..], &other[..]].concat(), input);
        assert_eq!(code, 0);
        assert_eq!(coh["cohomologous"], false);
        assert_eq!(coh["witness"], "1321");
        let (code, conj, _) = run_on(
            &[&["rigidity", "conjugacy"][..], &other[..]].concat(),
            input,
        );
        assert_eq!(code, 4);
        assert_eq!(conj["obstruction"], "value_set_mismatch");
    }
}

#[test]
fn comparisons_between_related_inputs() {
    let shifted = fixture("example2978_shifted.json");
    let other = ["--other", shifted.to_str().unwrap()];
    let (code, doc, _) = run_on(
        &[&["gibbs", "cohomology"][..], &other[..]].concat(),
        "example2978.json",
    );
    assert_eq!((code, &doc["cohomologous"]), (0, &Value::Bool(true)));
    let (code, doc, _) = run_on(
        &[&["rigidity", "conjugacy"][..], &other[..]].concat(),
        "example2978.json",
    );
    assert_eq!(code, 0);
    assert_eq!(doc["identity"], true);
    let table = doc["table"].as_object().unwrap();
    let window = doc["window"].as_u64().unwrap() as usize;
    assert!(table.keys().all(|block| block.len() == window));
    assert!(table.iter().all(|(block, s)| block[..1] == s.to_string()));

    let perturbed = fixture("perturbed.json");
    let other = ["--other", perturbed.to_str().unwrap()];
    let (code, doc, _) = run_on(
        &[&["spectrum", "compare"][..], &other[..]].concat(),
        "example2978.json",
    );
    assert_eq!((code, &doc["equal"]), (0, &Value::Bool(false)));
    let (code, doc, err) = run_on(
        &[&["rigidity", "conjugacy"][..], &other[..]].concat(),
        "example2978.json",
    );
    assert_eq!(code, 4, "{err}");
    assert_eq!(doc["obstruction"], "value_set_mismatch");
    let mut only: Vec<f64> = doc["only_first"]
        .as_array()
        .unwrap()
        .iter()
        .map(f)
        .collect();
    only.sort_by(f64::total_cmp);
    assert!((only[0] - 0.2).abs() < 1e-12 && (only[1] - 0.3).abs() < 1e-12);
}

#[test]
fn reconstruction_and_sampling() {
    let (code, doc, _) = run_on(
        &["rigidity", "reconstruct", "--values", "0.3,1,0.2"],
        "example2978.json",
    );
    assert_eq!((code, &doc["word"]), (0, &Value::from("3212")));
    let (code, _, err) = run_on(
        &["rigidity", "reconstruct", "--values", "0.3,0.77"],
        "example2978.json",
    );
    assert_eq!(code, 2, "{err}");
    let (code, doc, _) = run_on(
        &["rigidity", "sample-g", "--samples", "50", "--seed", "7"],
        "example2978.json",
    );
    assert_eq!(code, 0);
    assert_eq!(doc["samples"], 50);
    assert_eq!(doc["seed"], 7);
    assert!((0.0..=1.0).contains(&f(&doc["fraction"])));
}

#[test]
fn shift_commands_on_the_example_matrix() {
    let (_, info, _) = run_on(&["shift", "info"], "example2978.json");
    assert_eq!(info["v0"], serde_json::json!([2, 4]));
    assert_eq!(
        info["e0"],
        serde_json::json!(["12", "32", "42", "14", "24"])
    );
    assert_eq!(info["in_degrees"], serde_json::json!([1, 3, 1, 2]));
    let (_, cycles, _) = run_on(&["shift", "cycles"], "example2978.json");
    assert_eq!(
        cycles["cycles"],
        serde_json::json!(["121", "1321", "1421", "242"])
    );
    let (_, am, _) = run_on(&["shift", "amalgamate"], "full2.json");
    assert_eq!(am["matrix"]["n"], 1);
    let (_, autos, _) = run_on(&["shift", "autos"], "full2.json");
    assert_eq!(autos["result"], "inconclusive");
    assert_eq!(autos["graph_group"], serde_json::json!([[1, 2], [2, 1]]));
}

#[test]
fn normalize_and_entropy() {
    let (code, doc, _) = run_on(&["gibbs", "normalize"], "full2.json");
    assert_eq!(code, 0);
    assert!((f(&doc["lambda"]) - 2.0).abs() < 1e-12);
    for row in doc["q"].as_array().unwrap() {
        for x in row.as_array().unwrap() {
            assert!((f(x) - 0.5).abs() < 1e-12);
        }
    }
    let (_, doc, _) = run_on(&["gibbs", "entropy"], "example2978.json");
    // Entropy -sum pi_j Q_ij log Q_ij with pi = (0.28, 0.4, 0.12, 0.2).
    let h = |x: f64| -x * x.ln();
    let expected = 0.4 * (h(0.2) + h(0.3) + h(0.5)) + 0.2 * (h(0.4) + h(0.6));
    assert!((f(&doc["ks_entropy"]) - expected).abs() < 1e-12);
    assert!(f(&doc["pressure"]).abs() < 1e-12);
    let (_, doc, _) = run_on(&["gibbs", "normalize"], "example2978_exact.json");
    assert_eq!(doc["q_exact"][2][1], "3/10");
}

#[test]
fn documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    let runs: Vec<(Vec<&str>, &str)> = vec![
        (vec!["rigidity", "certificate"], "example2978.json"),
        (vec!["rigidity", "certificate"], "example2978_exact.json"),
        (vec!["gibbs", "normalize"], "example2978.json"),
        (
            vec!["spectrum", "curve", "--table", table.to_str().unwrap()],
            "example2978.json",
        ),
        (vec!["rigidity", "counterexample"], "example2978.json"),
        (vec!["shift", "info"], "example2978.json"),
    ];
    for (args, input) in runs {
        let path = fixture(input);
        let out = run(&[&args[..], &["--input", path.to_str().unwrap()][..]].concat());
        assert!(out.status.success());
        assert_round_trip(std::str::from_utf8(&out.stdout).unwrap());
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<String>> = vec![
        vec!["rigidity".into(), "certificate".into()],
        vec![
            "rigidity".into(),
            "sample-g".into(),
            "--samples".into(),
            "40".into(),
            "--seed".into(),
            "11".into(),
        ],
        vec!["gibbs".into(), "normalize".into()],
    ];
    let path = fixture("example2978.json");
    for args in runs {
        let mut args = args.clone();
        args.extend(["--input".into(), path.to_str().unwrap().into()]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
    let tables: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let t = dir.path().join(format!("c{k}.csv"));
            let out = run(&[
                "spectrum",
                "curve",
                "--table",
                t.to_str().unwrap(),
                "--input",
                path.to_str().unwrap(),
            ]);
            assert!(out.status.success());
            std::fs::read(t).unwrap()
        })
        .collect();
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn exit_codes() {
    let (code, doc, err) = run_on(&["shift", "info"], "truncated.json");
    assert_eq!(code, 2);
    assert!(doc.is_null());
    assert!(
        err.contains("truncated.json") && err.contains("line 3"),
        "{err}"
    );

    let (code, _, err) = run_on(&["shift", "info"], "not_primitive.json");
    assert_eq!(code, 2);
    assert!(
        err.contains("matrix") && err.contains("not primitive"),
        "{err}"
    );

    let (code, _, err) = run_on(&["rigidity", "counterexample"], "degenerate.json");
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = run_on(&["rigidity", "counterexample"], "full2.json");
    assert_eq!(code, 2);

    let (code, doc, err) = run_on(&["gibbs", "normalize"], "overflow.json");
    assert_eq!(code, 3, "{err}");
    assert!(doc.is_null());

    let (code, _, _) = run_on(&["gibbs", "entropy"], "missing.json");
    assert_eq!(code, 2);
    assert_eq!(run(&["shift", "frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["gibbs", "measure", "--input", "x.json"])
            .status
            .code(),
        Some(2)
    );
}
