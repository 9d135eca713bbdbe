use std::path::PathBuf;

use qwres_cli::{main_with_args, EXIT_IO, EXIT_USAGE};
use serde_json::Value;

fn config(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    root.join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (u8, String) {
    let mut out = Vec::new();
    let code = main_with_args(
        std::iter::once("qwres").chain(args.iter().copied()),
        &mut out,
    );
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).unwrap()
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn triple_barrier_has_a_double_resonance_pair() {
    let res = json(&["resonances", "--config", &config("triple.json")]);
    let res = res.as_array().unwrap();
    assert_eq!(res.len(), 2);
    for r in res {
        let (re, im) = pair(&r["mu"]);
        assert!((re + 0.5).abs() < 1e-12 && im.abs() < 1e-12);
        assert_eq!(r["multiplicity"], 2);
    }
}

#[test]
fn triple_barrier_polynomial() {
    let p = json(&["polynomial", "--config", &config("triple.json")]);
    let coeffs: Vec<(f64, f64)> = p.as_array().unwrap().iter().map(pair).collect();
    for (c, expected) in coeffs.iter().zip([0.25, 1.0, 1.0]) {
        assert!((c.0 - expected).abs() < 1e-12 && c.1.abs() < 1e-12);
    }
}

#[test]
fn hadamard_survival_fit() {
    let fit = json(&[
        "survival",
        "--config",
        &config("hadamard2.json"),
        "--T",
        "40",
        "--fit",
    ]);
    let m = fit["M_est"].as_f64().unwrap();
    assert!((m - 0.70711).abs() < 1e-5);
    assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert!((fit["m_est"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn selftest_exits_cleanly() {
    let (code, out) = run(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("9 of 9 checks passed"));
}

#[test]
fn outputs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &[
            "scattering",
            "--config",
            &config("triple.json"),
            "--xi-grid",
            "-3.1:3.1:101,-0.2",
        ],
        &["expand", "--config", &config("triple.json")],
        &[
            "split",
            "--config",
            &config("triple.json"),
            "--eps",
            "1e-3,1e-4",
        ],
        &["evolve", "--config", &config("hadamard2.json"), "--T", "12"],
    ];
    for args in cases {
        let (c1, a) = run(args);
        let (c2, b) = run(args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn files_and_siblings_are_written() {
    let dir = std::env::temp_dir().join(format!("qwres-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("evolve.csv");
    let (code, stdout) = run(&[
        "evolve",
        "--config",
        &config("hadamard2.json"),
        "--T",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let summary = std::fs::read_to_string(dir.join("evolve.summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "t,survival_norm");
    assert_eq!(lines.len(), 8);
    // ‖χψ_t‖ = 2^{−t/2}
    let s4: f64 = lines[5].split(',').nth(1).unwrap().parse().unwrap();
    assert!((s4 - 0.25).abs() < 1e-15);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failures_have_distinct_exit_codes() {
    let dir = std::env::temp_dir().join(format!("qwres-cli-err-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad_coin = dir.join("bad.json");
    std::fs::write(
        &bad_coin,
        r#"{"coins":[{"rotation":0.5},{"a":[1,0],"b":[1,0],"c":[0,0],"d":[1,0]}]}"#,
    )
    .unwrap();
    let bad = bad_coin.to_str().unwrap();

    let codes = [
        run(&["resonances", "--config", "/nonexistent/walk.json"]).0,
        run(&["frobnicate"]).0,
        run(&["resonances", "--config", bad]).0,
        run(&["split", "--config", &config("hadamard2.json")]).0,
        run(&[
            "resolvent-check",
            "--config",
            &config("hadamard2.json"),
            "--xi-grid",
            "0:0:1,-0.34657359027997264",
        ])
        .0,
        run(&["split", "--config", &config("triple.json"), "--eps", "0.7"]).0,
    ];
    assert_eq!(codes, [EXIT_IO, EXIT_USAGE, 2, 3, 30, 2]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn flags_override_the_config() {
    let (_, a) = run(&["survival", "--config", &config("hadamard2.json")]);
    let (_, b) = run(&[
        "survival",
        "--config",
        &config("hadamard2.json"),
        "--T",
        "5",
    ]);
    assert_eq!(a.lines().count(), 42);
    assert_eq!(b.lines().count(), 7);
}
