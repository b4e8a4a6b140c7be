use std::path::Path;
use std::process::{Command, Output};

use qlearn::matrix::hs_inner;
use qlearn::qra::{QraCode, TwoOutcomePovm};
use qlearn::{Effect, HermitianMatrix, State};
use serde_json::Value;

fn qlearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlearn"))
        .args(args)
        .args(["--manifest", null_device()])
        .output()
        .expect("binary runs")
}

fn null_device() -> &'static str {
    if cfg!(windows) {
        "NUL"
    } else {
        "/dev/null"
    }
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Every subset effect reaches its side of the witness by ε, checked from
/// the serialized matrices.
fn recheck(cert: &Value) {
    let eps = cert["epsilon"].as_f64().unwrap();
    let points: Vec<HermitianMatrix> = serde_json::from_value(cert["points"].clone()).unwrap();
    let alpha: Vec<f64> = serde_json::from_value(cert["witnesses"].clone()).unwrap();
    let effects: Vec<HermitianMatrix> =
        serde_json::from_value(cert["subset_effects"].clone()).unwrap();
    assert_eq!(effects.len(), 1 << points.len());
    for (mask, e) in effects.iter().enumerate() {
        for (i, x) in points.iter().enumerate() {
            let v = hs_inner(e, x).unwrap();
            if mask >> i & 1 == 1 {
                assert!(v >= alpha[i] + eps - 1e-9);
            } else {
                assert!(v <= alpha[i] - eps + 1e-9);
            }
        }
    }
}

#[test]
fn builtin_examples_certify() {
    for (name, eps) in [
        ("qubit-pair", 1.0 / (2.0 * 2f64.sqrt()) - 1e-6),
        ("qubit-triple", 1.0 / (2.0 * 3f64.sqrt()) - 1e-6),
        ("c4-rank2", 0.499),
        ("orthonormal", 0.45),
    ] {
        let out = qlearn(&["certify", "--example", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        let v = json(&out);
        assert_eq!(v["status"], "certified");
        assert!((v["epsilon"].as_f64().unwrap() - eps).abs() < 1e-15);
        recheck(&v);
    }
}

#[test]
fn duplicate_points_are_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    let x = State::basis(2, 0).into_matrix();
    std::fs::write(&path, serde_json::to_string(&vec![x.clone(), x]).unwrap()).unwrap();
    let out = qlearn(&["certify", "--points", path.to_str().unwrap(), "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["status"], "infeasible");
    assert!(v["dual_bound"].as_f64().unwrap() < 0.1);
}

#[test]
fn undecided_has_its_own_exit_code() {
    let out = qlearn(&[
        "certify",
        "--example",
        "qubit-triple",
        "--method",
        "projections",
        "--max-iters",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "undecided");
}

#[test]
fn sweep_is_reproducible_and_marks_single_trials() {
    let args = ["sweep-rademacher", "--seed", "11", "--d", "2,4", "--trials", "50"];
    let a = qlearn(&args);
    let b = qlearn(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("class,d,n,epsilon,estimate,std_error,bound,bound_name,seed")
    );
    assert_eq!(lines.count(), 2);

    let one = qlearn(&["sweep-rademacher", "--seed", "1", "--d", "2", "--trials", "1"]);
    let text = String::from_utf8(one.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[5], "NA");

    // thread count does not change the bytes
    let c = qlearn(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(c.stdout, b.stdout);
}

#[test]
fn sweep_estimates_track_the_gaussian_constant() {
    let out = qlearn(&["sweep-rademacher", "--seed", "3", "--d", "2,4,8,16", "--trials", "2000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let d: f64 = f[1].parse().unwrap();
        let est: f64 = f[4].parse().unwrap();
        let oracle = (2.0 * d / std::f64::consts::PI).sqrt();
        assert!((est / oracle - 1.0).abs() < 0.10, "d {d}: {est} vs {oracle}");
    }
}

#[test]
fn config_errors_point_at_lines_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 4\n\n[sweep_rademacher]\nd = [2]\ntrials = 0\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let out = qlearn(&["--config", cfg_s, "sweep-rademacher"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("run.toml:5"), "{}", stderr(&out));

    let out = qlearn(&["--config", cfg_s, "sweep-rademacher", "--trials", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let again = qlearn(&["sweep-rademacher", "--seed", "4", "--d", "2", "--trials", "7"]);
    assert_eq!(out.stdout, again.stdout);

    std::fs::write(&cfg, "seed = 4\n[learn]\nd = 2\nstep = 1\n").unwrap();
    let out = qlearn(&["--config", cfg_s, "learn"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("run.toml:4"), "{}", stderr(&out));

    std::fs::write(&cfg, "seed = [\n").unwrap();
    let out = qlearn(&["--config", cfg_s, "quote"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn seed_is_mandatory_for_random_commands() {
    let out = qlearn(&["sweep-rademacher", "--d", "2"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("seed"));
    let out = qlearn(&["bogus-command"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn quote_demands_a_constant() {
    let base = ["quote", "--value", "2", "--epsilon", "0.1", "--delta", "0.05"];
    let out = qlearn(&[&base[..], &["--formula", "fat"]].concat());
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("constant"));

    let fat = json(&qlearn(&[&base[..], &["--formula", "fat", "--constant", "1"]].concat()));
    let vc = json(&qlearn(&[&base[..], &["--formula", "vc", "--constant", "1"]].concat()));
    let want = 100.0 * 2.0 * 10f64.ln();
    assert!((fat["bound"].as_f64().unwrap() - want).abs() < 1e-9 * want);
    assert_eq!(fat["bound"], vc["bound"]);
}

#[test]
fn qra_build_verify_and_probe() {
    let out = qlearn(&["qra", "build-2-1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let p = v["verdict"]["worst_p"].as_f64().unwrap();
    assert!((p - (std::f64::consts::PI / 8.0).cos().powi(2)).abs() < 1e-12);

    // one bit in one qubit, read out in the computational basis
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.json");
    let code = QraCode {
        n_bits: 1,
        m_qubits: 1,
        encoder: [
            ("0".to_string(), State::basis(2, 0).into_matrix()),
            ("1".to_string(), State::basis(2, 1).into_matrix()),
        ]
        .into_iter()
        .collect(),
        decoders: vec![TwoOutcomePovm::from_effect(
            &Effect::new(State::basis(2, 1).into_matrix()).unwrap(),
        )],
    };
    std::fs::write(&path, code.to_json().unwrap()).unwrap();
    let out = qlearn(&["qra", "verify", "--code", path.to_str().unwrap(), "--p", "0.99"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["worst_p"].as_f64(), Some(1.0));

    std::fs::write(&path, "{\"n_bits\": 1}").unwrap();
    let out = qlearn(&["qra", "verify", "--code", path.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("malformed"));

    let out = qlearn(&["qra", "probe", "--seed", "2", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["counterexample"], false);
    assert!(v["best_p"].as_f64().unwrap() <= 0.52);
}

#[test]
fn learn_recovers_targets_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("fit.json");
    let status = Command::new(env!("CARGO_BIN_EXE_qlearn"))
        .args(["learn", "--d", "3", "--seed", "9", "--out"])
        .arg(&out_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v["recovery_error"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["n"], 18);
    let manifest_path = Path::new(&format!("{}.manifest.json", out_path.display())).to_path_buf();
    let m: Value = serde_json::from_str(&std::fs::read_to_string(manifest_path).unwrap()).unwrap();
    assert_eq!(m["command"], "learn");
    assert_eq!(m["config"]["seed"], 9);
    assert_eq!(m["config"]["settings"]["d"], 3);
    assert_eq!(m["summary"]["converged"], true);
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);

    let out = qlearn(&["learn", "--role", "state", "--d", "2", "--n", "60", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["recovery_error"].as_f64().unwrap() <= 1e-6);

    let out = qlearn(&[
        "learn", "--d", "2", "--seed", "1", "--max-iters", "1", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("iteration,risk\n"));
}

#[test]
fn khintchine_and_covering_run() {
    let out = qlearn(&["khintchine", "--seed", "1", "--d", "2,3", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let ratio: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-9);
    }
    let out = qlearn(&["covering", "--seed", "1", "--d", "2", "--epsilon", "0.3", "--sample-size", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["estimate"]["lower"].as_u64() <= v["estimate"]["upper"].as_u64());
}
