use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn lohe(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lohe"));
    cmd.args(args).env_remove("LOHE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rank-0 symbol of a Kuramoto ensemble: coupling kappa, frequencies i nu_j
/// and initial data e^{i theta_j}.
fn kuramoto_file(kappa: f64, nu: &[f64], theta: &[f64]) -> Value {
    json!({
        "size": [],
        "coupling": [kappa],
        "frequencies": nu.iter().map(|v| json!([[[0.0, v]]])).collect::<Vec<_>>(),
        "initial": theta.iter().map(|t: &f64| json!([[t.cos(), t.sin()]])).collect::<Vec<_>>(),
    })
}

fn identity_file(n: usize) -> Value {
    json!({
        "size": [],
        "coupling": [0.0],
        "frequencies": vec![json!([[[0.0, 0.0]]]); n],
        "initial": vec![json!([[1.0, 0.0]]); n],
    })
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn simulate_identity_symbol_is_constant() {
    let dir = TempDir::new().unwrap();
    write_json(dir.path(), "id.json", &identity_file(3));
    let cfg = write_json(
        dir.path(),
        "config.json",
        &json!({
            "symbols": [{"file": "id.json"}],
            "integrator": {"h": 0.01, "t_end": 1.0, "sample_every": 10},
            "snapshot_every": 5,
            "assertions": [{"column": "norm_drift", "at": "max", "max": 1e-14}]
        }),
    );
    let out = dir.path().join("run");
    let r = lohe(&["simulate", "--config", s(&cfg), "--out", s(&out)], &[]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));

    let (header, rows) = read_csv(&out.join("diagnostics.csv"));
    assert_eq!(header, ["t", "D_X", "A_X", "V", "R", "norm_drift"]);
    assert_eq!(rows.len(), 11);
    for row in &rows {
        assert_eq!(&row[1..], &rows[0][1..]);
    }
    assert!(out.join("state_0000.csv").exists());
    assert!(out.join("state_0010.csv").exists());
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("result: PASS"));
    assert!(report.contains("diagnostics.csv"));
}

#[test]
fn failed_assertion_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_json(
        dir.path(),
        "config.json",
        &json!({
            "model": {"kind": "kuramoto", "freqs": [0.1, -0.2, 0.3], "coupling": 0.0},
            "integrator": {"h": 0.01, "t_end": 0.5},
            "assertions": [{"column": "D_X", "max": 0.0}]
        }),
    );
    let r = lohe(&["simulate", "--config", s(&cfg), "--out", s(&dir.path().join("o"))], &[]);
    assert_eq!(code(&r), 1);
}

#[test]
fn fuse_two_kuramoto_files() {
    let dir = TempDir::new().unwrap();
    let a = write_json(dir.path(), "a.json", &kuramoto_file(0.5, &[1.0, -2.0], &[0.3, 1.1]));
    let b = write_json(dir.path(), "b.json", &kuramoto_file(0.25, &[0.5, 0.75], &[-0.4, 2.0]));
    let out = dir.path().join("ab.json");
    let r = lohe(&["fuse", s(&a), s(&b), "--out", s(&out)], &[]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = read_json(&out);
    assert_eq!(v["size"], json!([]));
    assert_eq!(v["coupling"], json!([0.75]));
    assert_eq!(v["frequencies"], json!([[[[0.0, 1.5]]], [[[0.0, -1.25]]]]));
    for (j, th) in [(-0.1f64), 3.1].iter().enumerate() {
        let z = &v["initial"][j][0];
        assert!((z[0].as_f64().unwrap() - th.cos()).abs() < 1e-15);
        assert!((z[1].as_f64().unwrap() - th.sin()).abs() < 1e-15);
    }
}

/// A symbol whose entries are multiples of 1/8, so every fusion is exact in
/// floating point: skew-Hermitian frequencies and rotated basis tensors.
fn dyadic_file(dims: &[usize], count: usize, coupling: Value, salt: i64) -> Value {
    let d: usize = dims.iter().product();
    let q = |k: i64| (k.rem_euclid(17) - 8) as f64 / 8.0;
    let freqs: Vec<Value> = (0..count)
        .map(|j| {
            let rows: Vec<Value> = (0..d)
                .map(|r| {
                    let row: Vec<Value> = (0..d)
                        .map(|c| {
                            let k = salt * 31 + (j * 7 + r * 5 + c * 3) as i64;
                            let (re, im) = (q(k), q(k * 3 + 1));
                            if r == c {
                                json!([0.0, im])
                            } else if r < c {
                                json!([re, im])
                            } else {
                                let k = salt * 31 + (j * 7 + c * 5 + r * 3) as i64;
                                json!([-q(k), q(k * 3 + 1)])
                            }
                        })
                        .collect();
                    json!(row)
                })
                .collect();
            json!(rows)
        })
        .collect();
    let phases = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    let initial: Vec<Value> = (0..count)
        .map(|j| {
            let hot = (j + salt as usize) % d;
            let z = phases[(j + 2 * salt as usize) % 4];
            json!((0..d).map(|k| if k == hot { json!(z) } else { json!([0.0, 0.0]) }).collect::<Vec<_>>())
        })
        .collect();
    json!({"size": dims, "coupling": coupling, "frequencies": freqs, "initial": initial})
}

#[test]
fn identity_is_neutral_and_folds_agree() {
    let dir = TempDir::new().unwrap();
    let id = write_json(dir.path(), "id.json", &identity_file(3));
    let files = [
        write_json(dir.path(), "c0.json", &dyadic_file(&[2], 3, json!([0.0, 1.0]), 1)),
        write_json(dir.path(), "c1.json", &dyadic_file(&[], 3, json!([0.5]), 2)),
        write_json(dir.path(), "c2.json", &dyadic_file(&[2, 2], 3, json!([0.0, 0.25, -0.5, 1.0]), 3)),
    ];

    for (k, f) in files.iter().enumerate() {
        let right = dir.path().join(format!("ci{k}.json"));
        let left = dir.path().join(format!("ic{k}.json"));
        assert_eq!(code(&lohe(&["fuse", s(f), s(&id), "--out", s(&right)], &[])), 0);
        assert_eq!(code(&lohe(&["fuse", s(&id), s(f), "--out", s(&left)], &[])), 0);
        assert_eq!(read_json(&right), read_json(f));
        assert_eq!(read_json(&left), read_json(f));
    }

    // ((C0 C1) C2) against (C0 (C1 C2)).
    let all = dir.path().join("all.json");
    assert_eq!(code(&lohe(&["fuse", s(&files[0]), s(&files[1]), s(&files[2]), "--out", s(&all)], &[])), 0);
    let c12 = dir.path().join("c12.json");
    assert_eq!(code(&lohe(&["fuse", s(&files[1]), s(&files[2]), "--out", s(&c12)], &[])), 0);
    let right = dir.path().join("right.json");
    assert_eq!(code(&lohe(&["fuse", s(&files[0]), s(&c12), "--out", s(&right)], &[])), 0);
    assert_eq!(fs::read(&all).unwrap(), fs::read(&right).unwrap());
}

#[test]
fn generated_symbols_fuse_with_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_json(
        dir.path(),
        "g.json",
        &json!({"seed": 4, "symbols": [
            {"generate": {"size": [2], "count": 3, "coupling": [0.0, 1.0], "frequency_scale": 0.5}},
            {"generate": {"size": [3], "count": 3, "coupling": [0.0, 1.0], "real": true}}
        ]}),
    );
    let r = lohe(&["fuse", "--config", s(&cfg)], &[]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["size"], json!([2, 3]));
    assert_eq!(v["coupling"], json!([0.0, 0.0, 0.0, 2.0]));
    assert_eq!(v["initial"].as_array().unwrap().len(), 3);
}

#[test]
fn symbol_file_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let a = write_json(dir.path(), "a.json", &kuramoto_file(0.1, &[0.1, 1.0 / 3.0], &[0.7, 2.0f64.sqrt()]));
    let id = write_json(dir.path(), "id.json", &identity_file(2));
    let once = dir.path().join("once.json");
    let twice = dir.path().join("twice.json");
    assert_eq!(code(&lohe(&["fuse", s(&a), s(&id), "--out", s(&once)], &[])), 0);
    assert_eq!(code(&lohe(&["fuse", s(&once), s(&id), "--out", s(&twice)], &[])), 0);
    assert_eq!(fs::read(&once).unwrap(), fs::read(&twice).unwrap());
    assert_eq!(read_json(&once), read_json(&a));
}

#[test]
fn check_monoid_suite_passes() {
    let dir = TempDir::new().unwrap();
    let r = lohe(&["check", "--suite", "monoid", "--seed", "3", "--out", s(dir.path())], &[]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stdout));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("PASS monoid-laws"));
    assert!(report.contains("PASS commutativity"));
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"symbols\": [\n    {\"file\": \"x.json\",}\n  ]\n}").unwrap();
    let r = lohe(&["simulate", "--config", s(&bad)], &[]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 3"));

    let unknown = write_json(dir.path(), "u.json", &json!({"model": {"kind": "kuramoto", "freqs": [0.0], "coupling": 1.0, "extra": 1}}));
    assert_eq!(code(&lohe(&["simulate", "--config", s(&unknown)], &[])), 2);

    let neg = write_json(
        dir.path(),
        "n.json",
        &json!({"symbols": [{"inline": identity_file(2)}], "integrator": {"h": -1.0}}),
    );
    assert_eq!(code(&lohe(&["simulate", "--config", s(&neg)], &[])), 2);

    let mut not_skew = identity_file(2);
    not_skew["frequencies"][0] = json!([[[1.0, 0.0]]]);
    let ns = write_json(dir.path(), "ns.json", &json!({"symbols": [{"inline": not_skew}]}));
    assert_eq!(code(&lohe(&["simulate", "--config", s(&ns), "--out", s(&dir.path().join("o"))], &[])), 2);

    let mut long = identity_file(2);
    long["initial"][0] = json!([[2.0, 0.0]]);
    let ln = write_json(dir.path(), "l.json", &json!({"symbols": [{"inline": long}]}));
    let r = lohe(&["simulate", "--config", s(&ln), "--renormalize", "--out", s(&dir.path().join("o"))], &[]);
    assert_eq!(code(&r), 2);

    assert_eq!(code(&lohe(&["check", "--suite", "no-such-suite"], &[])), 2);
    assert_eq!(code(&lohe(&["check", "--suite", "monoid"], &[("LOHE_THREADS", "zero")])), 2);
}

#[test]
fn divergence_exits_one_with_step() {
    let dir = TempDir::new().unwrap();
    let mut sym = identity_file(2);
    sym["frequencies"] = json!([[[[0.0, 1.0]]], [[[0.0, -1.0]]]]);
    sym["coupling"] = json!([1e300]);
    sym["initial"] = json!([[[1.0, 0.0]], [[0.0, 1.0]]]);
    let cfg = write_json(
        dir.path(),
        "c.json",
        &json!({"symbols": [{"inline": sym}], "integrator": {"h": 0.1, "t_end": 10.0}}),
    );
    let r = lohe(&["simulate", "--config", s(&cfg), "--out", s(&dir.path().join("o"))], &[]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("step"));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write_json(
        dir.path(),
        "c.json",
        &json!({
            "seed": 5,
            "symbols": [
                {"generate": {"size": [4, 4], "count": 64, "coupling": [0.0, 0.5, 0.5, 1.0], "frequency_scale": 1.0}},
                {"generate": {"size": [3], "count": 64, "coupling": [0.0, 1.0], "frequency_scale": 1.0, "real": true}}
            ],
            "integrator": {"h": 0.01, "t_end": 0.1, "sample_every": 2},
            "snapshot_every": 5
        }),
    );
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let r = lohe(&["simulate", "--config", s(&cfg), "--out", s(&out)], &[("LOHE_THREADS", threads)]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        outputs.push([
            fs::read(out.join("diagnostics.csv")).unwrap(),
            fs::read(out.join("state_0005.csv")).unwrap(),
        ]);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn named_models_simulate() {
    let dir = TempDir::new().unwrap();
    let models = [
        json!({"kind": "kuramoto", "freqs": [0.1, -0.1, 0.05], "coupling": 2.0}),
        json!({"kind": "sphere_so", "omegas": vec![json!([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]); 3],
               "amats": vec![json!([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]); 3], "coupling": 1.0}),
        json!({"kind": "lohe_matrix", "hamiltonians": vec![json!([[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]); 3], "coupling": 1.0}),
    ];
    let expected = [
        vec!["t", "D_X", "A_X", "V", "R", "norm_drift"],
        vec!["t", "D_X", "A_X", "D_U", "S_U", "A_U", "V", "R", "norm_drift"],
        vec!["t", "D_U", "S_U", "A_U", "V", "R", "norm_drift"],
    ];
    for (k, (m, want)) in models.iter().zip(&expected).enumerate() {
        let cfg = write_json(
            dir.path(),
            &format!("m{k}.json"),
            &json!({"seed": 2, "model": m, "integrator": {"h": 0.01, "t_end": 0.5}}),
        );
        let out = dir.path().join(format!("m{k}"));
        let r = lohe(&["run", "--config", s(&cfg), "--out", s(&out)], &[]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        let (header, rows) = read_csv(&out.join("diagnostics.csv"));
        assert_eq!(&header, want);
        assert!(rows.last().unwrap().iter().all(|x| x.is_finite()));
    }
}
