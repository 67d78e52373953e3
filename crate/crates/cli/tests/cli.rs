use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkcusum"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn identical_panels_retain() {
    let path = fixture("identical_static.csv");
    let out = run(&["test", path.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["reject"], false);
    assert_eq!(r["s_m"], 0.0);
    assert_eq!(r["p_value"], 1.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn a1_fixture_rejects_with_defaults() {
    let path = fixture("a1_paired.csv");
    let out = run(&["test", path.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["reject"], true);
    assert_eq!(r["diagnostics"]["N_x"], 100);
    assert_eq!(r["diagnostics"]["n"], 20);
    assert_eq!(r["diagnostics"]["M"], 25);
    assert_eq!(r["boot_stats"].as_array().unwrap().len(), 200);

    let paired = run(&["test", path.to_str().unwrap(), "--seed", "3", "--paired"]);
    assert_eq!(paired.status.code(), Some(1));
    assert_eq!(report(&paired)["diagnostics"]["pairing"], "paired");
}

#[test]
fn missing_cell_is_a_usage_error() {
    let path = fixture("missing_cell.csv");
    let out = run(&["test", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("subject p3") && err.contains("t=4"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_exit_2() {
    let path = fixture("identical_static.csv");
    let p = path.to_str().unwrap();
    for args in [
        vec!["test", p, "--alpha", "1.5"],
        vec!["test", p, "--bootstrap", "0"],
        vec!["test", p, "--grid", "0"],
        vec!["test", p, "--format", "tall"],
        vec!["test", p, "--format", "wide"],
        vec!["test", "/nonexistent/file.csv"],
        vec!["simulate", "--model", "cauchy"],
        vec!["simulate", "--alt", "A7"],
        vec!["simulate", "--N", "1", "--reps", "1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn missing_seed_is_recorded() {
    let path = fixture("identical_static.csv");
    let out = run(&["test", path.to_str().unwrap(), "--bootstrap", "5"]);
    assert!(report(&out)["diagnostics"]["seed"].is_u64());
}

#[test]
fn out_file_and_boot_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let boot = dir.path().join("boot.csv");
    let path = fixture("a1_paired.csv");
    let out = run(&[
        "test",
        path.to_str().unwrap(),
        "--seed",
        "4",
        "--bootstrap",
        "30",
        "--out",
        json.to_str().unwrap(),
        "--boot-csv",
        boot.to_str().unwrap(),
    ]);
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let boot = std::fs::read_to_string(&boot).unwrap();
    let lines: Vec<&str> = boot.lines().collect();
    assert_eq!(lines[0], "boot_stat");
    assert_eq!(lines.len(), 31);
    assert_eq!(lines[1].parse::<f64>().unwrap(), r["boot_stats"][0].as_f64().unwrap());
}

#[test]
fn wide_format_input() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    let mut xs = String::from("subject,t1,t2,t3\n");
    let mut ys = String::from("subject,t1,t2,t3\n");
    for i in 0..6 {
        xs.push_str(&format!("a{i},{},{},{}\n", i, (i + 2) % 6, (i + 4) % 6));
        ys.push_str(&format!("b{i},{},{},{}\n", i, (i + 1) % 6, (i + 5) % 6));
    }
    std::fs::write(&x, xs).unwrap();
    std::fs::write(&y, ys).unwrap();
    let out = run(&[
        "test",
        x.to_str().unwrap(),
        "--format",
        "wide",
        "--y-input",
        y.to_str().unwrap(),
        "--seed",
        "1",
        "--bootstrap",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["diagnostics"]["N_y"], 6);
    assert_eq!(r["s_m"], 0.0);
}

#[test]
fn critvals_table() {
    let out = run(&["critvals", "--levels", "0.95"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 1.3581).abs() < 1e-3);

    let out = run(&["critvals", "--levels", "0.90,0.95,0.99"]);
    let z: Vec<f64> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(z.len(), 3);
    assert!(z.windows(2).all(|w| w[0] < w[1]));

    assert_eq!(run(&["critvals", "--levels", "1.0"]).status.code(), Some(2));
    assert_eq!(run(&["critvals", "--levels", "0"]).status.code(), Some(2));
}

fn hplot_rows(out: &Output) -> Vec<(usize, f64, f64)> {
    let text = stdout(out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,h_hat"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn hplot_identity_on_identical_panels() {
    let path = fixture("identical_static.csv");
    let out = run(&["hplot", path.to_str().unwrap(), "--grid", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let values = [-1.5, -0.75, -0.2, 0.0, 0.4, 0.9, 1.3, 2.1];
    let rows = hplot_rows(&out);
    assert_eq!(rows.len(), 6 * 3);
    let mut on_sample = 0;
    for (_, x, h) in rows {
        let below = values
            .iter()
            .copied()
            .filter(|v| *v <= x)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(h, below);
        if values.contains(&x) {
            assert_eq!(h, x);
            on_sample += 1;
        }
    }
    assert!(on_sample > 0);
}

#[test]
fn hplot_recovers_a1_shift() {
    let path = fixture("a1_paired.csv");
    let out = run(&["hplot", path.to_str().unwrap(), "--paired"]);
    let rows = hplot_rows(&out);
    assert_eq!(rows.len(), 20 * 25);
    let (mut worst, mut total) = (0.0f64, 0.0);
    let count = rows.len() as f64;
    for (t, x, h) in rows {
        let t = t as f64;
        let err = h - x - 2.0 * t * t / (1.0 + t * t);
        // ĥ = h_t(largest Y ≤ x): the error is minus a spacing of 100 normals
        assert!(err <= 1e-12);
        worst = worst.max(-err);
        total -= err;
    }
    // mean normal spacing over the 5%..95% band is about 0.03
    assert!(total / count < 0.1, "{}", total / count);
    assert!(worst < 0.6, "{worst}");
    assert_eq!(
        run(&["hplot", path.to_str().unwrap(), "--grid", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_grid_of_scenarios() {
    let out = run(&[
        "simulate",
        "--alt",
        "A1,A2",
        "--n",
        "20,100,200",
        "--N",
        "50,100",
        "--reps",
        "1",
        "--bootstrap",
        "2",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("model,alternative,N,n,B,alpha,replications,power,stderr,seed")
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 12);
    for row in &rows {
        let power: f64 = row[7].parse().unwrap();
        assert!(power == 0.0 || power == 1.0, "{row:?}");
        assert_eq!(row[9], "9");
    }
    assert_eq!(rows[0][..4], ["iid_gaussian", "A1", "50", "20"]);
    assert_eq!(rows[11][..4], ["iid_gaussian", "A2", "100", "200"]);
}

#[test]
fn simulate_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("power.csv");
    let out = run(&[
        "simulate",
        "--model",
        "ar1,paired_gaussian",
        "--alt",
        "A4",
        "--reps",
        "2",
        "--bootstrap",
        "5",
        "--rho",
        "0.1",
        "--squared-smooth",
        "--seed",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("\nar1,A4,50,20,5,0.05,2,"));
}
