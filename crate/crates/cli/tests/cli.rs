use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use srvf::counterexample::{CounterexampleConfig, Rational};
use srvf::io::{parse_matrix_csv, read_curve, read_srvf, write_curve};
use srvf::{build_pq, counterexample_report, srvt, DpOptions, Partition, SampledCurve};
use tempfile::TempDir;

fn srvf_cmd(dir: &Path) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_srvf"));
    cmd.current_dir(dir).env_remove("SRVF_CONFIG");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    srvf_cmd(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn line(dir: &[f64], n: usize) -> SampledCurve {
    SampledCurve::from_fn(dir.len(), Partition::uniform(n), |t| {
        dir.iter().map(|d| d * t).collect()
    })
    .unwrap()
}

fn wavy(n: usize) -> SampledCurve {
    SampledCurve::from_fn(2, Partition::uniform(n), |t| {
        vec![t + 0.2 * (3.0 * t).sin(), 0.5 * (2.0 * t).cos() - 0.5]
    })
    .unwrap()
}

fn put(dir: &Path, name: &str, c: &SampledCurve) -> String {
    write_curve(&dir.join(name), c).unwrap();
    name.to_owned()
}

fn read_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn malformed_fixtures_exit_with_input_error_naming_the_row() {
    let expected = [
        ("non_monotone_t.csv", ":4:"),
        ("nan_value.csv", ":3:"),
        ("short_row.csv", ":3:"),
        ("long_row.csv", ":3:"),
        ("t_not_starting_at_zero.csv", ":2:"),
        ("t_not_ending_at_one.csv", ":4:"),
        ("non_numeric.csv", ":3:"),
        ("infinite_value.csv", ":4:"),
        ("wrong_sample_length.json", "sample 1"),
        ("syntax_error.json", ":3:"),
    ];
    let tmp = TempDir::new().unwrap();
    let dir = fixtures().join("malformed");
    assert_eq!(fs::read_dir(&dir).unwrap().count(), expected.len());
    for (name, marker) in expected {
        let path = dir.join(name);
        let o = run(tmp.path(), &["transform", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        let err = stderr(&o);
        assert!(err.contains(name) && err.contains(marker), "{name}: {err}");
    }
    assert!(
        fs::read_dir(tmp.path()).unwrap().next().is_none(),
        "nothing written on failure"
    );
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    put(d, "a.csv", &line(&[1.0, 0.0], 4));
    put(d, "b.csv", &line(&[0.0, 1.0], 4));
    put(d, "c3.csv", &line(&[1.0, 0.0, 0.0], 4));
    assert_eq!(
        run(d, &["distance", "a.csv", "b.csv"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(d, &["distance", "a.csv", "missing.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(d, &["distance", "a.csv", "c3.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(d, &["--grid-n", "1", "distance", "a.csv", "b.csv"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(d, &["--dp-w", "0", "distance", "a.csv", "b.csv"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(d, &["--tol", "0", "distance", "a.csv", "b.csv"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(d, &["geodesic", "a.csv", "b.csv", "--steps", "0"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(d, &["probe", "a.csv", "b.csv"]).status.code(), Some(3));
}

#[test]
fn help_documents_defaults() {
    let tmp = TempDir::new().unwrap();
    let help = ok(tmp.path(), &["--help"]);
    for flag in [
        "--grid-n",
        "--dp-w",
        "--axis-moves",
        "--tol",
        "--output-dir",
        "--format",
        "--config",
    ] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
    for default in ["1024", "[default: 4]", "1e-6", "SRVF_CONFIG"] {
        assert!(help.contains(default), "{default} missing from help");
    }
    let ce = ok(tmp.path(), &["counterexample", "--help"]);
    for flag in [
        "--level",
        "--epsilon",
        "--grid",
        "--kprime-list",
        "--n-list",
    ] {
        assert!(ce.contains(flag), "{flag} missing from counterexample help");
    }
}

#[test]
fn param_distance_of_orthogonal_lines() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    put(d, "e1.csv", &line(&[1.0, 0.0], 3));
    put(d, "e2.json", &line(&[0.0, 1.0], 5));
    assert_eq!(
        ok(d, &["distance", "e1.csv", "e2.json"]).trim(),
        "1.414213562373"
    );
}

#[test]
fn quotient_distance_of_identical_files_is_zero_and_alignment_parses() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    put(d, "w.csv", &wavy(12));
    let out = ok(
        d,
        &[
            "--grid-n", "24", "distance", "w.csv", "w.csv", "--mode", "quotient",
        ],
    );
    assert!(out.trim().parse::<f64>().unwrap().abs() <= 1e-6);
    let text = fs::read_to_string(d.join("alignment.csv")).unwrap();
    assert!(text.starts_with("t,beta,gamma\n"));
    let (beta, gamma) = srvf::io::parse_alignment_csv(&text, &d.join("alignment.csv")).unwrap();
    assert_eq!(beta.values()[0], 0.0);
    assert_eq!(*gamma.values().last().unwrap(), 1.0);

    ok(
        d,
        &[
            "--format", "json", "--grid-n", "8", "distance", "w.csv", "w.csv", "--mode", "quotient",
        ],
    );
    let json = fs::read_to_string(d.join("alignment.json")).unwrap();
    srvf::io::parse_alignment_json(&json, Path::new("alignment.json")).unwrap();
}

#[test]
fn transform_roundtrip() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let c = wavy(40);
    put(d, "w.csv", &c);
    ok(d, &["transform", "w.csv"]);
    let q = read_srvf(&d.join("w_srvf.csv")).unwrap();
    let expected = srvt(&c);
    for (a, b) in q.values().iter().zip(expected.values()) {
        assert!((a - b).abs() <= 1e-12);
    }
    ok(
        d,
        &[
            "transform",
            "w_srvf.csv",
            "--direction",
            "inverse",
            "-o",
            "back.json",
        ],
    );
    let back = read_curve(&d.join("back.json")).unwrap();
    assert!(back.max_abs_diff(&c).unwrap() <= 1e-10);
}

#[test]
fn line_gives_constant_srvf() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::write(d.join("l.csv"), "t,x1,x2\n0,0,0\n0.25,0.75,1\n1,3,4\n").unwrap();
    ok(d, &["transform", "l.csv", "-o", "q.csv"]);
    let q = read_srvf(&d.join("q.csv")).unwrap();
    // |c'| = 5, so q = (3, 4)/√5 on both cells
    for cell in q.cell_values() {
        assert!((cell[0] - 3.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((cell[1] - 4.0 / 5f64.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn geodesic_files_and_distances() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let (b, c) = (wavy(16), line(&[0.3, -1.0], 7));
    put(d, "b.csv", &b);
    put(d, "c.csv", &c);

    let out = ok(
        d,
        &[
            "geodesic",
            "b.csv",
            "c.csv",
            "--steps",
            "1",
            "--output-dir",
            "one",
        ],
    );
    assert!(out.contains("midpoint"));
    let g0 = read_curve(&d.join("one/geodesic_000.csv")).unwrap();
    let g1 = read_curve(&d.join("one/geodesic_001.csv")).unwrap();
    assert!(g0.max_abs_diff(&b).unwrap() <= 1e-10);
    assert!(g1.max_abs_diff(&c).unwrap() <= 1e-10);

    let out = ok(
        d,
        &[
            "geodesic",
            "b.csv",
            "c.csv",
            "--steps",
            "8",
            "--output-dir",
            "eight",
        ],
    );
    let diff: f64 = out.rsplit("= ").next().unwrap().trim().parse().unwrap();
    assert!(diff <= 1e-10, "{out}");
    let table = fs::read_to_string(d.join("eight/geodesic_distances.csv")).unwrap();
    let rows: Vec<Vec<f64>> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    let total = rows[8][1];
    for r in &rows {
        assert!((r[1] - r[0] * total).abs() <= 1e-10);
        assert!((r[2] - (1.0 - r[0]) * total).abs() <= 1e-10);
    }
    assert_eq!(fs::read_dir(d.join("eight")).unwrap().count(), 10);
}

#[test]
fn counterexample_rejects_large_epsilon() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["counterexample", "--epsilon", "0.2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("ε < 1/6"), "{}", stderr(&o));
    let o = run(tmp.path(), &["counterexample", "--epsilon", "1/6"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn counterexample_outputs() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let args = [
        "counterexample",
        "--level",
        "5",
        "--grid",
        "128",
        "--n-list",
        "16,64",
        "--kprime-list",
        "1,2,3",
    ];
    ok(d, &args);
    let csv = fs::read_to_string(d.join("counterexample.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("N,k_prime,dp_value,explicit_value,gap_to_half,qdist_sq")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1 + 2 * 3);
    // dist² starts at (3/2)(1 + 2⁻⁵)
    assert!((rows[0][5] - 1.5 * (1.0 + 1.0 / 32.0)).abs() <= 1e-12);
    assert!(rows.iter().all(|r| r[4] > 0.0));
    let gap = fs::read_to_string(d.join("counterexample_gap.csv")).unwrap();
    assert!(gap.starts_with("series,resolution,value,gap_to_half"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("counterexample.json")).unwrap()).unwrap();
    assert_eq!(json["measure_b"], "33/64");
}

#[test]
fn default_counterexample_run_has_positive_gaps() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["counterexample"]);
    let csv = fs::read_to_string(tmp.path().join("counterexample.csv")).unwrap();
    let gaps: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 1 + 5 * 8);
    assert!(gaps.iter().all(|&g| g > 0.0));
}

#[test]
fn distance_on_counterexample_curves_matches_report() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let cfg = CounterexampleConfig {
        cantor_level: 4,
        epsilon: Rational::new(1, 10),
        grid_n: 64,
        fatten_delta: None,
    };
    let (b, c) = build_pq(&cfg).unwrap().curves();
    put(d, "b.json", &b);
    put(d, "c.json", &c);
    let report = counterexample_report(&cfg, &[16, 32], &[1], &DpOptions::default()).unwrap();
    for row in &report.dp {
        let n = row.n.to_string();
        let out = ok(
            d,
            &[
                "--grid-n", &n, "distance", "b.json", "c.json", "--mode", "quotient",
            ],
        );
        let got: f64 = out.trim().parse().unwrap();
        assert!(
            (got - row.qdist_sq.sqrt()).abs() <= 1e-10,
            "N={n}: {got} vs {}",
            row.qdist_sq.sqrt()
        );
    }
    let param: f64 = ok(d, &["distance", "b.json", "c.json"])
        .trim()
        .parse()
        .unwrap();
    assert!((param - report.dist_param_sq.sqrt()).abs() <= 1e-10);
}

#[test]
fn matrix_examples() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::write(d.join("empty.json"), "[]").unwrap();
    ok(d, &["matrix", "empty.json"]);
    assert_eq!(fs::read_to_string(d.join("matrix.csv")).unwrap(), "id\n");

    put(d, "x.csv", &line(&[1.0, 0.0, 0.0], 4));
    let corpus = r#"[
        {"id": "x", "file": "x.csv"},
        {"id": "y", "samples": [[0, 0, 0], [0, 1, 0]]},
        {"id": "z", "samples": [[0, 0, 0], [0, 0, 0.5], [0, 0, 1]], "knots": [0, 0.3, 1]},
        {"id": "x again", "file": "x.csv"}
    ]"#;
    fs::write(d.join("corpus.json"), corpus).unwrap();
    let o = run(
        d,
        &["--grid-n", "16", "matrix", "corpus.json", "-o", "m.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("loaded 4 shapes"));
    let (ids, v) = parse_matrix_csv(
        &fs::read_to_string(d.join("m.csv")).unwrap(),
        Path::new("m.csv"),
    )
    .unwrap();
    assert_eq!(ids, ["x", "y", "z", "x again"]);
    let at = |i: usize, j: usize| v[i * 4 + j];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!(
            (at(i, j) - 2f64.sqrt()).abs() <= 1e-6,
            "{i},{j}: {}",
            at(i, j)
        );
    }
    assert!(at(0, 3).abs() <= 1e-6);
}

#[test]
fn matrix_bad_shapes_abort_unless_skipped() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let corpus = r#"[
        {"id": "good", "samples": [[0, 0], [1, 0]]},
        {"id": "bad", "samples": [[0, 0], [1]]},
        {"id": "zero", "samples": [[0, 0], [0, 0]]}
    ]"#;
    fs::write(d.join("corpus.json"), corpus).unwrap();
    let o = run(d, &["matrix", "corpus.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("\"bad\""));
    assert!(!d.join("matrix.csv").exists());

    let o = run(d, &["matrix", "corpus.json", "--skip-bad"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("zero curve"));
    let (ids, _) = parse_matrix_csv(
        &fs::read_to_string(d.join("matrix.csv")).unwrap(),
        Path::new("matrix.csv"),
    )
    .unwrap();
    assert_eq!(ids, ["good", "zero"]);
}

#[test]
fn config_file_layering() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    put(d, "w.csv", &wavy(10));
    fs::write(
        d.join("cfg.toml"),
        "format = \"json\"\noutput_dir = \"from_file\"\n",
    )
    .unwrap();

    // the file applies through the environment variable
    let o = srvf_cmd(d)
        .env("SRVF_CONFIG", "cfg.toml")
        .args(["transform", "w.csv"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.join("from_file/w_srvf.json").exists());

    // flags beat the file
    ok(
        d,
        &[
            "--config",
            "cfg.toml",
            "--output-dir",
            "from_flag",
            "transform",
            "w.csv",
        ],
    );
    assert!(d.join("from_flag/w_srvf.json").exists());

    fs::write(d.join("bad.toml"), "grid_n = 1\n").unwrap();
    let o = run(d, &["--config", "bad.toml", "transform", "w.csv"]);
    assert_eq!(o.status.code(), Some(3));
    fs::write(d.join("typo.toml"), "gridn = 64\n").unwrap();
    let o = run(d, &["--config", "typo.toml", "transform", "w.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn canonical_and_probe() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::write(d.join("l.csv"), "t,x1\n0,0\n0.1,0.9\n1,1\n").unwrap();
    let out = ok(d, &["canonical", "l.csv"]);
    assert!(out.contains("1.000000000000"));
    let c = read_curve(&d.join("l_canonical.csv")).unwrap();
    let speeds: Vec<f64> = (0..c.n_cells())
        .map(|k| {
            let (a, b) = c.knots().cell(k);
            c.increment(k)[0].abs() / (b - a)
        })
        .collect();
    assert!(speeds.iter().all(|s| (s - 1.0).abs() < 1e-12), "{speeds:?}");

    let out = ok(d, &["probe", "--eps-list", "0.1,0.025,0.00625"]);
    let ratios: Vec<f64> = out
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 2);
    assert!(ratios.iter().all(|r| (r - 2.0).abs() <= 1e-9), "{ratios:?}");
}

#[test]
fn outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    put(d, "b.csv", &wavy(20));
    put(d, "c.csv", &line(&[1.0, 1.0], 9));
    fs::write(
        d.join("corpus.json"),
        r#"[{"id": "b", "file": "b.csv"}, {"id": "c", "file": "c.csv"},
            {"id": "s", "samples": [[0, 0], [0.5, 0.1], [1, -0.2]]}]"#,
    )
    .unwrap();
    let runs: Vec<Vec<(String, Vec<u8>)>> = ["r1", "r2"]
        .iter()
        .map(|out| {
            let common = ["--output-dir", out, "--grid-n", "32"];
            let with = |args: &[&str]| {
                let mut all = common.to_vec();
                all.extend_from_slice(args);
                ok(d, &all)
            };
            let mut printed = with(&["distance", "b.csv", "c.csv", "--mode", "quotient"]);
            printed += &with(&["geodesic", "b.csv", "c.csv", "--steps", "3"]);
            printed += &with(&["transform", "b.csv"]);
            printed += &with(&["canonical", "b.csv"]);
            printed += &with(&["matrix", "corpus.json", "-o", &format!("{out}/m.csv")]);
            printed += &with(&[
                "counterexample",
                "--level",
                "3",
                "--grid",
                "32",
                "--n-list",
                "8,16",
                "--kprime-list",
                "1,2",
            ]);
            let mut files = read_bytes(&d.join(out));
            files.push(("stdout".into(), printed.replace(out, "OUT").into_bytes()));
            files
        })
        .collect();
    assert_eq!(runs[0].len(), runs[1].len());
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        assert_eq!(a.0, b.0);
        assert!(a.1 == b.1, "{} differs between runs", a.0);
    }
}
