//! End-to-end checks of the command-line interface through `cli::run`.

use std::path::Path;

use ordcert::cli::run;
use ordcert::simlab::{gen_graph_gof, sample_sem, ErrorDist, SemSpec};

fn write_sem_csv(path: &Path, seed: u64, p: usize, n: usize) {
    let dag = gen_graph_gof(p, seed);
    let spec = SemSpec::homogeneous(dag, ErrorDist::Gamma, n, false);
    let d = sample_sem(&spec, seed).unwrap();
    d.write_csv(path).unwrap();
}

fn run_args(args: &[&str]) -> i32 {
    run(args.iter().map(|s| s.to_string()))
}

#[test]
fn gof_emits_pvalue_json() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let out = dir.path().join("gof.json");
    write_sem_csv(&data, 3, 4, 300);
    let code = run_args(&[
        "ordcert",
        "gof",
        "--data",
        data.to_str().unwrap(),
        "--target",
        "4",
        "--given",
        "1,2,3",
        "--seed",
        "9",
        "--reps",
        "99",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let p = parsed["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
    assert!(parsed["t_obs"].as_f64().is_some());
    assert_eq!(parsed["config"]["seed"].as_u64(), Some(9));
    assert_eq!(parsed["config"]["target"].as_u64(), Some(4));
}

#[test]
fn confset_output_is_byte_identical_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write_sem_csv(&data, 5, 3, 400);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let code = run_args(&[
            "ordcert",
            "confset",
            "--data",
            data.to_str().unwrap(),
            "--alpha",
            "0.1",
            "--seed",
            "7",
            "--reps",
            "99",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let parsed: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    assert!(parsed["exhausted"].as_bool().unwrap());
    assert!(parsed["orderings"].as_array().is_some());
}

#[test]
fn confset_csv_format_has_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write_sem_csv(&data, 5, 3, 400);
    let out = dir.path().join("cs.csv");
    let code = run_args(&[
        "ordcert",
        "confset",
        "--data",
        data.to_str().unwrap(),
        "--alpha",
        "0.1",
        "--seed",
        "7",
        "--reps",
        "99",
        "--out",
        "csv",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("perm,min_gamma,Gamma\n"));
}

#[test]
fn fail_on_empty_returns_exit_code_2() {
    // deterministic quadratic relation on an asymmetric support: both
    // regression directions leave structured residuals, so every ordering
    // is rejected and the confidence set is empty
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("quad.csv");
    let x: Vec<f64> = (0..400)
        .map(|i| (-1.0 + 2.0 * (i as f64) / 399.0_f64).exp())
        .collect();
    let y: Vec<f64> = x.iter().map(|v| v * v).collect();
    ordcert::Dataset::from_columns(vec![x, y], vec!["x".into(), "y".into()])
        .unwrap()
        .write_csv(&data)
        .unwrap();
    let code = run_args(&[
        "ordcert",
        "confset",
        "--data",
        data.to_str().unwrap(),
        "--alpha",
        "0.1",
        "--seed",
        "2",
        "--reps",
        "199",
        "--fail-on-empty",
        "--output",
        dir.path().join("cs.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn ci_and_ancestors_and_frechet_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write_sem_csv(&data, 11, 3, 500);
    let ci_out = dir.path().join("ci.json");
    let code = run_args(&[
        "ordcert",
        "ci",
        "--data",
        data.to_str().unwrap(),
        "--cause",
        "1",
        "--effect",
        "3",
        "--alpha",
        "0.2",
        "--seed",
        "4",
        "--reps",
        "99",
        "--output",
        ci_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&ci_out).unwrap()).unwrap();
    assert!(parsed["intervals"].as_array().is_some());
    assert!(parsed["includes_zero"].as_bool().is_some());
    assert!(parsed["adjustment_sets_used"].as_u64().is_some());

    let anc_out = dir.path().join("anc.json");
    let code = run_args(&[
        "ordcert",
        "ancestors",
        "--data",
        data.to_str().unwrap(),
        "--alpha",
        "0.1",
        "--seed",
        "4",
        "--reps",
        "99",
        "--output",
        anc_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&anc_out).unwrap()).unwrap();
    assert!(parsed["lower"].as_array().is_some());
    assert!(parsed["upper"].as_array().is_some());

    let fr_out = dir.path().join("fr.json");
    let code = run_args(&[
        "ordcert",
        "frechet",
        "--data",
        data.to_str().unwrap(),
        "--alpha",
        "0.1",
        "--seed",
        "4",
        "--reps",
        "99",
        "--output",
        fr_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fr_out).unwrap()).unwrap();
    assert_eq!(parsed["perm"].as_array().unwrap().len(), 3);
    assert!(parsed["distance_histogram"].as_array().is_some());
}

#[test]
fn sim_writes_report_csv_with_schema_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.toml");
    std::fs::write(
        &config,
        "seed = 3\nreps = 5\nalpha = 0.1\nbootstrap_reps = 49\n\n[[cells]]\np = 4\nn = 60\ndist = \"gamma\"\n",
    )
    .unwrap();
    let out = dir.path().join("report.csv");
    let code = run_args(&[
        "ordcert",
        "sim",
        "--scenario",
        "size-power",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,cell,metric,value,std_error,replicates,seed"
    );
    assert!(text.contains("size-power,p=4,n=60,dist=gamma,size,"));
}

#[test]
fn usage_and_io_errors_exit_1() {
    assert_eq!(run_args(&["ordcert", "confset", "--bogus-flag"]), 1);
    assert_eq!(
        run_args(&[
            "ordcert",
            "gof",
            "--data",
            "/nonexistent/file.csv",
            "--target",
            "1",
            "--given",
            "2",
        ]),
        1
    );
    // --help exits 0
    assert_eq!(run_args(&["ordcert", "--help"]), 0);
}
