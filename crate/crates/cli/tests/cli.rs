use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinex(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinex"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, name: &str, file: &str) {
    let o = spinex(dir, &["--seed", "3", "generate", "--name", name, "--out", file]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generate_writes_csv_and_reports_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(dir.path(), &["--seed", "1", "generate", "--name", "Moons", "--out", "m.csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n=200 d=2 k=2"), "{}", stdout(&o));
    let text = fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "f0,f1,label");
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Blobs", "a.csv");
    generate(dir.path(), "Blobs", "b.csv");
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unknown_dataset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(dir.path(), &["generate", "--name", "Not A Dataset"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flag_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(dir.path(), &["cluster", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cluster_writes_labels_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Disjoint Clusters", "d.csv");
    let o = spinex(
        dir.path(),
        &["cluster", "--input", "d.csv", "--label-column", "label", "--tier", "3", "--n-clusters", "3", "--out", "l.csv"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("clusters: 3"), "{out}");
    for m in ["silhouette", "calinski_harabasz", "davies_bouldin", "homogeneity", "completeness", "v_measure"] {
        assert!(out.contains(&format!("{m}: ")), "missing {m} in {out}");
    }
    let labels = fs::read_to_string(dir.path().join("l.csv")).unwrap();
    let mut lines = labels.lines();
    assert_eq!(lines.next(), Some("row_index,label"));
    let rows: Vec<_> = lines.collect();
    let n = fs::read_to_string(dir.path().join("d.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows.len(), n);
    assert!(rows[0].starts_with("0,"));
}

#[test]
fn cluster_log_flag_prints_decisions() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Moons", "m.csv");
    let o = spinex(dir.path(), &["cluster", "--input", "m.csv", "--label-column", "label", "--methods", "cosine", "--log"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("method: cosine"), "{out}");
    assert!(out.contains("log: Best clustering method: cosine"), "{out}");
}

#[test]
fn cluster_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Moons", "m.csv");
    let missing = spinex(dir.path(), &["cluster", "--input", "absent.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_method = spinex(dir.path(), &["cluster", "--input", "m.csv", "--methods", "manhattan"]);
    assert_eq!(bad_method.status.code(), Some(2));
    let bad_threshold = spinex(dir.path(), &["cluster", "--input", "m.csv", "--threshold", "lots"]);
    assert_eq!(bad_threshold.status.code(), Some(2));
    let no_truth = spinex(dir.path(), &["cluster", "--input", "m.csv", "--tier", "2"]);
    assert_eq!(no_truth.status.code(), Some(2));
}

#[test]
fn cluster_with_unimplemented_approximation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Moons", "m.csv");
    let o = spinex(dir.path(), &["cluster", "--input", "m.csv", "--label-column", "label", "--approximation", "tsne"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_feeds_cluster_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Moons", "m.csv");
    fs::write(dir.path().join("ok.toml"), "[spinex]\nsimilarity_methods = [\"kernel\"]\nn_clusters = 2\n").unwrap();
    let o = spinex(dir.path(), &["--config", "ok.toml", "cluster", "--input", "m.csv", "--label-column", "label"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("method: kernel"));
    assert!(stdout(&o).contains("clusters: 2"));

    fs::write(dir.path().join("bad.toml"), "[spinex]\nthreshhold = 0.5\n").unwrap();
    let o = spinex(dir.path(), &["--config", "bad.toml", "cluster", "--input", "m.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_outputs_neighbors_and_contributions() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Blobs", "b.csv");
    let o = spinex(
        dir.path(),
        &["explain", "--input", "b.csv", "--label-column", "label", "--observation", "4", "--k", "3", "--out", "e.json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("e.json")).unwrap()).unwrap();
    assert_eq!(v["observation"], 4);
    let sims = v["similarity_analysis"]["similarities"].as_array().unwrap();
    assert_eq!(sims.len(), 100);
    assert!((sims[4].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let contrib = v["similarity_analysis"]["contributions"].as_array().unwrap();
    assert_eq!(contrib.len(), 4);
    let methods = v["neighbor_analysis"].as_array().unwrap();
    assert_eq!(methods.len(), 4);
    for m in methods {
        let nn = m["nearest_neighbors"].as_array().unwrap();
        assert_eq!(nn.len(), 3);
        assert!(nn.iter().all(|i| i.as_u64() != Some(4)));
        assert_eq!(m["neighbor_contributions"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn explain_rejects_out_of_range() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Moons", "m.csv");
    let o = spinex(dir.path(), &["explain", "--input", "m.csv", "--label-column", "label", "--observation", "200"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinex(dir.path(), &["explain", "--input", "m.csv", "--label-column", "label", "--observation", "0", "--k", "200"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn benchmark_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(
        dir.path(),
        &["--out-dir", "r", "benchmark", "--algorithms", "spinex_t,kmeans,dbscan", "--datasets", "Moons,Blobs", "--seeds", "0,1"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = dir.path().join("r");
    for f in ["runs.csv", "ranking.csv", "pareto.csv", "report.json", "timings.csv"] {
        assert!(r.join(f).exists(), "missing {f}");
    }
    let runs = fs::read_to_string(r.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 3 * 2 * 2);
    let ranking = fs::read_to_string(r.join("ranking.csv")).unwrap();
    assert_eq!(ranking.lines().count(), 1 + 3);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(r.join("report.json")).unwrap()).unwrap();
    assert!(report.is_object());
}

#[test]
fn benchmark_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["--out-dir", out, "benchmark", "--algorithms", "spinex_default,kmeans", "--datasets", "Circles", "--seeds", "5"]
    };
    assert_eq!(spinex(dir.path(), &args("a")).status.code(), Some(0));
    assert_eq!(spinex(dir.path(), &args("b")).status.code(), Some(0));
    for f in ["runs.csv", "ranking.csv", "pareto.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn benchmark_missing_config_or_dataset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(dir.path(), &["--config", "nowhere.toml", "benchmark"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinex(dir.path(), &["benchmark", "--algorithms", "kmeans", "--datasets", "Nope", "--seeds", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinex(dir.path(), &["benchmark", "--algorithms", "hdbscan", "--datasets", "Moons", "--seeds", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn benchmark_config_overrides_baseline_params() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.toml"),
        "[bench]\nalgorithms = [\"kmeans\"]\ndatasets = [\"Moons\"]\nseeds = [0]\n[[bench.baselines]]\nalgorithm = \"kmeans\"\nk = 2\n",
    )
    .unwrap();
    let o = spinex(dir.path(), &["--config", "c.toml", "--out-dir", "o", "benchmark"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let runs = fs::read_to_string(dir.path().join("o/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 2);
}

#[test]
fn complexity_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(
        dir.path(),
        &["--out-dir", "c", "complexity", "--algorithms", "kmeans", "--sizes", "50,100,200", "--dims", "2", "--trials", "2"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = dir.path().join("c");
    assert!(c.join("complexity.csv").exists());
    assert!(c.join("timings_raw.csv").exists());
    let plot = fs::read_to_string(c.join("plots/kmeans_d2.csv")).unwrap();
    assert_eq!(plot.lines().next(), Some("n,median_seconds"));
    assert_eq!(plot.lines().count(), 4);
}

#[test]
fn complexity_rejects_empty_algorithms_and_short_grids() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinex(dir.path(), &["complexity", "--algorithms", ""]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinex(dir.path(), &["complexity", "--algorithms", "kmeans", "--sizes", "10,20"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn closed_stdout_is_not_a_crash() {
    use std::process::Stdio;
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "Blobs", "b.csv");
    let mut child = Command::new(env!("CARGO_BIN_EXE_spinex"))
        .current_dir(dir.path())
        .args(["explain", "--input", "b.csv", "--label-column", "label", "--observation", "0"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    assert_eq!(child.wait().unwrap().code(), Some(0));
}
