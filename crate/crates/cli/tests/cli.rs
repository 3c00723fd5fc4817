use std::path::Path;
use std::process::{Command, Output};

fn dirsimplex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirsimplex")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn lift_prints_counts_and_writes_complex() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "fig.txt", "n 4\n0 1\n1 2\n0 2\n2 3\n3 0\n");
    let out = dir.path().join("fig.cx");
    let o = dirsimplex(&["lift", &g, "--directed", "--max-dim", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "0:4 1:5 2:1");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("dims 3\n") && text.contains("\n0 1 2\n"), "{text}");

    let cyc = write(dir.path(), "cyc.txt", "n 3\n0 1\n1 2\n2 0\n");
    assert_eq!(stdout(&dirsimplex(&["lift", &cyc, "--directed"])).trim(), "0:3 1:3 2:0");
    // the undirected flag complex of the same edges fills the triangle
    assert_eq!(stdout(&dirsimplex(&["lift", &cyc])).trim(), "0:3 1:3 2:1");
}

#[test]
fn parse_errors_exit_with_2_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.txt", "n 3\n0 1\n1 x\n");
    let o = dirsimplex(&["lift", &g, "--directed"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{o:?}");
    assert_eq!(dirsimplex(&["lift"]).status.code(), Some(2));
    assert_eq!(dirsimplex(&["lift", "/nonexistent/graph.txt"]).status.code(), Some(3));
}

#[test]
fn dswl_separates_the_circulant_pair() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "n 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 2\n1 3\n2 4\n3 5\n4 0\n5 1\n");
    let b = write(dir.path(), "b.txt", "n 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3\n1 4\n2 5\n3 0\n4 1\n5 2\n");
    let (ka, kb) = (dir.path().join("a.cx"), dir.path().join("b.cx"));
    assert!(dirsimplex(&["lift", &a, "--directed", "--out", ka.to_str().unwrap()]).status.success());
    assert!(dirsimplex(&["lift", &b, "--directed", "--out", kb.to_str().unwrap()]).status.success());
    for variant in ["full", "reduced"] {
        let o = dirsimplex(&["dswl", ka.to_str().unwrap(), kb.to_str().unwrap(), "--variant", variant]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["verdict"], "distinguished");
        assert_eq!(v["variant"], variant);
        assert_eq!(v["histograms"].as_array().unwrap().len(), 2);
    }
    let o = dirsimplex(&["dswl", ka.to_str().unwrap(), ka.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "not-distinguished");
    assert_eq!(dirsimplex(&["dswl", ka.to_str().unwrap(), kb.to_str().unwrap(), "--variant", "half"]).status.code(), Some(2));
}

#[test]
fn adjacency_export() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "k.cx", "dims 3\n0 1 2\n");
    let o = dirsimplex(&["adjacency", &k, "--dim", "1", "--direction", "down", "--i", "0", "--j", "1"]);
    assert!(o.status.success(), "{o:?}");
    // (0,1) then (1,2), meeting at vertex 1
    assert_eq!(stdout(&o), "1 1 0 1 down\n0 2 0 1\n");
    assert_eq!(dirsimplex(&["adjacency", &k, "--dim", "1", "--direction", "sideways", "--i", "0", "--j", "1"]).status.code(), Some(2));
}

#[test]
fn expressivity_table() {
    let o = dirsimplex(&["expressivity", "--seeds", "2"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o), "model,accuracy\ndir-gnn,50.0%\ndir-snn,100.0%\n");
    assert_eq!(stdout(&dirsimplex(&["expressivity", "--seeds", "2", "--swap-labels"])), stdout(&o));
}

#[test]
fn bench_dry_run_and_config_errors() {
    let o = dirsimplex(&["bench", "--dry-run", "--profile", "paper"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 5 * 5 * 4);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[grid]\nwidths = []\n");
    let o = dirsimplex(&["bench", "--dry-run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.widths"));
}

#[test]
fn small_bench_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tiny.toml",
        "[experiment]\nsnr_db = [10.0]\nmodes = [\"directed\"]\n[dataset]\nsignals = 40\n[grid]\nlayers = [1]\nwidths = [4]\n[training]\nepochs = 2\n",
    );
    let out = dir.path().join("out");
    let o = dirsimplex(&["bench", "--config", &cfg, "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let results = std::fs::read_to_string(out.join("directed/results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 4);
    assert!(results.starts_with("model,snr_db,seed,accuracy\n"));
    assert!(results.contains("dir-snn,10,3,"));
    let plot = std::fs::read_to_string(out.join("directed/plot.csv")).unwrap();
    assert!(plot.starts_with("model,snr_db,mean,std\n"));
    let archived = std::fs::read_to_string(out.join("config.toml")).unwrap();
    let runs = std::fs::read_to_string(out.join("directed/runs.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(runs.lines().next().unwrap()).unwrap();
    use sha2::Digest;
    assert_eq!(first["config_hash"], hex::encode(sha2::Sha256::digest(archived.as_bytes())));
    assert!(out.join("directed/metrics/gcn_snr10_seed3.csv").exists());
}

#[test]
fn datagen_writes_dataset_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data");
    let cfg = write(dir.path(), "d.toml", "[dataset]\nsignals = 25\n");
    let o = dirsimplex(&["datagen", "--config", &cfg, "--mode", "undirected", "--snr-db", "-5", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let bytes = std::fs::read(out.join("dataset.bin")).unwrap();
    let data = dirsimplex::datagen::Dataset::from_bytes(&bytes).unwrap();
    assert_eq!((data.samples.len(), data.snr_db, data.seed, data.directed), (25, -5.0, 7, false));
    let labels = std::fs::read_to_string(out.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 26);
    assert_eq!(dirsimplex(&["datagen", "--mode", "sideways", "--snr-db", "0"]).status.code(), Some(2));
}
