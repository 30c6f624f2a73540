use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypergauss::kernel::read_binary;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn hypergauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypergauss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn exit_code_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let tight_grid = write_cfg(
        dir.path(),
        "tight.cfg",
        "level = 0\n[block]\nm = 1\na = 1\nB = 1\n[grid]\nL = 3\nN = 64\nt = 1\n",
    );
    let coarse = write_cfg(
        dir.path(),
        "coarse.cfg",
        "level = 0\n[block]\nm = 1\na = 1\nB = 1\n[grid]\nL = 12\nN = 8\nt = 1\n",
    );
    let broken = write_cfg(dir.path(), "broken.cfg", "level = 1\n[block]\nm = 2\na = 1\nB = 1\n");
    let unknown = write_cfg(dir.path(), "unknown.cfg", "level = 1\ncolour = blue\n");

    let heat = cfg("heat.cfg");
    let complexified = cfg("complexified.cfg");
    let inadmissible = cfg("inadmissible.cfg");
    let family = cfg("family.cfg");
    let discrete = cfg("discrete_family.cfg");
    let table: Vec<(Vec<&str>, i32)> = vec![
        (vec!["validate", "--config", &heat], 0),
        (vec!["validate", "--config", &complexified], 0),
        (vec!["validate", "--config", &inadmissible], 2),
        (vec!["kernel", "--config", &inadmissible], 2),
        (vec!["kernel", "--config", &inadmissible, "--force"], 0),
        (vec!["moments", "--config", &inadmissible], 2),
        (vec!["moments", "--config", &inadmissible, "--force"], 2),
        (vec!["semigroup", "--config", &inadmissible], 2),
        (vec!["semigroup", "--config", &inadmissible, "--force"], 0),
        (vec!["kernel", "--config", &heat], 0),
        (vec!["kernel", "--config", &heat, "--tol-kernel", "1e-300"], 3),
        (vec!["moments", "--config", &complexified], 0),
        (vec!["moments", "--config", &tight_grid], 3),
        (vec!["moments", "--config", &complexified, "--tol-moment", "0"], 3),
        (vec!["kernel", "--config", &coarse], 3),
        (vec!["semigroup", "--config", &complexified], 0),
        (vec!["semigroup", "--config", &complexified, "--tol-semigroup", "0"], 3),
        (vec!["consistency", "--config", &family], 0),
        (vec!["consistency", "--config", &discrete], 0),
        (vec!["consistency", "--config", &heat], 1),
        (vec!["selftest"], 0),
        (vec!["selftest", "--tol-kernel", "1e-300"], 3),
        (vec!["validate", "--config", &broken], 1),
        (vec!["validate", "--config", &unknown], 1),
        (vec!["validate"], 1),
        (vec!["validate", "--config", "/nonexistent/run.cfg"], 1),
        (vec!["validate", "--config", &heat, "--tol-alpha", "-1"], 1),
        (vec!["transmogrify"], 1),
        (vec!["--help"], 0),
    ];
    for (args, expected) in table {
        let mut full = args.clone();
        full.extend(["--out", &out, "--reproducible"]);
        let o = hypergauss(&full);
        assert_eq!(
            o.status.code(),
            Some(expected),
            "{args:?}\nstderr: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn validate_reports_unit_margin() {
    let o = hypergauss(&["validate", "--config", &cfg("complexified.cfg"), "--reproducible"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["admissibility"]["pass"], true);
    assert_eq!(v["admissibility"]["blocks"][0]["margin"], 1.0);
    assert!(v.get("generated_at").is_none());

    let o = hypergauss(&["validate", "--config", &cfg("complexified.cfg")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["generated_at"].is_u64());
}

#[test]
fn heat_kernel_file_matches_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let o = hypergauss(&["kernel", "--config", &cfg("heat.cfg"), "--out", &out, "--reproducible"]);
    assert_eq!(o.status.code(), Some(0));

    let csv = fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x1,i0_re,i0_im");
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let g = (-cells[0] * cells[0] / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        worst = worst.max((cells[1] - g).abs()).max(cells[2].abs());
        rows += 1;
    }
    assert_eq!(rows, 1024);
    assert!(worst <= 1e-6, "{worst}");

    let field = read_binary(std::io::BufReader::new(fs::File::open(dir.path().join("kernel.bin")).unwrap())).unwrap();
    assert_eq!(field.values.len(), 1024);
    assert_eq!(field.grid.t(), 1.0);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("kernel.json")).unwrap()).unwrap();
    assert_eq!(report["oracle"]["pass"], true);
    assert_eq!(report["command"], "kernel");
}

#[test]
fn reports_have_sorted_keys() {
    let o = hypergauss(&["semigroup", "--config", &cfg("two_block.cfg"), "--reproducible"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(keys.contains(&"max_deviation"));
}

#[test]
fn inconsistent_family_lists_violations() {
    let dir = tempfile::tempdir().unwrap();
    let text = "\
level = 1
[family]
labels = 1, 2
[member]
name = joint
coords = 1, 2
atom = 0, 0 @ 1
atom = 1, 1 @ 0.5
[member]
name = first
coords = 1
atom = 0 @ 1
";
    let path = write_cfg(dir.path(), "bad.cfg", text);
    let o = hypergauss(&["consistency", "--config", &path, "--reproducible"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["consistent"], false);
    assert_eq!(v["violations"].as_array().unwrap().len(), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("joint"));
}
