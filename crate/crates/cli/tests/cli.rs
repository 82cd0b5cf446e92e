use std::process::{Command, Output};

use serde_json::Value;

fn flipbraid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flipbraid"))
        .args(args)
        .env_remove("FLIPBRAID_FIXTURES")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn empty_word_gives_identity() {
    let out = flipbraid(&["invariant", "--n", "2", "--word", ""]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["matrix"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5);
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(e.as_str().unwrap(), if i == j { "1" } else { "0" });
        }
    }
    assert_eq!(v["basis"].as_array().unwrap().len(), 5);
}

#[test]
fn charpoly_is_monic_of_degree_seven() {
    let out = flipbraid(&["invariant", "--n", "3", "--word", "b(1,3)", "--charpoly", "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let poly = v["charpoly"].as_array().unwrap();
    assert_eq!(poly.len(), 8);
    assert_eq!(poly[0], "1");
    let trace: i64 = v["trace"].as_str().unwrap().parse().unwrap();
    let c1: i64 = poly[1].as_str().unwrap().parse().unwrap();
    assert_eq!(trace, -c1);
}

#[test]
fn eleven_by_eleven_at_five_strands() {
    let out = flipbraid(&["invariant", "--n", "5", "--word", "b(1,5)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["matrix"]["rows"], 11);
    assert_eq!(v["matrix"]["cols"], 11);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["invariant", "--n", "3", "--word", "b(1,2) b(2,3)^-1", "--trace"];
    assert_eq!(flipbraid(&args).stdout, flipbraid(&args).stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let path = path.to_str().unwrap();
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path]);
    assert_eq!(flipbraid(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(path).unwrap(), flipbraid(&args).stdout);
}

#[test]
fn verify_families_pass() {
    for args in [
        ["verify", "--n", "3", "--family", "pentagon", "--trials", "100"],
        ["verify", "--n", "4", "--family", "pb_all", "--trials", "1"],
        ["verify", "--n", "2", "--family", "inverse", "--trials", "1"],
        ["verify", "--n", "4", "--family", "far_comm", "--trials", "50"],
    ] {
        let out = flipbraid(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
    }
}

#[test]
fn bundled_fixtures_pass() {
    let out = flipbraid(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{text}");
}

fn copy_fixtures(dir: &std::path::Path) {
    let src = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    for entry in std::fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
    }
}

#[test]
fn fixture_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_flipbraid"))
            .arg("fixtures")
            .env("FLIPBRAID_FIXTURES", dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));

    let file = dir.path().join("braid_products_11x11.json");
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("\"4/35\"", "\"4/36\"", 1)).unwrap();
    let out = run();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["invariant", "--n", "2", "--word", "b(2,1)"],
        vec!["invariant", "--n", "2", "--word", "b(1,3)"],
        vec!["invariant", "--n", "2", "--word", "c(1,2)"],
        vec!["invariant", "--n", "0"],
        vec!["invariant", "--n", "2", "--step", "1/100", "--floor", "1/10"],
        vec!["invariant", "--n", "2", "--step", "x"],
        vec!["verify", "--n", "2", "--family", "braid"],
        vec!["frobnicate"],
    ] {
        assert_eq!(flipbraid(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn simulate_writes_events_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("svg");
    let out = flipbraid(&[
        "simulate",
        "--n",
        "2",
        "--word",
        "b(1,2)",
        "--svg-dir",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let events = json(&out);
    let events = events.as_array().unwrap();
    assert!(!events.is_empty());
    for e in events {
        let gamma = e["gamma"].as_str().unwrap();
        assert!(gamma.starts_with("d(") && gamma.ends_with(')'));
        assert!(e["t_lo"].is_string() && e["t_hi"].is_string());
    }
    let records: Vec<flipbraid::flip::FlipRecord> = serde_json::from_value(Value::Array(events.clone())).unwrap();
    let home = flipbraid::build_delaunay(&flipbraid::canonical_setup(2).unwrap().config).unwrap();
    let mut set = home.triangles().clone();
    for r in &records {
        set = flipbraid::FlipEvent::from(r).apply(&set).unwrap();
    }
    assert_eq!(&set, home.triangles());
    let shots = std::fs::read_dir(&svg).unwrap().count();
    assert_eq!(shots, events.len() + 1);

    let empty = dir.path().join("empty");
    let out = flipbraid(&[
        "simulate",
        "--n",
        "2",
        "--word",
        "",
        "--svg-dir",
        empty.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!([]));
    assert_eq!(std::fs::read_dir(&empty).unwrap().count(), 1);
}
