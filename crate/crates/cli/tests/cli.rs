use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hypchroma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypchroma"))
        .args(args)
        .env("HYPCHROMA_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

#[test]
fn bounds_reports() {
    let r = json(&hypchroma(&["bounds", "--d", "1"]));
    assert_eq!(r["upper_colors"], 138);
    let r = json(&hypchroma(&["bounds", "--genus", "28"]));
    assert_eq!(r["lower_clique"], 12);
    assert_eq!(hypchroma(&["bounds"]).status.code(), Some(2));
    assert_eq!(
        hypchroma(&["bounds", "--genus", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(hypchroma(&["bounds", "--d", "-1"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(
        hypchroma(&["net", "--d", "1", "--r0", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(hypchroma(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        hypchroma(&["construct", "truncated", "--n", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hypchroma(&["construct", "ideal", "--n", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        hypchroma(&["collar", "--length", "0.1", "--d", "4", "--eps", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn ideal_and_truncated_constructions() {
    let r = json(&hypchroma(&["construct", "ideal", "--n", "3"]));
    let cert = &r["certificate"];
    assert_eq!(cert["status"], "certified");
    assert_eq!(cert["vertices"].as_array().unwrap().len(), 4);
    assert!((cert["edge_length"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-9);

    let r = json(&hypchroma(&[
        "construct",
        "truncated",
        "--n",
        "5",
        "--d",
        "3.0",
    ]));
    let cert = &r["certificate"];
    assert_eq!(cert["status"], "certified");
    assert_eq!(cert["vertices"].as_array().unwrap().len(), 6);
    assert!((cert["edge_length"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn construct_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k12.json");
    let rot = data("k12.rot");
    let out = hypchroma(&[
        "construct",
        "closed",
        "--rotation",
        rot.to_str().unwrap(),
        "--out",
        file.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let built: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let r = json(&hypchroma(&["audit", file.to_str().unwrap()]));
    assert_eq!(r["derived"], built["descriptor"]["derived"]);
    assert_eq!(r["derived"]["genus"], 28);
    assert_eq!(r["certificate"]["status"], "certified");

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{").unwrap();
    assert_eq!(
        hypchroma(&["audit", garbage.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let net = [
        "net", "--d", "1", "--radius", "4", "--seed", "3", "--trials", "5000",
    ];
    let a = hypchroma(&net);
    let b = hypchroma(&net);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(r["wall_time"].is_null());
    assert_eq!(r["violations"], 0);

    let rot = data("k12.rot");
    let c = ["construct", "triangle", "--rotation", rot.to_str().unwrap()];
    assert_eq!(hypchroma(&c).stdout, hypchroma(&c).stdout);
}

#[test]
fn verify_passes_and_catches_corruption() {
    let ok = hypchroma(&["verify", "all"]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );

    let dir = tempfile::tempdir().unwrap();
    for name in ["k4.rot", "k12.rot"] {
        std::fs::copy(data(name), dir.path().join(name)).unwrap();
    }
    // Swap two neighbors of vertex 0: still a rotation system, wrong genus.
    let text = std::fs::read_to_string(data("k7.rot")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines
        .iter()
        .position(|l| l.trim_start().starts_with("0:"))
        .unwrap();
    let (head, rest) = lines[row].split_once(':').unwrap();
    let mut nbrs: Vec<&str> = rest.split_whitespace().collect();
    nbrs.swap(0, 1);
    lines[row] = format!("{head}: {}", nbrs.join(" "));
    std::fs::write(dir.path().join("k7.rot"), lines.join("\n") + "\n").unwrap();

    let bad = hypchroma(&[
        "verify",
        "rotations",
        "--data-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("genus mismatch"));
}

#[test]
fn faces_and_collar() {
    let rot = data("k7.rot");
    let r = json(&hypchroma(&["faces", rot.to_str().unwrap()]));
    assert_eq!(r["report"]["genus"], 1);
    let r = json(&hypchroma(&[
        "collar", "--length", "0.1", "--d", "4", "--genus", "2",
    ]));
    assert_eq!(r["genus_budget"], 30);
    assert!(r["cylinder"]["colors_total"].as_u64().unwrap() <= 10);
}
