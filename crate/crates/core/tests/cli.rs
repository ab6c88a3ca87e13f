use std::path::Path;
use std::process::{Command, Output};

fn jitower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jitower")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn build_verify_normals_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    let tower = dir.path().join("run.tower");
    std::fs::write(&config, "# two levels of three\nprimes = 2, 3, 5\ndepth = 2\ntower = run.tower\n").unwrap();

    let out = jitower(&["build", "--config", path(&config)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["status"], "ok");
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["tower"]["levels"][1]["group_order"], "324");
    assert!(tower.exists());

    let out = jitower(&["verify", "--tower", path(&tower), "--checks", "betti,grading"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<&str> = v["certificate"]["sections"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["grading", "betti"]);

    let out = jitower(&["normals", "--tower", path(&tower), "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let n = json(&out);
    assert_eq!(n["order"], 324);
    assert_eq!(n["oracle"], "agrees");
    let rows = n["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.last().unwrap()["cumulative"], 30);

    let out = jitower(&["report", "--tower", path(&tower)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("324"), "{text}");

    let extended = dir.path().join("three.tower");
    let out = jitower(&["extend", "--tower", path(&tower), "--depth", "3", "--out", path(&extended), "--checks", "conditions"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["tower"]["levels"][2]["dim"], 324);
    let out = jitower(&["extend", "--tower", path(&extended), "--depth", "4"]);
    assert_eq!(out.status.code(), Some(2), "only three primes are configured");
}

#[test]
fn bad_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "epsilon = 1/3\n").unwrap();
    assert_eq!(jitower(&["build", "--config", path(&config)]).status.code(), Some(2));
    std::fs::write(&config, "colour = red\n").unwrap();
    assert_eq!(jitower(&["build", "--config", path(&config)]).status.code(), Some(2));
    assert_eq!(jitower(&["verify", "--tower", path(&dir.path().join("missing"))]).status.code(), Some(2));
    assert_eq!(jitower(&["verify", "--tower", path(&dir.path().join("x")), "--checks", "nonsense"]).status.code(), Some(2));
}

#[test]
fn tampered_tower_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    let tower = dir.path().join("t.tower");
    std::fs::write(&config, "depth = 2\n").unwrap();
    let out = jitower(&["build", "--config", path(&config), "--out", path(&tower), "--checks", "betti"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&tower).unwrap();
    let at = text.find("killed").unwrap();
    let row = at + text[at..].find('\n').unwrap() + 1;
    let pos = row + text[row..].find(['0', '1']).unwrap();
    let mut bytes = text.into_bytes();
    bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
    std::fs::write(&tower, bytes).unwrap();
    let out = jitower(&["verify", "--tower", path(&tower)]);
    assert_ne!(out.status.code(), Some(0));
}
