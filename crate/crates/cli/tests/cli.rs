use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ffgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffgeom")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ffgeom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn check<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn verify_small_triangle_passes() {
    let f = scratch("tri.csv", "p=7\n0,0\n1,0\n0,1\n");
    let out = ffgeom(&["verify", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["input"]["size"], 3);
    let rec = check(&v, "s0_identity");
    assert_eq!(rec["pass"], true);
    assert!(rec["anchor"].as_str().is_some_and(|s| !s.is_empty()));
}

#[test]
fn verify_is_reproducible() {
    let f = scratch("rep.csv", "p=11\n0,0\n1,0\n0,1\n3,4\n5,9\n2,2\n");
    let strip = |o: Output| {
        let mut v = json(&o);
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let a = strip(ffgeom(&["verify", f.to_str().unwrap(), "--seed", "3", "--K-override", "5/2"]));
    let b = strip(ffgeom(&["verify", f.to_str().unwrap(), "--seed", "3", "--K-override", "5/2"]));
    assert_eq!(a, b);
}

#[test]
fn kinematic_census_at_seven() {
    let out = ffgeom(&["kinematic", "--p", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(check(&v, "image_size")["lhs"]["repr"], "392");
}

#[test]
fn clifford_group_orders() {
    for (lambda, order) in [("-1", "392"), ("3", "392"), ("2", "294")] {
        let out = ffgeom(&["clifford", "--p", "7", "--lambda", lambda]);
        assert_eq!(out.status.code(), Some(0), "λ = {lambda}");
        let v = json(&out);
        assert!(v["checks"].as_array().unwrap().iter().any(|c| c["lhs"]["repr"] == order), "λ = {lambda}");
    }
}

#[test]
fn stats_on_small_triangle() {
    let f = scratch("stats.csv", "p=7\n0,0\n1,0\n0,1\n");
    let out = ffgeom(&["stats", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let d = &json(&out)["data"];
    assert_eq!(d["delta0"], 2);
    assert_eq!(d["pin_max"], 2);
    assert_eq!(d["t_star"], 2);
    assert_eq!(d["t_star_p_over_n3"]["repr"], "14/27");
}

#[test]
fn generate_then_stats_round_trip() {
    let dir = std::env::temp_dir().join(format!("ffgeom-cli-gen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("g.csv");
    let out = ffgeom(&["generate", "--p", "13", "--model", "uniform", "--size", "30", "--seed", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("p=13\n"));
    assert_eq!(text.lines().count(), 31);
    let again = ffgeom(&["generate", "--p", "13", "--model", "uniform@30", "--seed", "5"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn sweep_uniform_is_pseudorandom() {
    let out = ffgeom(&["sweep", "--p", "101", "--model", "uniform", "--size", "1015", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let row: Vec<&str> = rows.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "t_star_p_over_n3").unwrap();
    let r: f64 = row[col].parse().unwrap();
    assert!((0.85..=1.15).contains(&r), "ratio {r}");
}

#[test]
fn sweep_rows_follow_grid_order() {
    let out = ffgeom(&["sweep", "--p", "13,11", "--size", "20,10", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let cells: Vec<(String, String)> = text.lines().skip(1).map(|l| {
        let f: Vec<&str> = l.split(',').collect();
        (f[0].to_string(), f[1].to_string())
    }).collect();
    let want = [("13", "20"), ("13", "10"), ("11", "20"), ("11", "10")];
    assert_eq!(cells, want.map(|(a, b)| (a.to_string(), b.to_string())));
}

#[test]
fn bad_input_exits_two() {
    let composite = scratch("bad.csv", "p=8\n0,0\n");
    let out_of_range = scratch("range.csv", "p=7\n7,0\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", composite.to_str().unwrap()],
        vec!["verify", out_of_range.to_str().unwrap()],
        vec!["verify", "/definitely/not/here.csv"],
        vec!["kinematic", "--p", "9"],
        vec!["clifford", "--p", "7", "--lambda", "0"],
        vec!["generate", "--p", "7", "--model", "nonsense@3"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = ffgeom(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn bad_k_override_exits_two() {
    let f = scratch("k.csv", "p=7\n0,0\n1,0\n0,1\n");
    for k in ["abc", "0", "-3/2"] {
        let out = ffgeom(&["verify", f.to_str().unwrap(), "--K-override", k]);
        assert_eq!(out.status.code(), Some(2), "K = {k}");
    }
}
