use std::process::Command;

fn lcrit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lcrit")).args(args).output().unwrap()
}

#[test]
fn bounds_prints_json() {
    let out = lcrit(&["bounds", "--q", "5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let (t1, t2) = (v["thm1"].as_f64().unwrap(), v["thm2"].as_f64().unwrap());
    assert!((t1 - 2.0 * t2).abs() < 1e-15);
}

#[test]
fn zeros_finds_first_point() {
    let out = lcrit(&["zeros", "--rect", "2,3,20,25", "--res", "0.05"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("winding count 1"), "{text}");
    assert!(text.contains("2.463161869"), "{text}");
}

#[test]
fn rejects_bad_rect() {
    assert!(!lcrit(&["zeros", "--rect", "1,2,3"]).status.success());
}
