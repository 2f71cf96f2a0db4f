use std::process::{Command, Output};

fn qcvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcvol")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn tables_match_golden_files() {
    let o = qcvol(&["table", "--from", "7", "--to", "68", "--sign", "negative"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("../../core/tests/golden/table_negative.csv"));
    let o = qcvol(&["table", "--from", "3", "--to", "68", "--sign", "positive", "--format", "csv"]);
    assert_eq!(stdout(&o), include_str!("../../core/tests/golden/table_positive.csv"));
}

#[test]
fn table_snippets() {
    let o = qcvol(&["table", "--from", "9", "--to", "9", "--sign", "negative"]);
    assert_eq!(stdout(&o), "d,i0,volume\n9,2,-37\n");
    let o = qcvol(&["table", "--from", "3", "--to", "8", "--sign", "positive"]);
    assert_eq!(stdout(&o), "d,i0,volume\n3,1,1\n4,1,2\n5,1,7/2\n6,1,11/2\n7,2,31/3\n8,2,19\n");
    let o = qcvol(&["table", "--from", "7", "--to", "27", "--sign", "negative"]);
    assert_eq!(stdout(&o).lines().count(), 22);
}

#[test]
fn table_json_is_deterministic() {
    let args = ["table", "--from", "7", "--to", "9", "--sign", "negative", "--format", "json"];
    let a = stdout(&qcvol(&args));
    assert_eq!(a, stdout(&qcvol(&args)));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v[0]["volume"], "-19/2");
    assert_eq!(v[2]["i0"], 2);
    assert_eq!(v[0]["volume_log2_abs"], "3.2479275134435854938");
    assert_eq!(stdout(&qcvol(&["table", "--from", "7", "--to", "9", "--sign", "negative", "--json"])), a);
}

#[test]
fn table_rejects_unsupported_range() {
    let o = qcvol(&["table", "--from", "4", "--to", "8", "--sign", "negative"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("4, 5, 6"), "{err}");
    let o = qcvol(&["table", "--from", "9", "--to", "8", "--sign", "negative"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_reports() {
    let o = qcvol(&["solve", "--dim", "7", "--sign", "negative"]);
    let t = stdout(&o);
    assert_eq!((field(&t, "volume"), field(&t, "i0")), ("-19/2", "1"));
    assert_eq!(field(&t, "box"), "[1/2, 1]^7");
    assert_eq!(field(&t, "q"), "0 0 0 0 1/2 1/2 1/2 1");

    let t = stdout(&qcvol(&["solve", "--dim", "3", "--sign", "positive"]));
    assert_eq!((field(&t, "volume"), field(&t, "i0")), ("1", "1"));

    let o = qcvol(&["solve", "--dim", "8", "--sign", "positive", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["volume"], "19");
    assert_eq!(v["box"], serde_json::json!(["2/3", "1"]));
    assert_eq!(v["delta"].as_array().unwrap().len(), 8);
}

#[test]
fn solve_rejects_d2_with_rule() {
    let o = qcvol(&["solve", "--dim", "2", "--sign", "negative"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("d >= 7") && err.contains("3..6") && err.contains("d = 2 is unsupported"), "{err}");
    assert_eq!(qcvol(&["solve", "--dim", "5", "--sign", "sideways"]).status.code(), Some(2));
}

#[test]
fn plotdata_records() {
    let o = qcvol(&["plotdata", "--from", "7", "--to", "8", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v[0]["i0_min"].clone(), v[0]["i0_max"].clone(), v[0]["i0_diff"].clone()), (1.into(), 2.into(), (-1).into()));
    assert_eq!(v[1]["i0_diff"], 0);
    assert_eq!(v[1]["log2_abs_max"], "4.2479275134435854938");
    assert!(v[1]["log2_abs_min"].as_str().unwrap().starts_with("4.1963"));

    let o = qcvol(&["plotdata", "--from", "9", "--to", "8"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let o = qcvol(&["plotdata", "--from", "9", "--to", "8", "--json"]);
    assert_eq!(stdout(&o), "[]\n");
}

#[test]
fn realize_writes_valid_grids() {
    let dir = std::env::temp_dir().join(format!("qcvol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (d, sign, a, b, vol) in [("8", "positive", "2/3", "1", "19"), ("3", "negative", "2/5", "4/5", "-4/5")] {
        let path = dir.join(format!("grid{d}.json"));
        let o = qcvol(&["realize", "--dim", d, "--sign", sign, "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        let t = stdout(&o);
        assert_eq!(field(&t, "violations"), "0");
        assert_eq!(field(&t, "volume"), vol);
        let grid = qcvol::grid::GridQuasiCopula::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(grid.bbox().a().iter().all(|x| qcvol::render_rational(x) == a));
        assert!(grid.bbox().b().iter().all(|x| qcvol::render_rational(x) == b));
        assert_eq!(qcvol::render_rational(&grid.volume()), vol);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn realize_guards() {
    let o = qcvol(&["realize", "--dim", "21"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d <= 20"));
    assert_eq!(qcvol(&["realize", "--dim", "8", "--sign", "positive"]).status.code(), Some(2));
    let o = qcvol(&["realize", "--dim", "3", "--sign", "positive", "--out", "/nonexistent/dir/g.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_small_passes() {
    let o = qcvol(&["verify", "--reduced-max", "3", "--full-max", "3"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert!(t.contains("PASS full LP = reduced LP d=3 negative: -4/5"));
    assert!(t.contains("PASS symmetric LP = reduced LP d=3 positive: 1"));
    assert!(t.ends_with("8 checks, 0 failed\n"));
}

#[test]
fn verify_default_ranges_pass() {
    let o = qcvol(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn verify_corrupted_closed_form_fails() {
    let o = qcvol(&["verify", "--reduced-max", "4", "--full-max", "0", "--corrupt-closed-form"]);
    assert_eq!(o.status.code(), Some(3));
    let t = stdout(&o);
    assert!(t.contains("FAIL reduced LP = closed form d=3 negative: expected -799/1000, got -4/5"), "{t}");
    assert!(t.contains("FAIL dual of reduced LP = closed form d=4 positive: expected 2001/1000, got 2"), "{t}");
    assert_eq!(qcvol(&["verify", "--full-max", "7"]).status.code(), Some(2));
}
