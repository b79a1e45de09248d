use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn mapcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapcone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TWO_TERM: &str = r#"
[[basis]]
name = "x"
degree = 0

[[basis]]
name = "y"
degree = 1

[[differential]]
source = "x"
value = [["y", "1"]]
"#;

/// [a, b] = c, [b, c] = a, [c, a] = c breaks Jacobi.
const BROKEN: &str = r#"
[[basis]]
name = "a"
degree = 0

[[basis]]
name = "b"
degree = 0

[[basis]]
name = "c"
degree = 0

[[bracket]]
left = "a"
right = "b"
value = [["c", "1"]]

[[bracket]]
left = "b"
right = "c"
value = [["a", "1"]]

[[bracket]]
left = "c"
right = "a"
value = [["c", "1"]]
"#;

#[test]
fn bernoulli_table() {
    let o = mapcone(&["bernoulli", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.trim_end().ends_with("-1/1209600"), "{out}");
    assert!(out.contains("1/12"));
}

#[test]
fn compare_transfer_on_dual_numbers() {
    let o = mapcone(&["compare-transfer", "--fixture", "dualnumbers", "--max-arity", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all brackets agree"));
}

#[test]
fn check_dgla_statuses() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.toml", TWO_TERM);
    assert_eq!(mapcone(&["check-dgla", ok.to_str().unwrap()]).status.code(), Some(0));
    let broken = write(&dir, "broken.toml", BROKEN);
    let o = mapcone(&["check-dgla", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("graded Jacobi"));
    let bad = write(&dir, "bad.toml", &TWO_TERM.replace("\"y\", \"1\"", "\"z\", \"1\""));
    let o = mapcone(&["check-dgla", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 10"));
}

#[test]
fn cone_output_round_trips_and_checks() {
    let dir = TempDir::new().unwrap();
    let o = mapcone(&["cone", "--fixture", "gl11", "--max-arity", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let parsed = mapcone::format::parse_linfty(&text).unwrap();
    assert_eq!(mapcone::format::emit_linfty(&parsed), text);
    let file = write(&dir, "cone.toml", &text);
    let f = file.to_str().unwrap();
    assert_eq!(mapcone(&["check-linfty", f, "--up-to", "3"]).status.code(), Some(0));
    let o = mapcone(&["check-linfty", f, "--up-to", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("needs 5"));
    // flip the sign of one arity-2 entry
    let broken = text.replacen("\"1/2\"", "\"-1/2\"", 1);
    assert_ne!(broken, text);
    let file = write(&dir, "broken.toml", &broken);
    assert_eq!(mapcone(&["check-linfty", file.to_str().unwrap(), "--up-to", "3"]).status.code(), Some(1));
}

#[test]
fn json_reports() {
    let o = mapcone(&["--format", "json", "compare-transfer", "--fixture", "sl2", "--max-arity", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["agree"], serde_json::Value::Bool(true));
    let o = mapcone(&["--format", "json", "bernoulli", "--n", "4"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["table"][2]["b_over_factorial"], "1/12");
}

const PAIR: &str = r#"
[pair]
x = [["u", "e", "1"]]
a = [["E11", "e", "-1"], ["E11", "e^2", "1/2"]]

[witness]
a = [["a", "e", "1"]]
b = [["E21", "e", "3"], ["E21", "e^2", "1"]]
"#;

#[test]
fn deformation_commands() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "pair.toml", PAIR);
    let c = c.to_str().unwrap();
    let common = ["--fixture", "gl11", "--eps", "3", "--candidates", c];
    let run = |cmd: &str| mapcone(&[&[cmd][..], &common[..]].concat());
    assert_eq!(run("mc-check").status.code(), Some(0));
    let h = run("homotopy-build");
    assert_eq!(h.status.code(), Some(0), "{}", stdout(&h));
    assert!(stdout(&h).contains("extracted witness: ok"));

    // [target] = the acted pair, read back from the JSON report of gauge-check
    let o = mapcone(&[&["--format", "json", "gauge-check"][..], &common[..]].concat());
    assert_eq!(o.status.code(), Some(2), "missing [target] is a format error");
    let not_mc = write(&dir, "bad.toml", &PAIR.replace("\"1/2\"", "\"1/3\""));
    let o = mapcone(&["mc-check", "--fixture", "gl11", "--eps", "3", "--candidates", not_mc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = mapcone(&["homotopy-build", "--fixture", "gl11", "--eps", "3", "--candidates", not_mc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gauge_check_accepts_the_orbit_point() {
    use mapcone::algebra::ArtinAlgebra;
    use mapcone::deformation::gauge_pair_act;
    use mapcone::format::{emit_candidates, parse_candidates};
    let chi = mapcone::fixtures::gl11_borel();
    let art = ArtinAlgebra::truncated("e", 3).unwrap();
    let mut c = parse_candidates(PAIR, &chi, &art).unwrap();
    c.target = Some(gauge_pair_act(&chi, &art, c.witness.as_ref().unwrap(), c.pair.as_ref().unwrap()));
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.toml", &emit_candidates(&c, &chi, &art));
    let o = mapcone(&["gauge-check", "--fixture", "gl11", "--eps", "3", "--candidates", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    c.witness.as_mut().unwrap().b = Default::default();
    let bad = write(&dir, "bad.toml", &emit_candidates(&c, &chi, &art));
    let o = mapcone(&["gauge-check", "--fixture", "gl11", "--eps", "3", "--candidates", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fixtures_listing_and_export() {
    let o = mapcone(&["fixtures"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dualnumbers"));
    let o = mapcone(&["fixtures", "--name", "borel"]);
    let chi = mapcone::format::parse_morphism(&stdout(&o)).unwrap();
    assert_eq!(chi.source.dim() + chi.target.dim(), 10);
    assert_eq!(mapcone(&["fixtures", "--name", "nope"]).status.code(), Some(2));
    assert_eq!(mapcone(&["cone", "--fixture", "nope"]).status.code(), Some(2));
}
