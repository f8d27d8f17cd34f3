use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schmidt-flat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Value of the line starting with `key`, first token.
fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{key}` line in\n{text}"))
        .split_whitespace()
        .next()
        .unwrap()
}

fn decimal_after_hash(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap();
    line.split('#').nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn torus_spectrum_matches_primitive_vectors() {
    let dir = TempDir::new().unwrap();
    let torus = write(&dir, "t.surf", "kind = torus\n");
    let text = stdout_ok(&["spectrum", "--surface", s(&torus), "--lmax", "3"]);
    let got: BTreeSet<(i64, i64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let w: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(w[6], "exact");
            (w[2].parse().unwrap(), w[3].parse().unwrap())
        })
        .collect();
    let mut want = BTreeSet::new();
    for h in -3i64..=3 {
        for v in 0..=3 {
            if (v > 0 || h > 0) && gcd(h, v) == 1 {
                want.insert((h, v));
            }
        }
    }
    assert_eq!(got, want);

    let one = stdout_ok(&["spectrum", "--surface", s(&torus), "--lmax", "1"]);
    assert_eq!(field(&one, "# entries"), "4");
    assert!(!one.contains("-0.0"));
}

#[test]
fn bad_surface_reports_line() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.surf", "kind = origami\nh = (1 2)\nv = (1 x)\n");
    let out = run(&["spectrum", "--surface", s(&bad)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");

    let unknown = write(&dir, "u.surf", "# comment\nkind = torus\nshape = round\n");
    let err = String::from_utf8(run(&["spectrum", "--surface", s(&unknown)]).stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn repeat_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let l = write(&dir, "l.surf", "kind = origami\nh = (1 2)\nv = (1 3)\n");
    let args = ["spectrum", "--surface", s(&l), "--lmax", "12"];
    let a = stdout_ok(&args);
    let b = bin().args(args).env("SCHMIDT_FLAT_THREADS", "1").output().unwrap();
    assert!(b.status.success());
    assert_eq!(a.as_bytes(), &b.stdout[..]);
}

#[test]
fn play_certifies_and_null_alice_fails() {
    let dir = TempDir::new().unwrap();
    let torus = write(&dir, "t.surf", "kind = torus\n");
    let t1 = dir.path().join("a.tr");
    let t2 = dir.path().join("b.tr");
    let base = ["play", "--surface", s(&torus), "--beta", "1/16", "--rounds", "40", "--seed", "3", "--exact"];
    let report = stdout_ok(&[&base[..], &["--transcript", s(&t1)]].concat());
    assert_eq!(field(&report, "pj"), "pass");
    assert_eq!(field(&report, "rounds"), "40");
    assert!(report.lines().any(|l| l.starts_with("final ") && l.ends_with(" pass")), "{report}");

    let again = stdout_ok(&[&base[..], &["--transcript", s(&t2)]].concat());
    assert_eq!(report, again);
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());

    // Bob replayed from the transcript meets the same Alice.
    let script = format!("script:{}", s(&t1));
    let t3 = dir.path().join("c.tr");
    let scripted = stdout_ok(&[&base[..], &["--bob", &script, "--transcript", s(&t3)]].concat());
    assert_eq!(field(&scripted, "pj"), "pass");
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&t3).unwrap());

    let null = stdout_ok(&[&base[..], &["--null-alice"]].concat());
    assert_eq!(field(&null, "pj"), "fail");
    let v = null.lines().find(|l| l.starts_with("violation ")).expect("violation line");
    assert!(v.contains(" witness ("), "{v}");
}

#[test]
fn replay_round_trips() {
    let dir = TempDir::new().unwrap();
    let torus = write(&dir, "t.surf", "kind = torus\n");
    let tr = dir.path().join("r.tr");
    stdout_ok(&["play", "--surface", s(&torus), "--rounds", "6", "--bob", "random", "--seed", "5", "--transcript", s(&tr)]);
    let text = std::fs::read_to_string(&tr).unwrap();
    assert_eq!(stdout_ok(&["replay", "--transcript", s(&tr)]), text);

    // Corrupting Bob's radius makes the replay fail.
    let broken: String = text
        .lines()
        .map(|l| if l.starts_with("2 bob ball") { "2 bob ball 1 1" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let bad = write(&dir, "bad.tr", &broken);
    assert!(!run(&["replay", "--transcript", s(&bad)]).status.success());
}

#[test]
fn float_play_refuses_unresolvable_games() {
    let dir = TempDir::new().unwrap();
    let torus = write(&dir, "t.surf", "kind = torus\n");
    let out = run(&["play", "--surface", s(&torus), "--rounds", "40"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--exact"));
}

#[test]
fn badness_on_and_off_spectrum() {
    let dir = TempDir::new().unwrap();
    let torus = write(&dir, "t.surf", "kind = torus\n");
    let zero = stdout_ok(&["badness", "--surface", s(&torus), "--psi", "0", "--exact", "--lmax", "10"]);
    assert_eq!(field(&zero, "value"), "0");
    assert_eq!(field(&zero, "witness"), "0");

    // Convergents p/q of φ − 1: min q²|atan(p/q) − ψ| against (−1, 1).
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let psi = (phi - 1.0).atan();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut oracle = (std::f64::consts::FRAC_PI_4 - psi).abs();
    while q1 <= 1000 {
        if q1 >= 1 {
            let l = p1.max(q1) as f64;
            oracle = oracle.min(l * l * ((p1 as f64 / q1 as f64).atan() - psi).abs());
        }
        (p0, q0, p1, q1) = (p1, q1, p1 + p0, q1 + q0);
    }
    let psi_s = format!("{psi:?}");
    let mut previous = f64::INFINITY;
    for lmax in ["10", "100", "1000"] {
        let out = stdout_ok(&["badness", "--surface", s(&torus), "--psi", &psi_s, "--lmax", lmax]);
        assert!(out.contains(" approx"));
        let v = decimal_after_hash(&out, "value");
        assert!(v <= previous);
        previous = v;
    }
    assert!((previous - oracle).abs() < 1e-3, "{previous} vs {oracle}");
}

#[test]
fn badness_from_transcript() {
    let dir = TempDir::new().unwrap();
    let torus = write(&dir, "t.surf", "kind = torus\n");
    let tr = dir.path().join("b.tr");
    stdout_ok(&["play", "--surface", s(&torus), "--rounds", "8", "--seed", "2", "--transcript", s(&tr)]);
    let out = stdout_ok(&["badness", "--surface", s(&torus), "--transcript", s(&tr), "--lmax", "50"]);
    assert!(decimal_after_hash(&out, "value") > 0.0);
}

#[test]
fn iet_statistics() {
    let dir = TempDir::new().unwrap();
    let golden = write(&dir, "g.iet", "# golden rotation\nn 2\npi 2 1\nlambda (-1+sqrt(5))/2 (3-sqrt(5))/2\n");
    let out = stdout_ok(&["iet", "--iet", s(&golden), "--horizon", "10000"]);
    assert_eq!(field(&out, "min"), "(21-9*sqrt(5))/2");
    assert!(decimal_after_hash(&out, "min") > 0.0);

    let rational = write(&dir, "r.iet", "n 2\npi 2 1\nlambda 2/3 1/3\n");
    let out = stdout_ok(&["iet", "--iet", s(&rational), "--horizon", "100"]);
    assert_eq!(field(&out, "min"), "0");

    let all = stdout_ok(&["iet", "--iet", s(&golden), "--horizon", "1000", "--reorder"]);
    assert_eq!(all.lines().filter(|l| l.starts_with("ordering ")).count(), 2);
    for l in all.lines().filter(|l| l.starts_with("min ")) {
        assert!(l.split('#').nth(1).unwrap().split_whitespace().next().unwrap().parse::<f64>().unwrap() > 0.0);
    }

    let bad = write(&dir, "bad.iet", "n 2\npi 2 1\nlambda 1/2 zero\n");
    let err = String::from_utf8(run(&["iet", "--iet", s(&bad)]).stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn constants_ladder_is_reported() {
    let dir = TempDir::new().unwrap();
    let l = write(&dir, "l.surf", "kind = origami\nh = (1 2)\nv = (1 3)\n");
    let out = stdout_ok(&["constants", "--surface", s(&l), "--exact"]);
    assert_eq!(field(&out, "M"), "3");
    assert_eq!(field(&out, "N3"), "54");
    assert_eq!(field(&out, "identity"), "holds");
    assert!(out.lines().filter(|l| l.starts_with('c')).all(|l| l.contains(" exact ")));
}
