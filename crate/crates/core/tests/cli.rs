use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Workspace {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn brane(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brane"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn jsonl(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn p(path: &Path) -> &std::ffi::OsStr {
    path.as_os_str()
}

#[test]
fn check_reports_types() {
    let w = Workspace::new();
    let s = w.file("s.brane", "phago n[void] o cophago n{0}[void]");
    let m = w.file("m.brane", "exo n | pino m{0}.coexo n");
    let f = w.file("f.brane", "\\X:sys. phago n[$X]");
    assert_eq!(stdout(&brane(&[&"check", &p(&s)])).trim(), "sys");
    assert_eq!(stdout(&brane(&[&"check", &p(&m)])).trim(), "mem");
    assert_eq!(stdout(&brane(&[&"check", &p(&f)])).trim(), "sys -> sys");
    let o = brane(&[&"--format", &"jsonl", &"check", &p(&s), &"--type", &"mem"]);
    assert_eq!(code(&o), 1);
    assert_eq!(jsonl(&o)[0]["ok"], false);
}

#[test]
fn linearity_violation_is_a_negative_verdict() {
    let w = Workspace::new();
    let f = w.file("dup.brane", "\\X:sys. $X o $X");
    let o = brane(&[&"check", &p(&f)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("more than once"));
}

#[test]
fn input_errors_exit_with_two() {
    let w = Workspace::new();
    let bad = w.file("bad.brane", "phago n.[void");
    let o = brane(&[&"check", &p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:9"));
    assert_eq!(code(&brane(&[&"check", &p(&w.path("missing.brane"))])), 2);
    assert_eq!(code(&brane(&[&"frobnicate"])), 2);
    let s = w.file("s.brane", "pino n{0}[void]");
    let r = w.file("r.cfg", "pino n = x");
    assert_eq!(code(&brane(&[&"rates", &p(&s), &"--rates", &p(&r)])), 2);
}

#[test]
fn normalize_and_equiv() {
    let w = Workspace::new();
    let a = w.file("a.brane", "void o (0 | phago n)[void o 0[void]] o void");
    let b = w.file("b.brane", "phago n[void]");
    let c = w.file("c.brane", "exo n[void]");
    assert_eq!(
        stdout(&brane(&[&"normalize", &p(&a)])).trim(),
        "phago n[void]"
    );
    assert_eq!(code(&brane(&[&"equiv", &p(&a), &p(&b)])), 0);
    let o = brane(&[&"--format", &"jsonl", &"equiv", &p(&a), &p(&c)]);
    assert_eq!(code(&o), 1);
    assert_eq!(jsonl(&o)[0]["congruent"], false);
}

#[test]
fn steps_filters_by_family_and_label() {
    let w = Workspace::new();
    let s = w.file("s.brane", "phago n[void] o phago m[void] o exo n[void]");
    let all = jsonl(&brane(&[&"--format", &"jsonl", &"steps", &p(&s)]));
    assert_eq!(all.len(), 3);
    let phago = jsonl(&brane(&[
        &"--format",
        &"jsonl",
        &"steps",
        &p(&s),
        &"--label",
        &"phago",
    ]));
    assert_eq!(phago.len(), 2);
    let exact = jsonl(&brane(&[
        &"--format",
        &"jsonl",
        &"steps",
        &p(&s),
        &"--label",
        &"phago m",
    ]));
    assert_eq!(exact.len(), 1);
    let tree = exact[0]["derivation"].as_str().unwrap();
    assert!(tree.ends_with("phago(phago-pref)))"), "{tree}");
}

#[test]
fn rates_and_measure() {
    let w = Workspace::new();
    let s = w.file("s.brane", "pino n{0} | pino n{0}[void]");
    let r = w.file("r.cfg", "# pino rate\npino n = 3/2\n");
    let rows = jsonl(&brane(&[
        &"--format",
        &"jsonl",
        &"rates",
        &p(&s),
        &"--rates",
        &p(&r),
    ]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["rate"], "3");
    assert_eq!(rows[0]["target"], "pino n{0}[void]");
    let set = w.file("set.txt", "pino n{0}[0[void]]\nexo n[void]\n");
    let o = brane(&[
        &"measure",
        &p(&s),
        &"--rates",
        &p(&r),
        &"--set",
        &p(&set),
        &"--label",
        &"id",
    ]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn bisim_modes_disagree_on_duplicated_pino() {
    let w = Workspace::new();
    let a = w.file("a.brane", "pino n{0} | pino n{0}[void]");
    let b = w.file("b.brane", "pino n{0}.pino n{0}[void]");
    let r = w.file("r.cfg", "pino n = 2");
    assert_eq!(
        code(&brane(&[&"bisim", &p(&a), &p(&b), &"--mode", &"strong"])),
        0
    );
    let o = brane(&[
        &"--format",
        &"jsonl",
        &"bisim",
        &p(&a),
        &p(&b),
        &"--mode",
        &"stochastic",
        &"--rates",
        &p(&r),
    ]);
    assert_eq!(code(&o), 1);
    let v = &jsonl(&o)[0];
    assert_eq!(v["verdict"], "Distinguished");
    assert_eq!(v["via"][0], "pino n");
    assert_eq!(v["rates"], serde_json::json!(["4", "2"]));
}

#[test]
fn bisim_accepts_an_instantiation_file() {
    let w = Workspace::new();
    let a = w.file("a.brane", "phago n[void]");
    let b = w.file("b.brane", "phago n.exo m[void]");
    let fam = w.file("fam.txt", "mem: coexo m\nsys: void\n");
    let o = brane(&[
        &"bisim",
        &p(&a),
        &p(&b),
        &"--mode",
        &"strong",
        &"--insts",
        &p(&fam),
    ]);
    assert_eq!(code(&o), 1);
    let bad = w.file("bad.txt", "membrane: 0\n");
    assert_eq!(
        code(&brane(&[
            &"bisim",
            &p(&a),
            &p(&b),
            &"--mode",
            &"strong",
            &"--insts",
            &p(&bad)
        ])),
        2
    );
}

#[test]
fn export_writes_state_and_transition_files() {
    let w = Workspace::new();
    let s = w.file("s.brane", "phago n.exo k[void] o cophago n{0}.exo m[void]");
    let r = w.file("r.cfg", "phago n = 2\ndefault = 1\n");
    let prefix = w.path("chain");
    let o = brane(&[&"export", &p(&s), &"--rates", &p(&r), &"--out", &p(&prefix)]);
    assert_eq!(code(&o), 0);
    let tra = std::fs::read_to_string(prefix.with_extension("tra")).unwrap();
    assert_eq!(tra, "2 1\n0 1 2\n");
    let sta = std::fs::read_to_string(prefix.with_extension("sta")).unwrap();
    assert_eq!(sta.lines().count(), 2);
    assert!(sta.starts_with("0 "));
}

#[test]
fn state_budget_comes_from_the_environment() {
    let w = Workspace::new();
    let s = w.file("s.brane", "pino n{0}.pino n{0}[void]");
    let r = w.file("r.cfg", "default = 1");
    let out = w.path("x");
    let o = Command::new(env!("CARGO_BIN_EXE_brane"))
        .arg("export")
        .arg(&s)
        .arg("--rates")
        .arg(&r)
        .arg("--out")
        .arg(&out)
        .env("BRANE_STATE_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert_eq!(
        code(&brane(&[
            &"export",
            &p(&s),
            &"--rates",
            &p(&r),
            &"--out",
            &p(&out)
        ])),
        0
    );
}

#[test]
fn simulate_is_reproducible() {
    let w = Workspace::new();
    let s = w.file("s.brane", "pino n{0}.pino n{0}.pino n{0}[void]");
    let r = w.file("r.cfg", "pino n = 1");
    let run = |seed: &str| {
        brane(&[
            &"simulate",
            &p(&s),
            &"--rates",
            &p(&r),
            &"--seed",
            &seed,
            &"--tmax",
            &"50",
            &"--runs",
            &"3",
        ])
    };
    let (a, b) = (run("9"), run("9"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run("10").stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("# algorithm: gillespie-direct/xoshiro256++")
    );
    assert_eq!(lines.next(), Some("run,seed,time,state"));
    assert_eq!(text.lines().filter(|l| l.starts_with("2,11,")).count(), 4);
    let rows = jsonl(&brane(&[
        &"--format",
        &"jsonl",
        &"simulate",
        &p(&s),
        &"--rates",
        &p(&r),
        &"--seed",
        &"9",
        &"--tmax",
        &"50",
    ]));
    assert_eq!(rows.len(), 4);
}
