use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclic-hom"))
}

fn spec_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], input: Option<&tempfile::NamedTempFile>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(f) = input {
        cmd.arg(f.path());
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const GROUND: &str = "[field]\nprime 5\n[algebra]\nkind ground\n";

#[test]
fn hc_of_ground_field_tsv() {
    let f = spec_file(GROUND);
    let o = run(&["hc", "--max-degree", "8", "--format", "tsv"], Some(&f));
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').take(3).collect::<Vec<_>>().join("\t")).collect();
    let expected: Vec<String> = (0..=8).map(|i| format!("HC\t{i}\t{}", 1 - i % 2)).collect();
    assert_eq!(lines, expected);
}

#[test]
fn text_lines_carry_trusted_bound() {
    let f = spec_file(GROUND);
    let o = run(&["hh", "--max-degree", "3"], Some(&f));
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().filter(|l| l.starts_with("HH")) {
        assert!(line.ends_with("(trusted through degree 3)"), "{line}");
    }
}

#[test]
fn hodge_verdict_on_split_algebra() {
    let f = spec_file("[field]\nprime 5\n[algebra]\nkind product\ncomponent ground\ncomponent ground\n");
    let o = run(&["hodge", "--max-degree", "8", "--format", "tsv"], Some(&f));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "VERDICT\tdegenerate\t8"));
}

#[test]
fn witt_verdict() {
    let o = run(&["witt", "-p", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "VERDICT w2-iso found"));
}

#[test]
fn parse_errors_report_position() {
    let f = spec_file("[field]\nprime 5\n[algebra]\nkind matrix\nsize two\n");
    let o = run(&["hh"], Some(&f));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 5, column 6"), "{err}");
}

#[test]
fn missing_prime_and_unknown_flags_are_input_errors() {
    assert_eq!(run(&["cube"], None).status.code(), Some(2));
    assert_eq!(run(&["hh", "--no-such-flag"], None).status.code(), Some(2));
    assert_eq!(run(&["witt", "-p", "4"], None).status.code(), Some(2));
}

#[test]
fn budget_exceeded_exits_three() {
    assert_eq!(run(&["cube", "-p", "3", "--max-degree", "4"], None).status.code(), Some(3));
    let f = spec_file("[field]\nprime 3\n[algebra]\nkind matrix\nsize 3\n");
    assert_eq!(run(&["hc", "--max-degree", "8", "--budget", "1000"], Some(&f)).status.code(), Some(3));
}

#[test]
fn cube_and_cocycles() {
    let o = run(&["cube", "-p", "3", "--max-degree", "3", "--format", "tsv"], None);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("QPRIME\t3\t6560\n"));
    assert!(out.contains("H\t2\t0\t2\n"));
    let o = run(&["cocycles", "-p", "2", "--dim", "2", "--format", "tsv"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("VERDICT\tcocycles\tmatch"));
}

#[test]
fn tate_of_jordan_blocks() {
    let f = spec_file("[field]\nprime 3\n[module]\njordan 1 3 2\n");
    let o = run(&["tate", "--max-degree", "2", "--format", "tsv"], Some(&f));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for i in -2..=2 {
        assert!(out.contains(&format!("TATE\t{i}\t2\n")), "{out}");
    }
    assert!(out.contains("VERDICT\tfree\tno"));
}

#[test]
fn connes_and_lift_on_dual_numbers() {
    let f = spec_file("[field]\nprime 2\n[algebra]\nkind truncated-polynomial\ndegree 2\n");
    let o = run(&["connes", "--max-degree", "5", "--format", "tsv"], Some(&f));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("VERDICT\tconnes\texact"));
    let o = run(&["w2lift", "--format", "tsv"], Some(&f));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("VERDICT\tw2-obstruction\tvanishes"));
}

#[test]
fn reports_are_byte_identical() {
    let f = spec_file("[field]\nprime 3\n[algebra]\nkind matrix\nsize 2\n");
    let a = run(&["hp", "--max-degree", "4"], Some(&f));
    let b = run(&["hp", "--max-degree", "4"], Some(&f));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
