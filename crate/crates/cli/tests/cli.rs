use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qmatroid"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn qmatroid")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn qmatroid");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn machine_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn write_spread(dir: &Path, n: &str, k: &str) -> std::path::PathBuf {
    let path = dir.join(format!("spread_{n}_{k}.qd"));
    let o = run(&["spread", "--n", n, "--k", k, "--q", "2", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    path
}

#[test]
fn tables_contain_every_entry() {
    let o = run(&["tables"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for entry in [
        "2-(13,4,692912;2)",
        "2-(13,4,5115;2)",
        "2-(13,9,6347715;2)",
        "2-(7,4,80;2)",
        "2-(7,4,75;2)",
        "2-(7,3,15;2)",
        "2-(7,4,810;3)",
        "2-(7,4,400;3)",
        "2-(7,3,40;3)",
        "2-(7,4,4352;4)",
        "2-(7,4,1445;4)",
        "2-(7,3,85;4)",
        "2-(7,4,16250;5)",
        "2-(7,4,4056;5)",
        "2-(7,3,156;5)",
    ] {
        assert!(text.contains(entry), "{entry}");
    }
}

#[test]
fn calculators_print_exact_integers() {
    let o = run(&["qbinom", "13", "2", "--q", "2", "--machine"]);
    assert_eq!(stdout(&o), "[13,2]_2=11180715\n");
    let o = run(&["params", "--t", "2", "--n", "7", "--k", "3", "--q", "2", "--machine"]);
    let text = stdout(&o);
    assert_eq!(machine_value(&text, "blocks"), "381");
    assert_eq!(machine_value(&text, "derived.independent_t1"), "2-(7,3,30;2) blocks=11430");
    let o = run(&["admissible", "--sts", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["admissible", "--t", "2", "--n", "7", "--k", "3", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["admissible", "--t", "2", "--n", "8", "--k", "3", "--q", "2", "--machine"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(machine_value(&stdout(&o), "first_failure"), "lambda_0 = 10795/7");
}

#[test]
fn spread_pipe_into_derive() {
    let spread = run(&["spread", "--n", "4", "--k", "2", "--q", "2"]);
    assert!(spread.status.success());
    let o = run_stdin(&["derive", "--kind", "independent", "--machine"], &spread.stdout);
    assert_eq!(o.status.code(), Some(0));
    let report = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(machine_value(&report, "params"), "1-(4,2,6;2)");
    assert_eq!(machine_value(&report, "blocks"), "30");
    assert_eq!(machine_value(&report, "verified"), "pass");
    let design = stdout(&o);
    assert!(design.starts_with("QDESIGN v1\nq=2 n=4 t=1 k=2 lambda=6\n# derived kind=independent_t1 from="));
    assert_eq!(design.lines().count(), 33);
    // the derived file verifies on its own
    let v = run_stdin(&["verify"], &o.stdout);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn derive_circuit_t2_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_spread(dir.path(), "6", "3");
    let out = dir.path().join("c2.qd");
    let o = run(&["derive", "--kind", "circuit-t2", src.to_str().unwrap(), "-o", out.to_str().unwrap(), "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(machine_value(&text, "params"), "1-(6,3,56;2)");
    assert_eq!(machine_value(&text, "blocks"), "504");
    assert_eq!(machine_value(&text, "verified"), "pass");
    let first = fs::read(&out).unwrap();
    // byte-identical on a second run, whatever the worker count
    let o = run(&["--jobs", "1", "derive", "--kind", "circuit_t2", src.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn truncated_design_fails_verification() {
    let spread = run(&["spread", "--n", "4", "--k", "2", "--q", "2"]);
    let text = stdout(&spread);
    let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
    let o = run_stdin(&["verify", "--machine"], truncated.as_bytes());
    assert_eq!(o.status.code(), Some(1));
    let report = stdout(&o);
    assert_eq!(machine_value(&report, "verified"), "fail");
    assert_eq!(machine_value(&report, "failing_count"), "0");
    let missing = machine_value(&report, "failing_t_space");
    assert_eq!(missing.len(), 4);
    // as a Steiner system source, the same file is a verification failure too
    let o = run_stdin(&["derive", "--kind", "circuit_t1"], truncated.as_bytes());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["qbinom", "4", "2", "--q", "6"]).status.code(), Some(2));
    assert_eq!(run(&["spread", "--n", "5", "--k", "2", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["--jobs", "zero", "tables"]).status.code(), Some(2));
    assert_eq!(run_stdin(&["verify"], b"QDESIGN v7\n").status.code(), Some(2));
    assert_eq!(run(&["rank", "--matroid", "uniform:x", "--n", "3", "--q", "2", "100"]).status.code(), Some(2));
}

#[test]
fn matroid_commands() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_spread(dir.path(), "4", "2");
    let steiner = format!("steiner:{}", src.display());
    let o = run(&["axioms", "--matroid", &steiner, "--roundtrip", "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(machine_value(&text, "rank_axioms"), "pass");
    assert_eq!(machine_value(&text, "qpmd"), "yes");
    assert_eq!(machine_value(&text, "flat_dims_by_rank"), "0:0 1:2 2:4");
    assert_eq!(machine_value(&text, "roundtrip"), "pass");

    let o = run(&["rank", "--matroid", "uniform:2", "--n", "4", "--q", "2", "1000;0100;0010", "--machine"]);
    let text = stdout(&o);
    assert_eq!(machine_value(&text, "rank"), "2");
    assert_eq!(machine_value(&text, "circuit"), "yes");
    assert_eq!(machine_value(&text, "closure"), "1000;0100;0010;0001");

    let matrix = dir.path().join("g.qm");
    fs::write(&matrix, "QMATRIX v1\np=2 m=2 rows=2 cols=4\n01 00 10 11\n00 01 11 10\n").unwrap();
    let rep = format!("representable:{}", matrix.display());
    let o = run(&["axioms", "--matroid", &rep, "--machine"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = run(&["flats", "--matroid", &steiner]);
    assert!(o.status.success());
    let flats = stdout(&o);
    assert!(flats.starts_with("QFLATS v1\nq=2 n=4\n-\n"));
    assert_eq!(flats.lines().count(), 9);
    let o = run_stdin(&["flats", "--machine"], flats.as_bytes());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(machine_value(&text, "semimodular"), "pass");
    assert_eq!(machine_value(&text, "jordan_dedekind"), "pass");

    // dropping the full space breaks the intersection-closed axioms
    let broken: String = flats.lines().filter(|l| *l != "1000;0100;0010;0001").map(|l| format!("{l}\n")).collect();
    let o = run_stdin(&["flats"], broken.as_bytes());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn automorphisms_of_the_small_spread() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_spread(dir.path(), "4", "2");
    let o = run(&["aut", src.to_str().unwrap(), "--transfer", "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(machine_value(&text, "order"), "360");
    assert_eq!(machine_value(&text, "transfer.independent_t1"), "equal");
    assert_eq!(machine_value(&text, "transfer.circuit_t1"), "equal");
    assert_eq!(machine_value(&text, "transfer.supplementary"), "equal");
    let o = run(&["aut", src.to_str().unwrap(), "--machine"]);
    assert_eq!(machine_value(&stdout(&o), "gl_order"), "20160");
    let o = run(&["--max-group-order", "1000", "aut", src.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
