use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_collapsible");

const TILING: &str = "tiles I X F\ninit I\nfinal F\nh I X\nh X X\nh X F\nv I X\nv X X\nv X F\n";

fn scratch(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("collapsible-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn apply_collapse_on_example() {
    let f = scratch("example.stack", "[[[a(3,1) b(1,0)]1]2 [[c(2,1)]1 [d(1,1) e(1,0)]1]2]3\n");
    let o = run(&["apply", "--op", "collapse3", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "[[[c(2,1)]1 [d(1,1) e(1,0)]1]2]3");
    let o = run(&["apply", "--op", "pop1", f.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "[[[b(1,0)]1]2 [[c(2,1)]1 [d(1,1) e(1,0)]1]2]3");
}

#[test]
fn undefined_operation_exits_one() {
    let o = run_stdin(&["apply", "--op", "pop1", "-"], "[]1\n");
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "undefined");
}

#[test]
fn malformed_input_exits_two() {
    let o = run_stdin(&["validate-stack", "-"], "[[a(1,0)]1\n");
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = run(&["apply", "--op", "push9", "/nonexistent/file"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn validate_reports_bad_links() {
    let o = run_stdin(&["validate-stack", "-"], "[[a(2,5)]1]2\n");
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("invalid"));
    let o = run_stdin(&["validate-stack", "-"], "[[a(2,0)]1]2\n");
    assert_eq!(code(&o), 0);
}

#[test]
fn reduction_witness_round_trip() {
    let inst = scratch("small.tiling", TILING);
    let o = run(&["tiling", "solve", "--instance", inst.to_str().unwrap(), "--n", "1"]);
    assert_eq!(code(&o), 0);
    let sol = scratch("small.solution", &stdout(&o));
    let o = run(&[
        "tiling",
        "check",
        "--instance",
        inst.to_str().unwrap(),
        "--n",
        "1",
        "--solution",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);

    let o = run(&["reduce", "--instance", inst.to_str().unwrap(), "--n", "1"]);
    assert_eq!(code(&o), 0);
    let automaton = scratch("small.automaton", &stdout(&o));
    let initial = String::from_utf8_lossy(&o.stderr)
        .trim()
        .strip_prefix("initial state: ")
        .unwrap()
        .to_string();

    let o = run(&[
        "encode-witness",
        "--instance",
        inst.to_str().unwrap(),
        "--n",
        "1",
        "--solution",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let stack = scratch("small.stack", &stdout(&o));
    let cert = scratch("small.run", "");

    let o = run(&[
        "member",
        "--automaton",
        automaton.to_str().unwrap(),
        "--state",
        &initial,
        "--stack",
        stack.to_str().unwrap(),
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "accept");

    let o = run(&[
        "check-run",
        "--automaton",
        automaton.to_str().unwrap(),
        "--stack",
        stack.to_str().unwrap(),
        "--run",
        cert.to_str().unwrap(),
        "--state",
        &initial,
    ]);
    assert_eq!(code(&o), 0);

    let o = run(&[
        "member",
        "--automaton",
        automaton.to_str().unwrap(),
        "--state",
        "nope",
        "--stack",
        stack.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unsolvable_tiling_exits_one() {
    let inst = scratch("unsolvable.tiling", &TILING.replace("v X F\n", ""));
    let o = run(&["tiling", "solve", "--instance", inst.to_str().unwrap(), "--n", "1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "no-solution");
}

#[test]
fn emptiness_without_initial_state() {
    let a = scratch("tiny.automaton", "order 2\nalphabet a\nstates2 p\nstates1 q\n");
    let path = a.to_str().unwrap();
    let o = run(&["empty", "--automaton", path, "--max-atoms", "2", "--max-width", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "[]2");

    let o = run(&["empty", "--automaton", path, "--state", "p", "--max-atoms", "2", "--max-width", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("no-witness-within-bounds"));

    let o = run(&[
        "empty", "--automaton", path, "--state", "p", "--max-atoms", "6", "--max-width", "3", "--budget", "5",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn cpds_step_lists_successors() {
    let sys = scratch("sys.cpds", "order 2\nalphabet a b\ncontrols p q\nrule p a push2 q\nrule p a rew:b p\n");
    let o = run_stdin(&["cpds", "step", "--system", sys.to_str().unwrap(), "--config", "-"], "p [[a(1,0)]1]2\n");
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(lines.contains(&"q [[a(1,0)]1 [a(1,0)]1]2".to_string()), "{lines:?}");
    assert!(lines.contains(&"p [[b(1,0)]1]2".to_string()), "{lines:?}");
    assert!(lines.contains(&"p [[a(1,0)]1]2".to_string()), "{lines:?}");
}
