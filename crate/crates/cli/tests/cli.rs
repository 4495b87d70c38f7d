use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn treegrow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treegrow")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treegrow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn grow_is_deterministic_and_trace_validates() {
    let (a, b) = (scratch("a.jsonl"), scratch("b.jsonl"));
    for out in [&a, &b] {
        let run = treegrow(&["grow", "--model", "sg", "--w", "ones", "--n", "12", "--seed", "7", "-q", "--out", path(out)]);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 12);

    let check = treegrow(&["check-trace", path(&a)]);
    assert_eq!(check.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&check.stdout).contains("\"final_size\":12"));
}

#[test]
fn different_seeds_give_different_traces() {
    let (a, b) = (scratch("s1.jsonl"), scratch("s2.jsonl"));
    treegrow(&["grow", "--w", "ones", "--n", "15", "--seed", "1", "-q", "--out", path(&a)]);
    treegrow(&["grow", "--w", "ones", "--n", "15", "--seed", "2", "-q", "--out", path(&b)]);
    assert_ne!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
}

#[test]
fn arithmetic_and_subtree_traces_validate() {
    let arith = scratch("arith.jsonl");
    let run = treegrow(&["grow", "--model", "sg-arith", "--w", "1,0,1", "--d", "2", "--n", "11", "-q", "--out", path(&arith)]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(treegrow(&["check-trace", path(&arith)]).status.code(), Some(0));

    let sub = scratch("sub.jsonl");
    let dot = scratch("sub.dot");
    let run = treegrow(&[
        "grow", "--model", "subtree", "--theta", "2,1,1", "--n", "9", "-q", "--out", path(&sub), "--dot", path(&dot),
    ]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(treegrow(&["check-trace", path(&sub)]).status.code(), Some(0));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn corrupted_trace_is_rejected() {
    let good = scratch("good.jsonl");
    treegrow(&["grow", "--w", "1,2,1", "--n", "6", "-q", "--out", path(&good)]);
    let text = std::fs::read_to_string(&good).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(2, 3);
    let bad = scratch("bad.jsonl");
    std::fs::write(&bad, lines.join("\n")).unwrap();
    let check = treegrow(&["check-trace", path(&bad)]);
    assert_eq!(check.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&check.stderr).contains("invalid trace"));
}

#[test]
fn non_log_concave_weights_are_refused() {
    let out = scratch("refused.jsonl");
    let run = treegrow(&["grow", "--w", "2/5,1/5,2/5", "--n", "4", "--out", path(&out)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("index 1"));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(treegrow(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(treegrow(&["grow", "--w", "ones"]).status.code(), Some(1));
    assert_eq!(treegrow(&["grow", "--model", "sg", "--w", "ones", "--d", "2", "--n", "5"]).status.code(), Some(1));
    assert_eq!(treegrow(&["grow", "--model", "subtree", "--n", "5"]).status.code(), Some(1));
    assert_eq!(treegrow(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = scratch("run.toml");
    let out = scratch("from-config.jsonl");
    std::fs::write(&cfg, format!("model = \"sg\"\nw = [1, \"1/2\"]\nn = 5\nseed = 3\nout = \"{}\"\n", path(&out))).unwrap();
    let run = treegrow(&["--config", path(&cfg), "grow", "-q"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let header = std::fs::read_to_string(&out).unwrap();
    assert!(header.lines().next().unwrap().contains("\"seed\":3"));
    assert_eq!(header.lines().count(), 1 + 5);

    let run = treegrow(&["--config", path(&cfg), "grow", "-q", "--n", "7", "--seed", "9"]);
    assert_eq!(run.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().contains("\"seed\":9"));
    assert_eq!(text.lines().count(), 1 + 7);

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "colour = 1\n").unwrap();
    assert_eq!(treegrow(&["--config", path(&bad), "grow"]).status.code(), Some(1));
}

#[test]
fn enumerate_counts() {
    let count = |args: &[&str]| {
        let run = treegrow(args);
        String::from_utf8_lossy(&run.stdout).lines().last().unwrap().to_string()
    };
    assert_eq!(count(&["enumerate", "--plane-trees", "4"]), "count: 5");
    assert_eq!(count(&["enumerate", "--plane-trees", "6"]), "count: 42");
    assert_eq!(count(&["enumerate", "--subtrees", "3", "--dmax", "2"]), "count: 5");
    assert_eq!(count(&["enumerate", "--arith-trees", "7", "--d", "2"]), "count: 12");
}

#[test]
fn exact_suites_pass_from_the_command_line() {
    for args in [
        vec!["verify", "--suite", "tables", "--w", "1,3,3,1"],
        vec!["verify", "--suite", "kernel-interchange", "--w", "ones", "--n-max", "5"],
        vec!["verify", "--suite", "subset-coupling"],
        vec!["verify", "--suite", "bijection", "--samples", "50"],
    ] {
        let run = treegrow(&args);
        assert_eq!(run.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&run.stdout));
        let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
        assert_eq!(report["passed"], true);
    }
}
