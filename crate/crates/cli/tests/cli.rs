use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const DIAMOND: &str = "c diamond\np cprsnp 3 3\nr 1\nt 3\na 1 2 1 1\na 1 3 2 1\na 2 3 1 1\nb 1 0\n";

fn cprsnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cprsnp")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("diamond.txt");
    fs::write(&inst, DIAMOND).unwrap();
    for f in ["cutset", "flow", "bilevel"] {
        let design = dir.path().join(format!("{f}.design"));
        let o = cprsnp(&["solve", "--instance", path(&inst), "--formulation", f, "--design-out", path(&design)]);
        assert_eq!(code(&o), 0, "{f}: {}", stdout(&o));
        assert!(stdout(&o).contains("status=optimal"), "{}", stdout(&o));
        let text = fs::read_to_string(&design).unwrap();
        assert_eq!(text, "c cost 4\ny 1 2\ny 1 3\ny 2 3\n");
        let v = cprsnp(&["verify", "--instance", path(&inst), "--design", path(&design)]);
        assert_eq!(code(&v), 0);
        assert!(stdout(&v).contains("survivable"));
    }
}

#[test]
fn verify_rejects_a_fragile_design() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("diamond.txt");
    let design = dir.path().join("d.txt");
    fs::write(&inst, DIAMOND).unwrap();
    fs::write(&design, "y 1 3\n").unwrap();
    let o = cprsnp(&["verify", "--instance", path(&inst), "--design", path(&design)]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("not survivable: failing (1,3)"), "{}", stdout(&o));
}

#[test]
fn infeasible_instance_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tight.txt");
    fs::write(&inst, DIAMOND.replace("b 1 0", "b 2 0")).unwrap();
    for f in ["cutset", "flow", "bilevel"] {
        let o = cprsnp(&["solve", "--instance", path(&inst), "--formulation", f]);
        assert_eq!(code(&o), 3, "{f}");
    }
}

#[test]
fn input_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "p cprsnp 2 1\nr 1\nt 2\na 1 2 x 1\nb 0 0\n").unwrap();
    let missing = dir.path().join("missing.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--instance", path(&bad), "--formulation", "flow"],
        vec!["solve", "--instance", path(&missing), "--formulation", "flow"],
        vec!["solve", "--instance", path(&bad), "--formulation", "magic"],
        vec!["solve", "--instance", path(&bad), "--formulation", "flow", "--time-limit", "-1"],
        vec!["gen", "--nodes", "3", "--terminals", "3", "--arcs", "4", "--capacities", "uniform", "--out", "x"],
        vec!["bench", "--dir", path(&missing), "--out", "x.csv"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = cprsnp(&args);
        assert_eq!(code(&o), 4, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = cprsnp(&["solve", "--instance", path(&bad), "--formulation", "flow"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn timeout_with_incumbent_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("big.txt");
    let g = cprsnp(&[
        "gen", "--nodes", "20", "--terminals", "5", "--arcs", "90", "--capacities", "uniform", "--seed", "2", "--k", "3",
        "--out", path(&inst),
    ]);
    assert_eq!(code(&g), 0);
    let design = dir.path().join("d.txt");
    let o = cprsnp(&[
        "solve", "--instance", path(&inst), "--formulation", "cutset", "--time-limit", "0.5", "--design-out", path(&design),
    ]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    // the incumbent reported on timeout is survivable
    let v = cprsnp(&["verify", "--instance", path(&inst), "--design", path(&design)]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("g{i}.txt"));
            let o = cprsnp(&[
                "gen", "--nodes", "12", "--terminals", "4", "--arcs", "30", "--capacities", "random", "--seed", "9",
                "--out", path(&out),
            ]);
            assert_eq!(code(&o), 0);
            fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert!(outs[0].contains("p cprsnp 12 30"));
}

#[test]
fn bench_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("instances");
    fs::create_dir(&inputs).unwrap();
    fs::write(inputs.join("diamond.txt"), DIAMOND).unwrap();
    let csvs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("r{i}.csv"));
            let o = cprsnp(&[
                "bench", "--dir", path(&inputs), "--k-min", "1", "--k-max", "1", "--kp-min", "0", "--kp-max", "1",
                "--no-times", "--out", path(&out),
            ]);
            assert_eq!(code(&o), 0);
            assert!(stdout(&o).contains("Cut-set"));
            fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(csvs[0], csvs[1]);
    let lines: Vec<&str> = csvs[0].lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "3-1-3,1,0,-,0,-,0,-,0,optimal,4,optimal,4,optimal,4");
    assert_eq!(lines[2], "3-1-3,1,1,-,0,-,0,-,0,optimal,2,optimal,2,optimal,2");
}

#[test]
fn reversed_arcs_flow_towards_the_root() {
    // the diamond written backwards: terminal 1, root 3
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("rev.txt");
    fs::write(&inst, "p cprsnp 3 3\nr 3\nt 1\na 2 1 1 1\na 3 1 2 1\na 3 2 1 1\nb 1 1\n").unwrap();
    let o = cprsnp(&["solve", "--instance", path(&inst), "--formulation", "bilevel", "--reverse-arcs"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    let o = cprsnp(&["solve", "--instance", path(&inst), "--formulation", "bilevel"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
