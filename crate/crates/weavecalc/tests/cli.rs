//! End-to-end runs of the shipped binary. Every invocation shown in the
//! README is replayed here and its output compared byte for byte.

use std::io::Write;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_weavecalc");

fn run(args: &[&str], stdin: Option<&str>, dir: Option<&std::path::Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    // keep the environment-driven q default out of every test that does not
    // exercise it
    cmd.env_remove("WEAVECALC_Q");
    if let Some(d) = dir {
        cmd.current_dir(d);
    }
    cmd.stdin(Stdio::piped());
    cmd.stdout(Stdio::piped());
    cmd.stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn weavecalc");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("wait for weavecalc")
}

fn stdout_of(out: &Output) -> &str {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::str::from_utf8(&out.stdout).expect("utf-8 stdout")
}

#[test]
fn count_theta_total() {
    let out = run(&["count", "--graph", "theta", "--q", "3"], None, None);
    assert_eq!(stdout_of(&out), "   q  total\n   3     24\n");
}

#[test]
fn count_tetra_framed() {
    let out = run(
        &["count", "--graph", "tetra", "--q", "2,3,4,5", "--framed"],
        None,
        None,
    );
    assert_eq!(
        stdout_of(&out),
        "   q  framed\n   2       0\n   3       1\n   4       2\n   5       3\n"
    );
}

#[test]
fn count_theta_enumerate() {
    let out = run(
        &[
            "count",
            "--graph",
            "theta",
            "--q",
            "3",
            "--framed",
            "--enumerate",
            "2",
        ],
        None,
        None,
    );
    assert_eq!(
        stdout_of(&out),
        "   q  framed\n   3       1\nsolutions at q = 3 (first 2):\n  [0, 1, inf]\n"
    );
}

#[test]
fn count_q_from_environment() {
    let mut cmd = Command::new(BIN);
    cmd.args(["count", "--graph", "tetra", "--framed"]);
    cmd.env("WEAVECALC_Q", "7,9");
    let out = cmd.output().expect("spawn weavecalc");
    assert_eq!(
        stdout_of(&out),
        "   q  framed\n   7       5\n   9       7\n"
    );
}

#[test]
fn chromatic_tetra() {
    let out = run(&["chromatic", "--graph", "tetra", "--q", "5"], None, None);
    assert_eq!(
        stdout_of(&out),
        "P(t) = t^4 - 6*t^3 + 11*t^2 - 6*t\nP(6) = 360   # q = 5\n"
    );
}

#[test]
fn move_triangle_on_theta() {
    let out = run(&["move", "--graph", "theta", "--triangle", "0"], None, None);
    let expected = "\
# triangle insertion (Clifford summand): framed count factor q-2
# count factor: q - 2
# genus change: +1
darts 12
alpha: 0 3
alpha: 1 4
alpha: 2 5
alpha: 6 7
alpha: 8 9
alpha: 10 11
sigma: 0 6 11
sigma: 1 8 7
sigma: 2 10 9
sigma: 3 5 4
";
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn build_lambda_piped_into_count() {
    let built = run(&["build-lambda", "--g", "1", "--k", "1"], None, None);
    let graph = stdout_of(&built).to_owned();
    let out = run(
        &["count", "--graph", "-", "--framed", "--q", "2,3,4,5"],
        Some(&graph),
        None,
    );
    assert_eq!(
        stdout_of(&out),
        "   q  framed\n   2       0\n   3       1\n   4       2\n   5       3\n"
    );
}

#[test]
fn obstruct_cobordism_between_lambdas() {
    let dir = tempfile::tempdir().unwrap();
    for (g, k, name) in [(2, 1, "l21.graph"), (2, 2, "l22.graph")] {
        let built = run(
            &["build-lambda", "--g", &g.to_string(), "--k", &k.to_string()],
            None,
            None,
        );
        std::fs::write(dir.path().join(name), stdout_of(&built)).unwrap();
    }
    let out = run(
        &[
            "obstruct",
            "cobordism",
            "--minus",
            "l21.graph",
            "--plus",
            "l22.graph",
            "--q",
            "5",
            "--h1-surjective",
        ],
        None,
        Some(dir.path()),
    );
    assert_eq!(
        stdout_of(&out),
        "obstructed at q = 5: counts 12 vs 9 (a Maslov-0 cobordism with \
         surjective restriction on H^1 embeds the concave-end moduli into the \
         convex-end moduli, so counts cannot drop)\n"
    );

    // same invocation with --fail-on-obstructed must exit 1
    let out = run(
        &[
            "obstruct",
            "cobordism",
            "--minus",
            "l21.graph",
            "--plus",
            "l22.graph",
            "--q",
            "5",
            "--h1-surjective",
            "--fail-on-obstructed",
        ],
        None,
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn obstruct_filling_records() {
    let dir = tempfile::tempdir().unwrap();
    let built = run(&["build-lambda", "--g", "1", "--k", "1"], None, None);
    std::fs::write(dir.path().join("l11.graph"), stdout_of(&built)).unwrap();
    let out = run(
        &[
            "obstruct", "filling", "--graph", "l11.graph", "--q", "2", "--records",
        ],
        None,
        Some(dir.path()),
    );
    let expected = "\
#weavecalc records 1
command=obstruct-filling
status=obstructed
q=2 count_minus=0 count_plus=0
rule=a filling would quantize to a simple sheaf over every coefficient field, so a vanishing framed count at any q rules it out
";
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn obstruct_les() {
    let out = run(
        &[
            "obstruct",
            "les",
            "--chi-l",
            "-2",
            "--chi-lminus",
            "0",
            "--rf",
            "1",
            "--rg",
            "1",
            "--chi-minus",
            "0",
        ],
        None,
        None,
    );
    assert_eq!(stdout_of(&out), "chi_plus = -2\n");
}

const PAIR_FILE: &str = "\
complex A
p 5
dim 0 1
end

complex B
p 5
dim 0 2
end

map r A B
f 0
1
0
end
";

#[test]
fn homalg_on_pair_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pair.txt"), PAIR_FILE).unwrap();

    let out = run(
        &["homalg", "ranks", "--file", "pair.txt", "--name", "B"],
        None,
        Some(dir.path()),
    );
    assert_eq!(stdout_of(&out), "complex B over F_5\nH^0 rank 2\n");

    let out = run(
        &["homalg", "quasi-iso", "--file", "pair.txt", "--map", "r"],
        None,
        Some(dir.path()),
    );
    assert_eq!(stdout_of(&out), "not quasi-iso\n");

    let out = run(
        &["homalg", "cone", "--file", "pair.txt", "--map", "r"],
        None,
        Some(dir.path()),
    );
    let expected = "\
complex cone
p 5
dim 0 1
dim 1 2
d 0
1
0
end
# H^1 rank 1
";
    assert_eq!(stdout_of(&out), expected);
}

const DATUM_FILE: &str = "\
complex A
p 5
dim 0 1
end

complex B
p 5
dim 0 2
end

map r A B
f 0
1
0
end

map s B A
f 0
1 0
end

complex F
p 5
dim 0 1
end

datum
k 1
stalks A B
transition r
retraction s
wall F F
end
";

const GLUING_FILE: &str = "\
complex F
p 5
dim 0 1
end
map g F F
f 0
2
end
";

#[test]
fn cobordism_act_one_handle() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("datum.txt"), DATUM_FILE).unwrap();
    std::fs::write(dir.path().join("gluing.txt"), GLUING_FILE).unwrap();
    let out = run(
        &[
            "cobordism-act",
            "--datum",
            "datum.txt",
            "--gluing",
            "gluing.txt",
            "--records",
        ],
        None,
        Some(dir.path()),
    );
    let expected = "\
#weavecalc records 1
command=cobordism-act k=1
microstalk_ranks=H^0=1
extends=true
reason=wall complexes on both sphere components have equal homology ranks
attached=true
";
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn selftest_seed_zero() {
    let out = run(&["selftest", "--seed", "0", "--cases", "5"], None, None);
    let expected = "\
ok coloring-vs-chromatic (5 maps)
ok chromatic-vs-brute-force (5 graphs)
ok triangle-factor (5 hosts)
ok stalk-splitting-ranks (5 data)
selftest passed (seed 0)
";
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn graph_format_block_parses_as_theta() {
    // the text-format example in the README is the theta graph
    let theta_text = "\
darts 6
alpha: 0 3
alpha: 1 4
alpha: 2 5
sigma: 0 1 2
sigma: 3 5 4
";
    let out = run(
        &["count", "--graph", "-", "--q", "3"],
        Some(theta_text),
        None,
    );
    assert_eq!(stdout_of(&out), "   q  total\n   3     24\n");
}

#[test]
fn errors_exit_with_code_two() {
    let out = run(&["count", "--graph", "no-such-file.graph"], None, None);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}
