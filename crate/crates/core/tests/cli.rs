use std::path::PathBuf;

use vpc::cli::run_cli;

fn data(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(file)
        .to_string_lossy()
        .into_owned()
}

fn golden(file: &str) -> String {
    std::fs::read_to_string(data(file)).unwrap()
}

fn vpc(args: &[&str]) -> (i32, String, String) {
    vpc_with_input(args, "")
}

fn vpc_with_input(args: &[&str], input: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("vpc").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err, &mut input.as_bytes());
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn encode_and_decode_match_golden_files() {
    let (code, encoded, _) = vpc(&["encode", &data("counter.vpc")]);
    assert_eq!(code, 0);
    assert_eq!(encoded, golden("counter.code"));
    let (code, decoded, _) = vpc(&["decode", &data("counter.code")]);
    assert_eq!(code, 0);
    assert_eq!(decoded, golden("counter.decoded"));
}

#[test]
fn decoded_programs_reencode_to_the_same_code() {
    let dir = std::env::temp_dir().join(format!("vpc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("decoded.vpc");
    std::fs::write(&file, golden("counter.decoded")).unwrap();
    let (_, again, _) = vpc(&["encode", file.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(again, golden("counter.code"));
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["--seed", "3", "run", &data("counter.vpc"), "--steps", "8"];
    let (code, first, _) = vpc(&args);
    assert_eq!(code, 0);
    assert_eq!(first, golden("counter.trace"));
    assert_eq!(vpc(&args).1, first);
}

#[test]
fn bisim_exit_codes() {
    for line in golden("bisim_pairs.txt").lines() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (code, _, _) = vpc(&["bisim", &data(parts[0]), &data(parts[1])]);
        assert_eq!(code.to_string(), parts[2], "{line}");
    }
}

#[test]
fn truncated_graphs_point_to_the_stratified_check() {
    let (code, _, err) = vpc(&["bisim", &data("unbounded.vpc"), &data("unbounded.vpc")]);
    assert_eq!(code, 2);
    assert!(err.contains("strat-bisim"), "{err}");
    let (code, out, _) = vpc(&["--depth", "5", "strat-bisim", &data("unbounded.vpc"), &data("unbounded.vpc")]);
    assert_eq!((code, out.trim()), (0, "equivalent up to depth 5"));
}

// On a program with one choice per step the universal trace is the direct
// trace with the call steps inserted.
#[test]
fn universal_trace_replays_the_direct_trace() {
    let dir = std::env::temp_dir().join(format!("vpc-replay-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bounded.vpc");
    std::fs::write(&file, "def C(x0) = if x0 < 3 then 'n1(x0).C(x0 + 1)\nmain = C(0)\n").unwrap();
    let file = file.to_str().unwrap();
    let (_, direct, _) = vpc(&["run", file]);
    let (_, code, _) = vpc(&["encode", file]);
    let (status, engine, _) = vpc(&["--sig", "i=0;g=n1", "universal", "--code", code.trim(), "run"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(status, 0);
    let labels = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.ends_with("tau (defcall)"))
            .map(|l| l.split_once(": ").map_or(l, |(_, a)| a).to_string())
            .collect()
    };
    assert_eq!(labels(&direct), ["out n1 0", "out n1 1", "out n1 2", "halted"]);
    assert_eq!(labels(&engine), labels(&direct));
}

#[test]
fn universal_dump_accepts_the_mode_after_a_code() {
    let (_, code, _) = vpc(&["encode", &data("tau_loop.vpc")]);
    let (status, out, _) = vpc(&["--sig", "i=1;g=", "universal", "--code", code.trim(), "dump"]);
    assert_eq!(status, 0);
    assert!(out.starts_with("states 2 edges 2"), "{out}");
    assert!(out.contains("div:"));
}

#[test]
fn normalize_and_smn() {
    let (code, out, _) = vpc(&["--sig", "i=0;g=n5", "--dialect", "bang", "normalize", "106"]);
    assert_eq!((code, out.trim()), (0, "8"));
    let (code, _, err) = vpc(&["--sig", "i=0;g=n1", "--dialect", "bang", "normalize", "106"]);
    assert_eq!(code, 1, "{err}");
    let (code, out, _) = vpc(&["--sig", "i=0;g=n1", "smn", &data("counter.vpc"), "--def", "C", "--fix", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn higher_order_translation_prints_a_seed() {
    let dir = std::env::temp_dir().join(format!("vpc-ho-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("ho.vpc");
    std::fs::write(&file, "'n1(\\g. 'g(7).0).0 | n1(X:<0,1>).X(n2)").unwrap();
    let (code, out, _) = vpc(&["ho-translate", file.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        "'n1(89452373348653552655).0 | n1(x0).(n4)('n4(x0).0 | <universal n4 [i=0;g=n2] n2>)"
    );
}

#[test]
fn interactive_runs_follow_the_chosen_options() {
    let (code, out, _) = vpc_with_input(&["run", &data("out.vpc"), "--interactive"], "0\n");
    assert_eq!(code, 0);
    assert!(out.contains("[0] out n1 0"), "{out}");
    assert!(out.contains("step 1: out n1 0"), "{out}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(vpc(&["frobnicate"]).0, 2);
    assert_eq!(vpc(&["run", &data("missing.vpc")]).0, 2);
    assert_eq!(vpc(&["normalize", "5"]).0, 2);
}
