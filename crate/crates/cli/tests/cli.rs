use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pushmean"));
    c.args(args).env_remove("PUSHMEAN_SEARCH_CAP");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn fails(args: &[&str], code: i32) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}");
    String::from_utf8(o.stderr).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rational(v: &Value) -> BigRational {
    let s = v.as_str().unwrap();
    match s.split_once('/') {
        Some((a, b)) => BigRational::new(a.parse().unwrap(), b.parse().unwrap()),
        None => BigRational::from_integer(s.parse().unwrap()),
    }
}

#[test]
fn decide_two_state_examples() {
    let f = fixture("two_state.wps.json");
    let f = path(&f);
    assert_eq!(json(&["decide", "--flavor", "liminf", "--rel", "ge", "--threshold", "0", f])["answer"], true);
    assert_eq!(json(&["decide", "--flavor", "limsup", "--rel", "gt", f])["answer"], false);
    assert_eq!(json(&["decide", "--stack-bounded", "--rel", "ge", f])["answer"], false);
    assert_eq!(json(&["decide", "--rel", "gt", "--threshold", "-1/2", f])["answer"], true);
    assert_eq!(json(&["decide", "--rel", "ge", "--threshold", "0.001", f])["answer"], false);
}

#[test]
fn decide_output_is_stable() {
    let f = fixture("two_state.wps.json");
    let args = ["decide", "--flavor", "liminf", "--rel", "ge", path(&f)];
    let first = ok(&args);
    assert_eq!(first, golden("decide_two_state.json"));
    assert_eq!(ok(&args), first);
    let with_stats = json(&["decide", "--stats", path(&f)]);
    assert!(with_stats["stats"]["timings"]["decide_ms"].is_number());
    assert!(!first.contains("timings"));
}

#[test]
fn decide_witness_is_reported() {
    let f = fixture("skip_plus.wps.json");
    let v = json(&["decide", "--rel", "gt", "--witness", path(&f)]);
    assert_eq!(v["answer"], true);
    assert_eq!(v["witness"]["cycle_edges"], serde_json::json!([0]));
    assert_eq!(v["witness"]["cycle_weight"], "1");
}

#[test]
fn summary_tables() {
    let f = fixture("two_state.wps.json");
    let out = ok(&["summary", path(&f)]);
    assert_eq!(out, golden("summary_two_state.txt"));
    assert!(out.contains("q1\tγ\tq2\t-1\n"));
    assert!(ok(&["summary", path(&fixture("skip_plus.wps.json"))]).contains("p\t⊥\tp\tomega\n"));
    let empty = ok(&["summary", path(&fixture("no_edges.wps.json"))]);
    assert_eq!(empty.lines().filter(|l| l.ends_with("\t-inf")).count(), 8);
    assert!(empty.ends_with("# finite 0, omega 0, -inf 8\n"));
    let shallow = ok(&["summary", "--depth", "0", path(&f)]);
    assert!(shallow.contains("q1\t⊥\tq1\t-inf\n"));
}

#[test]
fn input_errors_exit_2() {
    let e = fails(&["decide", path(&fixture("truncated.wps.json"))], 2);
    assert!(e.contains("line 5"), "{e}");
    fails(&["decide", "/nonexistent/file.json"], 2);
    fails(&["decide", path(&fixture("doubling_game.wpg.json"))], 2);
    fails(&["decide", "--threshold", "1/0", path(&fixture("two_state.wps.json"))], 2);
    fails(&["generate", "graph", path(&fixture("sat.cnf"))], 2);
    fails(&["generate", "sat3", path(&fixture("two_state.wps.json"))], 2);
    fails(&["simulate", "--p1", "bogus", "--p2", "first", "--steps", "3", path(&fixture("doubling_game.wpg.json"))], 2);
}

fn generate(cnf: &str, strict: bool) -> PathBuf {
    let out = scratch(&format!("{cnf}{}.wrg.json", if strict { ".strict" } else { "" }));
    let src = fixture(cnf);
    let mut args = vec!["generate", "sat3", path(&src)];
    if strict {
        args.push("--strict");
    }
    std::fs::write(&out, ok(&args)).unwrap();
    out
}

#[test]
fn generated_graph_shape() {
    let g: Value = serde_json::from_str(&std::fs::read_to_string(generate("sat.cnf", false)).unwrap()).unwrap();
    assert_eq!(g["kind"], "wrg");
    assert_eq!(g["modules"].as_array().unwrap().len(), 1 + 2 * 3 + 3);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(generate("sat.cnf", true)).unwrap()).unwrap();
    let (a, b) = (g["transitions"].as_array().unwrap(), s["transitions"].as_array().unwrap());
    let diff: Vec<_> = a.iter().zip(b).filter(|(x, y)| x != y).collect();
    assert_eq!(diff.len(), 1);
    assert_eq!((diff[0].0["weight"].as_str(), diff[0].1["weight"].as_str()), (Some("0"), Some("1")));
}

#[test]
fn search_and_verify_satisfiable() {
    let g = generate("sat.cnf", false);
    let out = scratch("sat.strategy.json");
    let v = json(&["modular", "search", "--out", path(&out), path(&g)]);
    assert_eq!(v["found"], true);
    assert_eq!(v["strategy"]["kind"], "strategy");
    let verdict = json(&["modular", "verify", "--strategy", path(&out), path(&g)]);
    assert_eq!(verdict["winning"], true);
    let parallel = ok(&["modular", "search", "--jobs", "3", path(&g)]);
    assert_eq!(parallel, ok(&["modular", "search", path(&g)]));

    let strict = generate("sat.cnf", true);
    assert_eq!(json(&["modular", "search", "--rel", "gt", path(&strict)])["found"], true);
}

#[test]
fn search_unsatisfiable_and_caps() {
    let g = generate("unsat.cnf", false);
    let v = json(&["modular", "search", "--jobs", "2", path(&g)]);
    assert_eq!(v["found"], false);
    assert_eq!(v["message"], "no winning modular strategy");
    let e = fails(&["modular", "search", "--cap", "1000", path(&g)], 3);
    assert!(e.contains("exceeds the cap of 1000"));
    let o = run_env(&["modular", "search", path(&g)], &[("PUSHMEAN_SEARCH_CAP", "99")]);
    assert_eq!(o.status.code(), Some(3));
    let o = run_env(&["modular", "search", path(&g)], &[("PUSHMEAN_SEARCH_CAP", "lots")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn losing_strategy_has_counter_witness() {
    let g = generate("unsat.cnf", false);
    // Every module takes its first option.
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let module_of = |name: &str, key: &str| {
        doc[key].as_array().unwrap().iter().find(|x| x["name"] == name).unwrap()["module"].clone()
    };
    let mut choices: Vec<Value> = Vec::new();
    for t in doc["transitions"].as_array().unwrap() {
        let from = &t["from"];
        if choices.iter().any(|c| &c["position"] == from) {
            continue;
        }
        let module = match from.as_str() {
            Some(n) => module_of(n, "nodes"),
            None => module_of(from["box"].as_str().unwrap(), "boxes"),
        };
        choices.push(serde_json::json!({"module": module, "position": from, "choice": 0}));
    }
    let sigma = serde_json::json!({"version": "v1", "kind": "strategy", "choices": choices});
    let file = scratch("zeros.strategy.json");
    std::fs::write(&file, sigma.to_string()).unwrap();
    let v = json(&["modular", "verify", "--strategy", path(&file), path(&g)]);
    assert_eq!(v["winning"], false);
    let w = &v["counter_witness"];
    assert_eq!(w["kind"], "lasso");
    assert!(w["cycle_weight"].as_str().unwrap().starts_with('-'));

    fails(&["modular", "verify", "--strategy", path(&fixture("bad_strategy.json")), path(&g)], 2);
    let mut bad = sigma.clone();
    bad["choices"][0]["choice"] = 9.into();
    std::fs::write(&file, bad.to_string()).unwrap();
    fails(&["modular", "verify", "--strategy", path(&file), path(&g)], 2);
    fails(&["modular", "verify", "--stack-bounded", "--strategy", path(&file), path(&g)], 2);
}

#[test]
fn generated_game_weights_match_gadgets() {
    let v = json(&["generate", "wfa", path(&fixture("plus.wfa.json"))]);
    assert_eq!(v["kind"], "wpg");
    for e in v["edges"].as_array().unwrap() {
        let w: i64 = e["weight"].as_str().unwrap().parse().unwrap();
        let gadget = e["gadget"].as_str().unwrap();
        let expected = match gadget.split(':').next().unwrap() {
            "dollar-loop" | "dollar-to-letters" => -10,
            "letter-push" => -1,
            "short-pop-dollar" => 11,
            "run-pop-dollar" => 10,
            // Every automaton transition has weight +1 here.
            "run-pop" => 2,
            _ => 0,
        };
        assert_eq!(w, expected, "{gadget}");
    }
    assert_eq!(v["player2"], serde_json::json!(["qch", "q<$", "r0"]));
}

#[test]
fn simulate_traces() {
    let doubling_game = fixture("doubling_game.wpg.json");
    let v = json(&["simulate", "--p1", "doubling", "--p2", "doubling", "--steps", "100000", path(&doubling_game)]);
    assert_eq!(v["played"], 100000);
    assert_eq!(v["prefix_avgs"].as_array().unwrap().len(), 100000);
    let one = BigRational::from_integer(BigInt::from(1));
    assert!(rational(&v["max_avg"]) >= one);
    assert!(rational(&v["min_avg"]) <= -one);

    let empty = json(&["simulate", "--p1", "first", "--p2", "first", "--steps", "0", path(&doubling_game)]);
    assert_eq!(empty["edges"], serde_json::json!([]));
    assert_eq!(empty["max_avg"], Value::Null);

    let dead = json(&["simulate", "--p1", "first", "--p2", "first", "--steps", "5", path(&fixture("dead_end.wpg.json"))]);
    assert_eq!(dead["dead_end"], true);
    assert_eq!(dead["played"], 1);
    assert_eq!(dead["end"], "(⊥,q)");

    let a = ok(&["simulate", "--p1", "random:7", "--p2", "random:8", "--steps", "200", path(&doubling_game)]);
    assert_eq!(a, ok(&["simulate", "--p1", "random:7", "--p2", "random:8", "--steps", "200", path(&doubling_game)]));
    fails(&["simulate", "--p1", "edges:0,9", "--p2", "first", "--steps", "5", path(&doubling_game)], 2);
}
