//! End-to-end runs of the binary: the documented invocations, exit codes,
//! output formats and file round trips.

use serde_json::Value;
use std::path::PathBuf;
use std::process::Output;

fn fixture(name: &str, content: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_treeloc"))
        .args(args)
        .env_remove("TREELOC_MAX_DEPTH")
        .env_remove("TREELOC_MAX_COORDS")
        .env_remove("TREELOC_MAX_SEARCH_NODES")
        .output()
        .unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout_of(out)).unwrap()
}

const FULL_SQUARE: &str = r#"{"domain":{"kind":"uniform","b":3,"depth":2},"nodes":[[],[0],[0,0],[0,1],[0,2],[1],[1,0],[1,1],[1,2],[2],[2,0],[2,1],[2,2]]}"#;

const DIGITS_FAMILY: &str = r#"{"b":3,"length":3,"functions":[[0,0,0],[0,0,1],[0,0,2],[0,1,0],[0,1,1],[0,1,2],[0,2,0],[0,2,1],[0,2,2]]}"#;

const NAME_12: &str = r#"{"condition":{"domain":{"kind":"accelerating","depth":12},"spine":[[],[0]],"frontier":[[0]],"stem":[0]},"outputAlphabet":3,"targetLength":12,"labels":{"rule":{"kind":"pathDigits","seed":1,"modulus":3}}}"#;

const STATE_6: &str = r#"{"coordinates":[{"kind":"accelerating","stem":[0],"tree":{"domain":{"kind":"accelerating","depth":6},"spine":[[],[0]],"frontier":[[0]]}}],"f":[0],"eta":[0],"m":0,"a":{"domain":{"kind":"uniform","b":3,"depth":6},"nodes":[[]]},"name":{"outputAlphabet":3,"targetLength":6,"rule":{"kind":"pathDigits","seed":5,"modulus":2}}}"#;

const PAIR_PREDICTOR: &str = r#"{"b":3,"k":2,"horizon":2,"table":[{"s":[],"set":[0,1]},{"s":[0],"set":[0,1]},{"s":[1],"set":[0,1]},{"s":[2],"set":[0,1]}]}"#;

#[test]
fn exact_cover_prints_its_size_first_and_succeeds() {
    let out = run(&["cover", "--b", "3", "--depth", "2", "--k", "2", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with(r#"{"size":3"#), "got {text}");
    let value = json_of(&out);
    assert_eq!(value["seed"], 0);
    assert_eq!(value["family"]["trees"].as_array().unwrap().len(), 3);
}

#[test]
fn extraction_selects_the_documented_indices() {
    let family = fixture("digits.json", DIGITS_FAMILY);
    let out = run(&["extract", "--family", family.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).starts_with(r#"{"selected":[0,3]"#));
}

#[test]
fn validating_a_wide_tree_reports_and_fails() {
    let tree = fixture("square.json", FULL_SQUARE);
    let out = run(&[
        "validate",
        "--tree",
        tree.to_str().unwrap(),
        "--class",
        "k-tree",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let value = json_of(&out);
    assert_eq!(value["satisfied"], false);
    assert_eq!(value["isKTree"], false);
    assert_eq!(value["isLeveled"], true);
}

#[test]
fn validating_the_satisfied_class_succeeds() {
    let tree = fixture("square-ok.json", FULL_SQUARE);
    let out = run(&[
        "validate",
        "--tree",
        tree.to_str().unwrap(),
        "--class",
        "k-tree",
        "--k",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["satisfied"], true);
}

#[test]
fn prediction_and_evasion_agree_on_the_escape() {
    let predictor = fixture("pair.json", PAIR_PREDICTOR);
    let path = predictor.to_str().unwrap();
    let hit = run(&["predict", "--predictor", path, "--f", "0,1", "--m", "0"]);
    assert_eq!(hit.status.code(), Some(0));
    assert_eq!(json_of(&hit)["predicted"], true);
    let miss = run(&["predict", "--predictor", path, "--f", "0,2", "--m", "0"]);
    assert_eq!(miss.status.code(), Some(0));
    let value = json_of(&miss);
    assert_eq!(value["predicted"], false);
    assert_eq!(value["firstEscape"], 1);
    let evade = run(&["evade", "--predictor", path, "--m", "0"]);
    assert_eq!(evade.status.code(), Some(0));
    assert_eq!(json_of(&evade)["evader"], serde_json::json!([0, 2]));
}

#[test]
fn pruning_emits_json_that_validates_and_dot_that_draws() {
    let name = fixture("name12.json", NAME_12);
    let out = run(&["prune", "--name", name.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let value = json_of(&out);

    // the pruned condition tree re-parses as an accelerating tree
    let pruned = serde_json::to_string(&value["pruned"]).unwrap();
    let pruned_path = fixture("pruned.json", &pruned);
    let check = run(&[
        "validate",
        "--tree",
        pruned_path.to_str().unwrap(),
        "--class",
        "accelerating",
        "--k",
        "2",
    ]);
    assert_eq!(check.status.code(), Some(0));

    // the cover re-parses as a two-tree
    let cover = serde_json::to_string(&value["cover"]).unwrap();
    let cover_path = fixture("cover.json", &cover);
    let check = run(&[
        "validate",
        "--tree",
        cover_path.to_str().unwrap(),
        "--class",
        "k-tree",
        "--k",
        "2",
    ]);
    assert_eq!(check.status.code(), Some(0));

    let dot = run(&["prune", "--name", name.to_str().unwrap(), "--format", "dot"]);
    assert_eq!(dot.status.code(), Some(0));
    let text = stdout_of(&dot);
    assert!(text.starts_with("// seed 0\n"));
    assert!(text.contains("digraph pruned"));
    assert!(text.contains("digraph cover"));
    assert!(text.contains("->"));
}

#[test]
fn consolidation_output_feeds_back_as_input() {
    let state = fixture("state6.json", STATE_6);
    let out = run(&["consolidate", "--state", state.to_str().unwrap(), "--beta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let value = json_of(&out);
    assert_eq!(value["m"], 6);
    assert_eq!(value["eta"], serde_json::json!([1]));

    // the emitted state re-parses; the second round honestly runs out of room
    let next = fixture("state6-next.json", &stdout_of(&out));
    let again = run(&["consolidate", "--state", next.to_str().unwrap(), "--beta", "0"]);
    assert_eq!(again.status.code(), Some(3));
}

#[test]
fn slalom_reads_levels_off_a_pruned_name() {
    let name = fixture("name12b.json", NAME_12);
    let out = run(&["prune", "--name", name.to_str().unwrap()]);
    let value = json_of(&out);
    let mut condition = value["pruned"].clone();
    condition["stem"] = value["pruned"]["stem"].clone();
    let rebuilt = serde_json::json!({
        "condition": condition,
        "outputAlphabet": 3,
        "targetLength": 12,
        "labels": {"rule": {"kind": "pathDigits", "seed": 1, "modulus": 3}},
    });
    let rebuilt_path = fixture("pruned-name.json", &rebuilt.to_string());
    let out = run(&["slalom", "--name", rebuilt_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let value = json_of(&out);
    let sizes = value["sizes"].as_array().unwrap();
    assert!(!sizes.is_empty());
    assert!(sizes.iter().all(|s| s.as_u64().unwrap() >= 1));
}

#[test]
fn composition_with_a_full_outer_tree_returns_the_inner_cover() {
    let cover = run(&["cover", "--b", "3", "--depth", "2", "--k", "2", "--exact"]);
    let cert_path = fixture("cert.json", &stdout_of(&cover));
    let outer_path = fixture(
        "outer.json",
        &format!(r#"{{"trees":[{FULL_SQUARE}]}}"#),
    );
    let out = run(&[
        "compose",
        "--outer",
        outer_path.to_str().unwrap(),
        "--inner",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let composed = json_of(&out)["trees"].clone();
    let inner = json_of(&cover)["family"]["trees"].clone();
    assert_eq!(composed, inner);
}

#[test]
fn grouped_extraction_runs_from_a_family_file() {
    let mut functions = Vec::new();
    let mut groups = Vec::new();
    for g in 0..2 {
        for i in 0..27 {
            functions.push(vec![g as u8, (i % 3) as u8, ((i / 3) % 3) as u8, ((i / 9) % 3) as u8]);
            groups.push(g);
        }
    }
    let family = serde_json::json!({
        "b": 3,
        "length": 4,
        "functions": functions,
        "groups": groups,
    });
    let path = fixture("grouped.json", &family.to_string());
    let out = run(&[
        "extract",
        "--family",
        path.to_str().unwrap(),
        "--n",
        "1",
        "--k",
        "2",
        "--m",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["selected"].as_array().unwrap().len(), 1);
}

#[test]
fn seeded_runs_are_byte_reproducible() {
    let first = run(&["cover", "--b", "3", "--depth", "2", "--k", "2", "--exact", "--seed", "9"]);
    let second = run(&["cover", "--b", "3", "--depth", "2", "--k", "2", "--exact", "--seed", "9"]);
    assert_eq!(first.stdout, second.stdout);
    let reseeded = run(&["cover", "--b", "3", "--depth", "2", "--k", "2", "--exact", "--seed", "10"]);
    assert_eq!(json_of(&reseeded)["seed"], 10);
}

#[test]
fn the_environment_caps_depth_and_flags_override_it() {
    let name = fixture("name12c.json", NAME_12);
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_treeloc"))
        .args(["prune", "--name", name.to_str().unwrap()])
        .env("TREELOC_MAX_DEPTH", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_treeloc"))
        .args(["prune", "--name", name.to_str().unwrap(), "--max-depth", "16"])
        .env("TREELOC_MAX_DEPTH", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_and_oversized_inputs_use_distinct_exit_codes() {
    let broken = fixture("broken.json", r#"{"domain":{"kind":"uniform","b":3,"depth":2},"nodes":[[0]]}"#);
    let out = run(&[
        "validate",
        "--tree",
        broken.to_str().unwrap(),
        "--class",
        "k-tree",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // a lazily represented full tree of depth twelve is beyond any walk
    let graded = fixture(
        "graded12.json",
        r#"{"domain":{"kind":"accelerating","depth":12},"spine":[[],[0]],"frontier":[[0]]}"#,
    );
    let out = run(&[
        "validate",
        "--tree",
        graded.to_str().unwrap(),
        "--class",
        "accelerating",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn drawing_is_refused_where_no_tree_is_emitted() {
    let predictor = fixture("pair2.json", PAIR_PREDICTOR);
    let out = run(&[
        "predict",
        "--predictor",
        predictor.to_str().unwrap(),
        "--f",
        "0,1",
        "--m",
        "0",
        "--format",
        "dot",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn the_suite_subcommand_prints_a_table() {
    let out = run(&["verify-suite", "--criteria", "2,6", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("criterion  2  pass"));
    assert!(text.contains("criterion  6  pass"));
    assert!(text.contains("all criteria passed"));
}
