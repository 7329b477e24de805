use std::process::{Command, Output};

fn homlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = homlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn graphs_and_families() {
    let out = homlab(&["graphs", "--n-max", "3", "--connected", "--g6"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().collect::<Vec<_>>(), ["@", "A_", "BW", "Bw"]);
    let all = json(&["graphs", "--n-max", "4"]);
    assert_eq!(all.as_array().unwrap().len(), 18);
    let family = json(&["family", "--class", "path", "--k1", "3", "--n-max", "4", "--connected"]);
    assert!(family.as_array().unwrap().len() >= 5);
    let dot = homlab(&["family", "--class", "tree", "--k1", "2", "--q", "2", "--n-max", "3", "--dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("graph"));
}

#[test]
fn counting() {
    assert_eq!(json(&["hom", "Cr", "Bw"])["hom"], "18");
    let sub = json(&["sub", "Bo", "Cr", "--coefficients"]);
    assert_eq!(sub["direct"], "4");
    assert_eq!(sub["via_coefficients"], "4");
    assert_eq!(sub["spasm"].as_array().unwrap().len(), 2);
    let labeled = r#"[{"coef": "-3/2", "graph": {"n": 2, "edges": [[0, 1]], "labels": {"x1": 0}}}]"#;
    assert_eq!(json(&["hom", labeled, "Bw", "--label", "x1=2"])["hom"], "-3");
}

#[test]
fn cfi_and_games() {
    let x = json(&["cfi", "--graph", "Bw"]);
    let twisted = json(&["cfi", "--graph", "Bw", "--twist", "1"]);
    assert_eq!(x["graph"]["n"], 6);
    assert_eq!(twisted["graph"]["n"], 6);
    let c6_vs_two_c3 = |k1: &str, rounds: &str| {
        json(&["game", "bp", "--a", "EhEG", "--b", "EwCW", "--k1", k1, "--rounds", rounds])["winner"].clone()
    };
    assert_eq!(c6_vs_two_c3("3", "3"), "Spoiler");
    assert_eq!(c6_vs_two_c3("2", "4"), "Duplicator");
    assert_eq!(json(&["game", "exists", "--a", "Bw", "--b", "A_", "--k1", "3"])["winner"], "Spoiler");
}

#[test]
fn solving_writes_strategies() {
    let dir = std::env::temp_dir().join(format!("homlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("strategy.json");
    let out = json(&["solve", "cr", "--graph", "Cr", "--k1", "3", "--rounds", "3", "--emit-strategy", file.to_str().unwrap()]);
    assert_eq!(out["outcome"], "PursuersWin");
    let strategy: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert!(!strategy.is_null());

    let ns = json(&["solve", "ns", "--graph", "Cr", "--k1", "2", "--k2", "1"]);
    assert_eq!(ns["outcome"], "PursuersWin");
    let d = serde_json::json!({ "Decomposition": ns["decomposition"] });
    std::fs::write(dir.join("d.json"), d.to_string()).unwrap();
    let at = format!("@{}", dir.join("d.json").display());
    let cover = json(&["convert", &at, "Cr", "--to", "cover"]);
    assert!(cover.get("Cover").is_some());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn logic_verbs() {
    let holds = |formula: &str, graph: &str| json(&["logic", "eval", formula, graph])["holds"].clone();
    assert_eq!(holds("(exists x1 (exists x2 (E x1 x2)))", "Bw"), true);
    assert_eq!(holds("(count>= 4 x1 (= x1 x1))", "Bw"), false);
    let report = json(&["logic", "analyze", "(exists x1 (and (= x1 w1) (E x1 x2)))", "--k1", "2"]);
    assert!(report.is_object());
    let compiled = json(&["logic", "compile", "A_", "--k1", "2", "--m", "6", "--normal-form"]);
    let formula = compiled["formula"].as_str().unwrap();
    assert_eq!(holds(formula, "Bw"), true);
    assert_eq!(holds(formula, "Cr"), false);
    assert!(json(&["logic", "lincomb", "(E x1 x1)"]).as_array().unwrap().is_empty());
}

#[test]
fn comonad_verbs() {
    let built = json(&["comonad", "build", "A_", "--kind", "p", "--k1", "1", "--bound", "2"]);
    assert!(built["size"].as_u64().unwrap() > 0);
    assert_eq!(json(&["comonad", "laws", "Bw", "--kind", "pr", "--k1", "1", "--k2", "1", "--length", "3"])["ok"], true);
    let search = json(&["comonad", "search", "Bw", "A_", "--kind", "p", "--k1", "3", "--bound", "3"]);
    assert_eq!(search["exists"], false);
}

#[test]
fn suites_and_exit_codes() {
    assert!(String::from_utf8(homlab(&["suite", "--list"]).stdout).unwrap().contains("morphism-power"));
    let one = json(&["suite", "cfi-parity", "--instance", "Bw", "--seed", "3"]);
    assert_eq!(one["passed"], true);
    assert_eq!(one["seed"], 3);

    let unknown = homlab(&["suite", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("cfi-parity"));
    assert_eq!(homlab(&["hom", "not-a-graph!", "Bw"]).status.code(), Some(2));
    assert_eq!(homlab(&["--budget", "99", "graphs", "--n-max", "2"]).status.code(), Some(2));
    assert_eq!(homlab(&["graphs"]).status.code(), Some(2));
}
