use std::process::{Command, Output};

fn tetra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tetra")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("report is JSON")
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("tetra-cli-{}-{}", std::process::id(), name));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn rlll_small_window_passes() {
    let o = tetra(&["rlll", "--type", "ZOZ", "--seed", "17", "--window", "-1..1", "--fplus-window", "0..2", "--trials", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["suite"], "rlll");
    assert_eq!(r["type"], "ZOZ");
    assert_eq!(r["seed"], 17);
    assert!(r["failures"].as_array().unwrap().is_empty());
    assert!(r["counts"]["checks"].as_u64().unwrap() > 0);
    assert!(r.get("elapsed_ms").is_none());
}

#[test]
fn invalid_configurations_exit_2() {
    assert_eq!(code(&tetra(&["rlll", "--type", "QQQ"])), 2);
    assert_eq!(code(&tetra(&["rlll", "--type", "OOZ", "--d", "1.5"])), 2);
    assert_eq!(code(&tetra(&["rrrr", "--type", "ZZZZZZ"])), 2);
    assert_eq!(code(&tetra(&["rlll", "--type", "OOO", "--fplus-window", "-1..2"])), 2);
    assert_eq!(code(&tetra(&["intertwiner", "--mode", "zzz", "--violate", "10"])), 2);
}

#[test]
fn rrrr_single_type_and_all() {
    let o = tetra(&["rrrr", "--type", "ZOOOOO", "--pairs", "500", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["counts"]["pairs"], 500);
    let o = tetra(&["rrrr", "--all", "--pairs", "4", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["type"], "all");
    assert_eq!(r["counts"]["types"], 25);
    assert_eq!(r["counts"]["pairs"], 100);
    assert_eq!(r["params"]["OZZOOZ"], "pass");
}

#[test]
fn reports_are_deterministic() {
    let args = ["rrrr", "--type", "OOZOZO", "--pairs", "20", "--seed", "11"];
    assert_eq!(tetra(&args).stdout, tetra(&args).stdout);
    let t = tetra(&["rrrr", "--type", "OOZOZO", "--pairs", "5", "--timing"]);
    assert!(json(&t)["elapsed_ms"].is_u64());
}

#[test]
fn element_output() {
    let o = tetra(&["element", "--type", "OOO", "--out-idx", "0,0,0", "--in-idx", "0,0,0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("R^{0,0,0}_{0,0,0} = 1\n"));
    let o = tetra(&["element", "--type", "OOZ", "--out-idx", "3,0,0", "--in-idx", "0,0,0", "--d", "1"]);
    let s = stdout(&o);
    assert!(s.contains("= 0\n") && s.contains("zero by support: delta a+b = i+j"), "{s}");
    let o = tetra(&["element", "--type", "ZZZ", "--out-idx", "1,-1,2", "--in-idx", "0,1,1"]);
    let s = stdout(&o);
    assert!(s.contains("d1,d2,d3,d4 = 2,-2,2,2") && s.contains("phi = 3"), "{s}");
}

#[test]
fn parameter_files() {
    // mu1/mu2 = q^2 with q = 4/9
    let good = temp_file(
        "ooz.json",
        r#"{"schema": 1, "q": "4/9", "d": 2,
            "lines": [{"mu": "16/81"}, {"mu": "1"}, {"r": "4", "s": "9/4", "t": "1/9", "w": "25"}]}"#,
    );
    let o = tetra(&["rlll", "--type", "OOZ", "--params", good.to_str().unwrap(), "--window", "-1..1", "--fplus-window", "0..2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["params"]["mu1[0]"], "16/81");
    let bad = temp_file(
        "ooz-bad.json",
        r#"{"schema": 1, "q": "4/9", "lines": [{"mu": "2/3"}, {"mu": "1"}, {"r": "4", "s": "9/4", "t": "1/9", "w": "25"}]}"#,
    );
    assert_eq!(code(&tetra(&["rlll", "--type", "OOZ", "--params", bad.to_str().unwrap()])), 2);
    let schema = temp_file("schema.json", r#"{"schema": 9, "q": "4/9", "lines": []}"#);
    assert_eq!(code(&tetra(&["rlll", "--type", "OOO", "--params", schema.to_str().unwrap()])), 2);
    let six = temp_file(
        "oooooo.json",
        r#"{"schema": 1, "q": {"root": "2/3"},
            "lines": [{"mu": "2"}, {"mu": "3"}, {"mu": "5/7"}, {"mu": "1/2"}, {"mu": "-3"}, {"mu": "7/4"}]}"#,
    );
    let o = tetra(&["rrrr", "--type", "OOOOOO", "--params", six.to_str().unwrap(), "--pairs", "30"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for p in [good, bad, schema, six] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn intertwiner_and_algebra() {
    let w = ["--window", "-1..1", "--fplus-window", "0..2"];
    let run = |extra: &[&str]| {
        let mut a = vec!["intertwiner"];
        a.extend_from_slice(extra);
        a.extend_from_slice(&w);
        tetra(&a)
    };
    assert_eq!(code(&run(&["--mode", "ooo", "--seed", "4"])), 0);
    assert_eq!(code(&run(&["--mode", "zzz", "--constants"])), 0);
    assert_eq!(code(&run(&["--mode", "zzz", "--violate", "5"])), 1);
    for tag in ["z", "x", "o"] {
        for rep in ["1", "2"] {
            assert_eq!(code(&tetra(&["algebra-check", "--tag", tag, "--rep", rep])), 0);
        }
    }
}

#[test]
fn recursions_listing() {
    let o = tetra(&["recursions", "--type", "OOZ", "--out-idx", "1,0,1", "--in-idx", "0,1,0", "--d", "1", "--evaluate"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with('[')).count(), 18);
}

#[test]
fn output_file() {
    let p = std::env::temp_dir().join(format!("tetra-cli-{}-out.json", std::process::id()));
    let o = tetra(&["rrrr", "--type", "OOOOOO", "--pairs", "3", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(r["suite"], "rrrr");
    std::fs::remove_file(p).ok();
}
