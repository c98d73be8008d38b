use std::path::{Path, PathBuf};
use std::process::Command;

use cml_core::{fixtures, Kernel};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cml(args: &[String]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cml"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

/// Renders a run the way the examples document shows it.
fn render(command: &str) -> String {
    let words = shlex::split(command).expect("balanced quotes");
    assert_eq!(words[0], "cml");
    let out = cml(&words[1..]);
    let mut lines = vec!["```console".to_string(), format!("$ {command}")];
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stdout = stdout.trim_end_matches('\n');
    if !stdout.is_empty() {
        lines.push(stdout.to_string());
    }
    let stderr = String::from_utf8(out.stderr).unwrap();
    if !stderr.trim().is_empty() {
        lines.push(format!("stderr: {}", stderr.trim()));
    }
    let code = out.status.code().expect("exited normally");
    if code != 0 {
        lines.push(format!("[exit {code}]"));
    }
    lines.push("```".to_string());
    lines.join("\n")
}

fn blocks(doc: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in doc.lines() {
        match current.as_mut() {
            None if line == "```console" => current = Some(vec![line]),
            None => {}
            Some(block) => {
                block.push(line);
                if line == "```" {
                    out.push(block.join("\n"));
                    current = None;
                }
            }
        }
    }
    assert!(current.is_none(), "unterminated block");
    out
}

#[test]
fn documented_examples_match() {
    let doc = std::fs::read_to_string(root().join("docs/examples.md")).unwrap();
    let blocks = blocks(&doc);
    assert!(blocks.len() >= 20);
    for block in blocks {
        let command = block.lines().nth(1).and_then(|l| l.strip_prefix("$ ")).expect("command line");
        assert_eq!(render(command), block, "output of `{command}` changed");
    }
}

#[test]
fn shipped_models_match_the_fixtures() {
    let cases: [(&str, Kernel); 7] = [
        ("fig1", fixtures::figure1()),
        ("fig3m", fixtures::figure1()),
        ("fig3n", fixtures::figure3_n()),
        ("fig3o", fixtures::figure3_o()),
        ("fig4m", fixtures::figure1()),
        ("fig4n", fixtures::figure4_n()),
        ("fig4o", fixtures::figure4_o()),
    ];
    for (name, expected) in cases {
        let text = std::fs::read_to_string(root().join(format!("models/{name}.json"))).unwrap();
        assert_eq!(Kernel::from_json(&text).unwrap(), expected, "{name}");
        assert!(text.contains("\"description\""), "{name} documents its rates");
    }
}

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn json_output_is_schema_tagged() {
    let commands = [
        vec!["eval", "-m", "models/fig1.json", "-f", "T", "--json"],
        vec!["valid", "-m", "models/fig1.json", "-f", "T", "--json"],
        vec!["bisim", "-m", "models/fig1.json", "--json"],
        vec!["encode", "--up", "-e", "1", "-f", "T", "--json"],
        vec!["distance", "-m1", "models/fig1.json", "-s1", "m", "-s2", "m1", "--json"],
        vec!["order", "-m1", "models/fig1.json", "-s1", "m", "-s2", "m", "-e", "0", "--json"],
        vec!["prove", "docs/proofs/weaken.json", "--json"],
    ];
    for c in commands {
        let out = cml(&args(&c));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["schema"], "cml-kit/1", "{c:?}");
    }
}

#[test]
fn verify_writes_a_report() {
    let dir = std::env::temp_dir().join(format!("cml-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let out = cml(&args(&[
        "verify",
        "--suite",
        "l1",
        "--budget",
        "small",
        "--seed",
        "3",
        "--report",
        report.to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("l1-positive-monotonicity: ok"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["suite"], "l1-positive-monotonicity");

    let out = cml(&args(&[
        "verify",
        "--suite",
        "t2",
        "--budget",
        "small",
        "--mutation",
        "drop-epsilon",
        "--report",
        report.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reports"][0]["mutation"], "drop-epsilon");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    for c in [
        vec!["eval"],
        vec!["frobnicate"],
        vec!["encode", "-e", "1", "-f", "T"],
        vec!["verify", "--suite", "nope", "--report", "/dev/null"],
        vec!["verify", "--budget", "huge", "--report", "/dev/null"],
        vec!["order", "-m1", "models/fig1.json", "-s1", "m", "-s2", "m", "-e", "0.1.2"],
    ] {
        assert_eq!(cml(&args(&c)).status.code(), Some(2), "{c:?}");
    }
}
