//! Shared fixtures for the integration and acceptance suites.
#![allow(dead_code)] // each test binary uses its own subset

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Lines of the demo corpus, one JSON object per sentence.
///
/// Source bags: {E1:2, E2:1}, {}, {E3:1}  (total 4).
pub const SOURCE_JSONL: &str = concat!(
    r#"{"mentions":[{"id":"E1","start":0,"end":4},{"id":"E1","start":6,"end":10},{"id":"E2","start":12,"end":17}]}"#,
    "\n",
    r#"{"mentions":[]}"#,
    "\n",
    r#"{"mentions":[{"id":"E3","start":3,"end":9}]}"#,
    "\n",
);

/// Reference bags: {E1:1, E2:1}, {E4:1}, {E3:1}  (total 4).
pub const REFERENCE_JSONL: &str = concat!(
    r#"{"mentions":[{"id":"E1","start":0,"end":4},{"id":"E2","start":6,"end":11}]}"#,
    "\n",
    r#"{"mentions":[{"id":"E4","start":0,"end":3}]}"#,
    "\n",
    r#"{"mentions":[{"id":"E3","start":2,"end":8}]}"#,
    "\n",
);

/// Candidate bags: {E1:1, E2:1}, {E4:1}, {E3:1}; the E3 mention is tagged
/// "ru", everything else "en".
///
/// Source-pivot, unfiltered: matches 3, c 4, recall 3/4, ecp 1, kobe 0.75.
/// Source-pivot, lang:en:require-tags: matches 2, c 3, kobe 0.5.
/// Reference-pivot, unfiltered: matches 4, recall 1, kobe 1.
pub const ALPHA_JSONL: &str = concat!(
    r#"{"mentions":[{"id":"E1","start":0,"end":4,"lang":"en"},{"id":"E2","start":6,"end":11,"lang":"en"}]}"#,
    "\n",
    r#"{"mentions":[{"id":"E4","start":0,"end":3,"lang":"en"}]}"#,
    "\n",
    r#"{"mentions":[{"id":"E3","start":2,"end":8,"lang":"ru"}]}"#,
    "\n",
);

/// Candidate bags: {E1:1, E9:8}, {}, {E3:2}  (total 11, all tagged "en").
///
/// Source-pivot, unfiltered: matches 2, recall 0.5, c 11 >= 2s = 8, so
/// ecp = exp(1 - 11/8) = exp(-0.375), kobe = 0.5 * exp(-0.375).
pub fn beta_jsonl() -> String {
    let mut spam = String::from(r#"{"mentions":[{"id":"E1","start":0,"end":4,"lang":"en"}"#);
    for k in 0..8 {
        spam.push_str(&format!(
            r#",{{"id":"E9","start":{},"end":{},"lang":"en"}}"#,
            10 + 2 * k,
            11 + 2 * k
        ));
    }
    spam.push_str("]}\n");
    spam.push_str("{\"mentions\":[]}\n");
    spam.push_str(concat!(
        r#"{"mentions":[{"id":"E3","start":2,"end":8,"lang":"en"},{"id":"E3","start":10,"end":16,"lang":"en"}]}"#,
        "\n"
    ));
    spam
}

/// Candidate bags: {E1:1}, {}, {}  (total 1).
///
/// Source-pivot: matches 1, recall 0.25, ecp 1, kobe 0.25.
pub const GAMMA_JSONL: &str = concat!(
    r#"{"mentions":[{"id":"E1","start":0,"end":4,"lang":"en"}]}"#,
    "\n",
    r#"{"mentions":[]}"#,
    "\n",
    r#"{"mentions":[]}"#,
    "\n",
);

/// Writes the demo corpus for `zz-en` under `root`, returning the pair dir.
pub fn write_demo_corpus(root: &Path) -> PathBuf {
    let dir = root.join("zz-en");
    let systems = dir.join("systems");
    std::fs::create_dir_all(&systems).unwrap();
    std::fs::write(dir.join("source.jsonl"), SOURCE_JSONL).unwrap();
    std::fs::write(dir.join("reference.jsonl"), REFERENCE_JSONL).unwrap();
    std::fs::write(systems.join("alpha.jsonl"), ALPHA_JSONL).unwrap();
    std::fs::write(systems.join("beta.jsonl"), beta_jsonl()).unwrap();
    std::fs::write(systems.join("gamma.jsonl"), GAMMA_JSONL).unwrap();
    dir
}

/// Scores CSV aligned with the demo corpus. DA ranks the systems the same
/// way KoBE does (alpha > beta > gamma is false for beta/gamma: beta ~0.344,
/// gamma 0.25, DA beta < gamma), so r is informative, not +-1.
pub const SCORES_CSV: &str = "\
lp,system,BLEU,DA
zz-en,alpha,0.30,0.20
zz-en,beta,0.10,-0.10
zz-en,gamma,0.20,0.05
";

pub fn write_scores_csv(root: &Path) -> PathBuf {
    let path = root.join("scores.csv");
    std::fs::write(&path, SCORES_CSV).unwrap();
    path
}

/// Runs the `kobe` binary with the given arguments, isolated from ambient
/// environment defaults.
pub fn kobe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kobe"))
        .args(args)
        .env_remove("KOBE_DATA_ROOT")
        .output()
        .expect("run kobe binary")
}

pub fn kobe_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut command = Command::new(env!("CARGO_BIN_EXE_kobe"));
    command.args(args).env_remove("KOBE_DATA_ROOT");
    for (key, value) in env {
        command.env(key, value);
    }
    command.output().expect("run kobe binary")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}
