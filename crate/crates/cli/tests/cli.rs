use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const GOLD: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/gold.jsonl");
const KAPPA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/kappa_sample.csv");

const CANNY: &str = "J. Canny, \"A computational approach to edge detection\", IEEE Transactions on Pattern \
Analysis and Machine Intelligence, vol. 8, no. 6, pp. 679-698, Nov. 1986.";
const PUGH: &str = "Algorithm from William Pugh. Skip lists: a probabilistic alternative to balanced trees. \
Communications of the ACM, 33 (6), 668-676, 1990.";

fn codecite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codecite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(args: &[&str]) -> Output {
    let o = codecite(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    o
}

fn write_commits(repo: &Path, n: usize) {
    let lines: String = (0..n)
        .map(|i| format!("{{\"date\": \"2019-{:02}-{:02}\"}}\n", i % 12 + 1, i % 28 + 1))
        .collect();
    fs::write(repo.join("commits.jsonl"), lines).unwrap();
}

/// Two repositories, one active and one below the commit threshold.
fn corpus(root: &Path) -> PathBuf {
    let corpus = root.join("corpus");
    let active = corpus.join("active");
    fs::create_dir_all(active.join("src")).unwrap();
    write_commits(&active, 600);
    fs::write(
        active.join("src/edges.c"),
        format!("/* {CANNY} */\nint edges(void) {{ return 0; }}\n// just a note\n"),
    )
    .unwrap();
    fs::write(
        active.join("src/skiplist.py"),
        format!("# {PUGH}\ndef insert(x):\n    pass  # just a note\n# just a note\n"),
    )
    .unwrap();
    fs::write(
        active.join("src/legacy.inc"),
        "<?php\n// only seen with an extension override\n",
    )
    .unwrap();
    fs::write(active.join("README.md"), "not source\n").unwrap();

    let idle = corpus.join("idle");
    fs::create_dir_all(&idle).unwrap();
    write_commits(&idle, 10);
    fs::write(idle.join("a.c"), "/* idle repository comment */\n").unwrap();
    corpus
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    ok(&["--help"]);
    ok(&["--version"]);
    for sub in [
        "scan", "extract", "train", "tag", "detect", "evaluate", "sweep", "sample", "report", "search", "kappa",
    ] {
        let o = ok(&[sub, "--help"]);
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}

#[test]
fn sample_size_for_a_population() {
    assert_eq!(stdout(&ok(&["sample", "--population", "11724"])).trim(), "372");
    assert_eq!(stdout(&ok(&["sample", "--population", "4000"])).trim(), "351");
}

#[test]
fn negative_max_gap_is_a_usage_error() {
    let o = codecite(&["detect", "--in", "x.jsonl", "--out-dir", "out", "--max-gap", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--max-gap"));
}

#[test]
fn bad_flags_and_missing_files_exit_codes() {
    assert_eq!(codecite(&["nope"]).status.code(), Some(1));
    assert_eq!(codecite(&["sample", "--confidence", "1.5"]).status.code(), Some(1));
    assert_eq!(
        codecite(&["sample", "--population", "5", "--interval", "0"])
            .status
            .code(),
        Some(1)
    );
    let o = codecite(&["report", "--in", "/no/such/file.jsonl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/file.jsonl"));
}

#[test]
fn kappa_command() {
    let o = ok(&["kappa", "--in", KAPPA]);
    assert_eq!(stdout(&o), "items,kappa,flagged\n60,0.8053,false\n");
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus(dir.path());
    let out = dir.path().join("out");
    let comments = dir.path().join("comments.jsonl");
    let model = dir.path().join("model.json");

    let scan = ok(&["scan", "--corpus", p(&corpus)]);
    let summary: serde_json::Value = serde_json::from_slice(&scan.stdout).unwrap();
    assert_eq!(summary["kept"], serde_json::json!(["active"]));
    assert_eq!(summary["rejected"][0]["repo"], "idle");

    ok(&["extract", "--corpus", p(&corpus), "--out", p(&comments)]);
    let text = fs::read_to_string(&comments).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.contains("\"occurrences\":2"), "duplicate note merged: {text}");
    assert!(!text.contains("idle repository"));
    assert!(!text.contains("extension override"));

    ok(&["train", "--gold", GOLD, "--out", p(&model)]);
    ok(&[
        "detect",
        "--model",
        p(&model),
        "--in",
        p(&comments),
        "--out-dir",
        p(&out),
        "--bibtex",
    ]);
    let detections = fs::read_to_string(out.join("detections.jsonl")).unwrap();
    assert_eq!(detections.lines().count(), 2, "{detections}");
    assert!(detections.contains("Skip lists"));
    let bib = fs::read_to_string(out.join("references.bib")).unwrap();
    assert!(bib.contains("@misc{"), "{bib}");

    let tagged = stdout(&ok(&["tag", "--model", p(&model), "--in", p(&comments)]));
    assert_eq!(tagged.lines().count(), 4);
    assert!(tagged.contains("\"type\":\"year\""));

    let report = stdout(&ok(&[
        "report",
        "--in",
        p(&out.join("detections.jsonl")),
        "--format",
        "json",
        "--min-count",
        "1",
    ]));
    let tables: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!(tables.is_array() || tables.is_object());
    assert!(report.contains("Python"));

    let found = stdout(&ok(&[
        "search",
        "--in",
        p(&comments),
        "--query",
        "skip lists",
        "--format",
        "csv",
    ]));
    assert!(found.contains("total_matches"), "{found}");

    let strict = dir.path().join("strict");
    ok(&[
        "detect",
        "--model",
        p(&model),
        "--in",
        p(&comments),
        "--out-dir",
        p(&strict),
        "--max-gap",
        "0",
    ]);
    assert_eq!(fs::read_to_string(strict.join("detections.jsonl")).unwrap(), "");
}

#[test]
fn jobs_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus(dir.path());
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    ok(&["--jobs", "1", "extract", "--corpus", p(&corpus), "--out", p(&a)]);
    ok(&["--jobs", "4", "extract", "--corpus", p(&corpus), "--out", p(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus(dir.path());
    let cfg = dir.path().join("codecite.toml");
    fs::write(
        &cfg,
        format!("corpus = [{:?}]\n[extensions]\ninc = \"PHP\"\n", p(&corpus)),
    )
    .unwrap();
    let from_cfg = stdout(&ok(&["--config", p(&cfg), "extract"]));
    assert!(from_cfg.contains("extension override"));
    assert!(from_cfg.contains("\"lang\":\"PHP\""));

    // --all-repos on the command line keeps the idle repository too
    let all = stdout(&ok(&["--config", p(&cfg), "extract", "--all-repos"]));
    assert!(all.contains("idle repository"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "no_such_key = 1\n").unwrap();
    assert_eq!(
        codecite(&["--config", p(&bad), "sample", "--population", "10"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sample_groups_by_keyword() {
    let dir = tempfile::tempdir().unwrap();
    let comments = dir.path().join("c.jsonl");
    let lines = [
        r#"{"lang":"C","text":"see Communications of the ACM 1990","occurrences":1,"provenance":[]}"#,
        r#"{"lang":"C","text":"mail someone@acm.org","occurrences":1,"provenance":[]}"#,
        r#"{"lang":"C","text":"unrelated","occurrences":1,"provenance":[]}"#,
    ];
    fs::write(&comments, lines.join("\n")).unwrap();
    let out = dir.path().join("samples");
    let o = ok(&["sample", "--in", p(&comments), "--keyword", "acm", "--out-dir", p(&out)]);
    assert_eq!(stdout(&o), "keyword,group,population,sample\nacm,a,1,1\nacm,b,1,1\n");
    assert!(fs::read_to_string(out.join("acm_a.jsonl"))
        .unwrap()
        .contains("Communications"));
}
