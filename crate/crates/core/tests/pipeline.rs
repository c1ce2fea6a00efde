use std::fs;
use std::sync::OnceLock;

use codecite::corpus::{filter_active_repos, walk_corpus, RepoRef, WalkOptions};
use codecite::dataset::load_annotations;
use codecite::detect::{detect_with_model, BibtexWriter};
use codecite::extract::{extract_files, read_comments_jsonl, write_comments_jsonl};
use codecite::ner::{train, TrainOptions};
use codecite::report::{full_report, render, ReportFormat};
use codecite::{DetectedComment, DetectionCriterion, Language, TaggerModel};

const GOLD: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/gold.jsonl");

fn model() -> &'static TaggerModel {
    static MODEL: OnceLock<TaggerModel> = OnceLock::new();
    MODEL.get_or_init(|| train(&load_annotations(GOLD.as_ref()).unwrap(), &TrainOptions::default()).unwrap())
}

fn commits(n: usize) -> String {
    (0..n)
        .map(|i| format!("{{\"date\": \"2015-{:02}-01\"}}\n", i % 12 + 1))
        .collect()
}

#[test]
fn repository_to_bibtex() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("numerics");
    fs::create_dir_all(repo.join("src")).unwrap();
    fs::write(repo.join("commits.jsonl"), commits(700)).unwrap();
    fs::write(
        repo.join("src/Fft.java"),
        "/**\n * Algorithm from Cooley, J. W.; Tukey, J. W., An algorithm for the machine calculation of\n \
         * complex Fourier series, Mathematics of Computation, April 1965, 19 (90), 297-301.\n */\n\
         class Fft {\n  // TODO: radix 4\n  String s = \"/* not a comment */\";\n}\n",
    )
    .unwrap();
    fs::write(repo.join("src/util.java"), "// TODO: radix 4\n").unwrap();

    let repos = vec![RepoRef::open(&repo).unwrap()];
    let active = filter_active_repos(&repos).unwrap();
    assert_eq!(active.kept.len(), 1);
    let comments = extract_files(walk_corpus(&active.kept, WalkOptions::default()).unwrap());
    assert_eq!(comments.len(), 2);
    let todo = comments.iter().find(|c| c.text == "TODO: radix 4").unwrap();
    assert_eq!(todo.occurrences, 2);
    assert!(comments
        .iter()
        .all(|c| c.language == Language::Java && !c.text.contains("not a comment")));

    let mut buf = Vec::new();
    write_comments_jsonl(&mut buf, &comments).unwrap();
    assert_eq!(read_comments_jsonl(&buf[..]).unwrap(), comments);

    let criterion = DetectionCriterion::default();
    let detected: Vec<DetectedComment> = comments
        .iter()
        .filter_map(|c| {
            let r = detect_with_model(model(), &c.text, &criterion);
            r.detected.then(|| DetectedComment {
                lang: c.language,
                text: c.text.clone(),
                largest_gap: r.largest_gap,
                records: r.records,
            })
        })
        .collect();
    assert_eq!(detected.len(), 1);
    let rec = &detected[0].records[0];
    assert_eq!(rec.year.as_deref(), Some("1965"));
    assert_eq!(rec.venue.as_deref(), Some("Mathematics of Computation"));

    let mut bib = BibtexWriter::new();
    let first = bib.entry(rec);
    assert!(first.starts_with("@misc{cooley1965an,"), "{first}");
    assert!(first.contains("journal = {Mathematics of Computation}"), "{first}");
    assert!(bib.entry(rec).starts_with("@misc{cooley1965an-2,"));

    let md = render(&full_report(&detected, 1), ReportFormat::Markdown);
    assert!(md.contains("Java"), "{md}");
    assert!(md.contains("1960"), "{md}");
}
