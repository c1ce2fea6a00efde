use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use codecite::corpus::{discover_repos, filter_active_repos, walk_corpus, RejectReason, RepoRef, WalkOptions};
use codecite::dataset::{draw_sample, group_comments, load_annotations, sample_size, SampleSpec};
use codecite::detect::{write_detections_jsonl, BibtexWriter, DEFAULT_MAX_GAP};
use codecite::eval::{self, KappaReport};
use codecite::extract::{index_file, read_comments_jsonl, write_comments_jsonl, DedupIndex, NormalizedComment};
use codecite::ner::{train, Lexicons, TrainOptions};
use codecite::report::{self, Table};
use codecite::{detect, AnnotatedComment, DetectedComment, DetectionCriterion, EntitySpan, EntityType, TaggerModel};

use crate::config::PipelineConfig;
use crate::{Cli, Command, CorpusArgs, UsageError};

/// Effective settings after merging flags over the config file.
struct Ctx {
    cfg: PipelineConfig,
    seed: u64,
    pool: rayon::ThreadPool,
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let jobs = cli.jobs.map(|j| j as usize).or(cfg.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("cannot start worker threads")?;
    let ctx = Ctx {
        seed: cli.seed.or(cfg.seed).unwrap_or(42),
        cfg,
        pool,
    };
    match cli.command {
        Command::Scan(a) => scan(&ctx, a),
        Command::Extract(a) => extract(&ctx, a),
        Command::Train(a) => train_cmd(&ctx, a),
        Command::Tag(a) => tag(&ctx, a),
        Command::Detect(a) => detect_cmd(&ctx, a),
        Command::Evaluate(a) => evaluate(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Sample(a) => sample(&ctx, a),
        Command::Report(a) => report_cmd(a),
        Command::Search(a) => search(a),
        Command::Kappa(a) => kappa(a),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// A file when given, stdout otherwise.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_comments(path: &Path) -> Result<Vec<NormalizedComment>> {
    read_comments_jsonl(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_gold(path: &Path) -> Result<Vec<AnnotatedComment>> {
    load_annotations(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(ctx: &Ctx, flag: Option<&PathBuf>) -> Result<TaggerModel> {
    let path = flag
        .or(ctx.cfg.model.as_ref())
        .ok_or_else(|| usage("no model given (use --model or set `model` in the config)"))?;
    TaggerModel::load(open(path)?).with_context(|| format!("loading model {}", path.display()))
}

fn train_options(ctx: &Ctx, epochs: Option<usize>, lexicons: Option<&PathBuf>) -> Result<TrainOptions> {
    let lexicons = match lexicons.or(ctx.cfg.lexicons.as_ref()) {
        Some(dir) => Lexicons::load_dir(dir).with_context(|| format!("loading lexicons from {}", dir.display()))?,
        None => Lexicons::bundled(),
    };
    Ok(TrainOptions {
        epochs: epochs.or(ctx.cfg.epochs).unwrap_or(20),
        seed: ctx.seed,
        lexicons,
    })
}

fn max_gap(ctx: &Ctx, flag: Option<i64>) -> usize {
    flag.map(|d| d as usize).or(ctx.cfg.max_gap).unwrap_or(DEFAULT_MAX_GAP)
}

fn required_types(ctx: &Ctx, flag: &[EntityType]) -> Vec<EntityType> {
    if !flag.is_empty() {
        return flag.to_vec();
    }
    ctx.cfg
        .required_types
        .clone()
        .unwrap_or_else(|| DetectionCriterion::default().required_types().iter().copied().collect())
}

/// (repository, reason) pairs.
type Rejected = Vec<(String, String)>;

fn repos(ctx: &Ctx, args: &CorpusArgs) -> Result<(Vec<RepoRef>, Rejected)> {
    let dirs = if args.corpus.is_empty() {
        &ctx.cfg.corpus
    } else {
        &args.corpus
    };
    if dirs.is_empty() {
        return Err(usage("no corpus given (use --corpus or set `corpus` in the config)"));
    }
    let mut all = Vec::new();
    for dir in dirs {
        all.extend(discover_repos(dir).with_context(|| format!("scanning {}", dir.display()))?);
    }
    if args.all_repos {
        return Ok((all, Vec::new()));
    }
    let report = filter_active_repos(&all)?;
    let rejected = report
        .rejected
        .into_iter()
        .map(|r| {
            let why = match r.reason {
                RejectReason::MissingCommitDates => "no commit dates".to_string(),
                RejectReason::TooFewCommits { total } => format!("{total} commits"),
                RejectReason::InactiveWindow { best_window } => {
                    format!("{best_window} commits in the busiest two years")
                }
            };
            (r.repo, why)
        })
        .collect();
    Ok((report.kept, rejected))
}

fn scan(ctx: &Ctx, a: crate::ScanArgs) -> Result<()> {
    let (kept, rejected) = repos(ctx, &a.corpus)?;
    let summary = json!({
        "kept": kept.iter().map(|r| r.name()).collect::<Vec<_>>(),
        "rejected": rejected.iter().map(|(repo, reason)| json!({"repo": repo, "reason": reason})).collect::<Vec<_>>(),
    });
    let mut out = output(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    out.flush()?;
    info!("{} repositories kept, {} rejected", kept.len(), rejected.len());
    Ok(())
}

fn extract(ctx: &Ctx, a: crate::ExtractArgs) -> Result<()> {
    let (kept, _) = repos(ctx, &a.corpus)?;
    let mut options = WalkOptions {
        extensions: ctx.cfg.extensions.clone(),
        ..WalkOptions::default()
    };
    if let Some(cap) = a.max_file_size.or(ctx.cfg.max_file_size) {
        options.max_file_size = cap;
    }
    let files: Vec<_> = walk_corpus(&kept, options)?.collect();
    info!("{} files in {} repositories", files.len(), kept.len());
    let partials: Vec<DedupIndex> = ctx.pool.install(|| {
        files
            .par_iter()
            .map(|f| match f.read_lossy() {
                Ok(content) => index_file(f, &content),
                Err(e) => {
                    warn!("{}: {e}", f.abs_path().display());
                    DedupIndex::new()
                }
            })
            .collect()
    });
    let mut index = DedupIndex::new();
    for p in partials {
        index.merge(p);
    }
    let comments = index.finish();
    info!("{} distinct comments", comments.len());
    write_comments_jsonl(output(a.out.as_deref())?, &comments)?;
    Ok(())
}

fn train_cmd(ctx: &Ctx, a: crate::TrainArgs) -> Result<()> {
    let gold = load_gold(&a.gold)?;
    let options = train_options(ctx, a.epochs, a.lexicons.as_ref())?;
    let model = train(&gold, &options)?;
    let mut out = create(&a.out)?;
    model.save(&mut out)?;
    out.flush()?;
    info!(
        "trained on {} comments, {} features; fingerprint {}",
        gold.len(),
        model.num_features(),
        model.fingerprint()
    );
    Ok(())
}

#[derive(Serialize)]
struct TaggedLine<'a> {
    lang: codecite::Language,
    text: &'a str,
    entities: Vec<EntitySpan>,
}

fn tag(ctx: &Ctx, a: crate::TagArgs) -> Result<()> {
    let model = load_model(ctx, a.model.as_ref())?;
    let comments = load_comments(&a.input)?;
    let tagged: Vec<Vec<EntitySpan>> = ctx
        .pool
        .install(|| comments.par_iter().map(|c| model.tag_with_rules(&c.text)).collect());
    let mut out = output(a.out.as_deref())?;
    for (c, entities) in comments.iter().zip(tagged) {
        serde_json::to_writer(
            &mut out,
            &TaggedLine {
                lang: c.language,
                text: &c.text,
                entities,
            },
        )?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn detect_cmd(ctx: &Ctx, a: crate::DetectArgs) -> Result<()> {
    let criterion = DetectionCriterion::new(
        required_types(ctx, &a.criterion.require),
        max_gap(ctx, a.criterion.max_gap),
    )
    .map_err(|e| usage(e.to_string()))?;
    let model = load_model(ctx, a.model.as_ref())?;
    let comments = load_comments(&a.input)?;
    let results: Vec<_> = ctx.pool.install(|| {
        comments
            .par_iter()
            .map(|c| codecite::detect::detect_with_model(&model, &c.text, &criterion))
            .collect()
    });
    let detected: Vec<DetectedComment> = comments
        .iter()
        .zip(results)
        .filter(|(_, r)| r.detected)
        .map(|(c, r)| DetectedComment {
            lang: c.language,
            text: c.text.clone(),
            largest_gap: r.largest_gap,
            records: r.records,
        })
        .collect();
    write_detections_jsonl(create(&a.out_dir.join("detections.jsonl"))?, &detected)?;
    if a.bibtex {
        let mut bib = create(&a.out_dir.join("references.bib"))?;
        let mut writer = BibtexWriter::new();
        for r in detected.iter().flat_map(|d| &d.records) {
            writeln!(bib, "{}", writer.entry(r))?;
        }
        bib.flush()?;
    }
    let records: usize = detected.iter().map(|d| d.records.len()).sum();
    eprintln!(
        "{} of {} comments contain references ({records} records)",
        detected.len(),
        comments.len()
    );
    Ok(())
}

fn print_kappa(path: &Path) -> Result<KappaReport> {
    let (a, b) = eval::read_kappa_csv(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    let r = eval::kappa_report(&a, &b)?;
    eprintln!("kappa {:.3} over {} items", r.kappa, r.items);
    if r.flagged {
        warn!(
            "agreement {:.3} does not exceed {}; guidelines need revision",
            r.kappa,
            eval::KAPPA_THRESHOLD
        );
    }
    Ok(r)
}

fn evaluate(ctx: &Ctx, a: crate::EvaluateArgs) -> Result<()> {
    if let Some(path) = &a.kappa {
        print_kappa(path)?;
    }
    let gold = load_gold(&a.gold)?;
    let d = max_gap(ctx, a.max_gap);
    let options = train_options(ctx, a.epochs, None)?;
    let combos = eval::standard_combos();
    let cv = eval::cross_validate(&gold, a.folds as usize, ctx.seed, &combos, d, &options)?;
    let rows = || cv.combos.iter().map(|c| (&c.combo, c.max_gap, &c.metrics));
    eval::write_metrics_csv(io::stdout().lock(), rows())?;

    let criterion = DetectionCriterion::default().with_max_gap(d);
    let results: Vec<_> = gold
        .iter()
        .zip(&cv.predictions)
        .map(|(g, p)| detect(&g.text, p, &criterion))
        .collect();
    let texts: Vec<&str> = gold.iter().map(|g| g.text.as_str()).collect();
    let overlap = eval::baseline_overlap(&texts, &results);
    eprintln!(
        "baseline finds {} of {} detections ({:.0}%)",
        overlap.both,
        overlap.pipeline_detected,
        100.0 * overlap.fraction
    );
    if let Some(dir) = &a.out_dir {
        eval::write_metrics_csv(create(&dir.join("metrics.csv"))?, rows())?;
        let acc = eval::entity_accuracy(&gold, &cv.predictions)?;
        eval::write_entity_csv(create(&dir.join("entities.csv"))?, &acc)?;
        let mut f = create(&dir.join("baseline.json"))?;
        serde_json::to_writer_pretty(&mut f, &overlap)?;
        writeln!(f)?;
        f.flush()?;
    }
    Ok(())
}

fn sweep(ctx: &Ctx, a: crate::SweepArgs) -> Result<()> {
    if a.from > a.to {
        return Err(usage(format!("--from {} is larger than --to {}", a.from, a.to)));
    }
    let combo: BTreeSet<EntityType> = required_types(ctx, &a.require).into_iter().collect();
    let gold = load_gold(&a.gold)?;
    let gaps: Vec<usize> = (a.from..=a.to).collect();
    let result = if a.model.is_some() || ctx.cfg.model.is_some() {
        let model = load_model(ctx, a.model.as_ref())?;
        eval::sensitivity_sweep(&gold, &model, &combo, &gaps)
    } else {
        let options = train_options(ctx, a.epochs, None)?;
        let cv = eval::cross_validate(&gold, a.folds as usize, ctx.seed, &[], 0, &options)?;
        eval::sweep_tagged(&gold, &cv.predictions, &combo, &gaps)
    };
    eval::write_metrics_csv(
        io::stdout().lock(),
        result.points.iter().map(|p| (&result.combo, p.max_gap, &p.metrics)),
    )?;
    if let Some(best) = result.best_max_gap {
        eprintln!("best max gap: {best}");
    }
    Ok(())
}

fn sample(ctx: &Ctx, a: crate::SampleArgs) -> Result<()> {
    let spec = SampleSpec::new(a.confidence, a.interval).map_err(|e| usage(e.to_string()))?;
    if let Some(n) = a.population {
        println!("{}", sample_size(n, &spec));
        return Ok(());
    }
    let Some(input) = &a.input else {
        return Err(usage("give --population N or --in comments.jsonl --keyword K"));
    };
    let comments = load_comments(input)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["keyword", "group", "population", "sample"])?;
    for keyword in &a.keyword {
        let group = ctx.cfg.group(keyword);
        let mentions: Vec<NormalizedComment> = comments
            .iter()
            .filter(|c| group.matches_keyword(&c.text))
            .cloned()
            .collect();
        let (ga, gb) = group_comments(&mentions, &group);
        for (name, members) in [("a", ga), ("b", gb)] {
            let n = sample_size(members.len() as u64, &spec);
            out.write_record([group.keyword.as_str(), name, &members.len().to_string(), &n.to_string()])?;
            if let Some(dir) = &a.out_dir {
                let picked = draw_sample(&members, n as usize, ctx.seed)?;
                let path = dir.join(format!("{}_{name}.jsonl", group.keyword));
                write_comments_jsonl(create(&path)?, &picked)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn load_detections(path: &Path) -> Result<Vec<DetectedComment>> {
    codecite::detect::read_detections_jsonl(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn write_tables(tables: &[Table], format: report::ReportFormat, path: Option<&Path>) -> Result<()> {
    let mut out = output(path)?;
    out.write_all(report::render(tables, format).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn report_cmd(a: crate::ReportArgs) -> Result<()> {
    let detections = load_detections(&a.input)?;
    write_tables(
        &report::full_report(&detections, a.min_count),
        a.format,
        a.out.as_deref(),
    )
}

fn search(a: crate::SearchArgs) -> Result<()> {
    let comments = load_comments(&a.input)?;
    let r = report::search_title(&comments, &a.query);
    write_tables(&[report::search_table(&a.query, &r)], a.format, None)
}

fn kappa(a: crate::KappaArgs) -> Result<()> {
    let r = print_kappa(&a.input)?;
    println!("items,kappa,flagged");
    println!("{},{:.4},{}", r.items, r.kappa, r.flagged);
    Ok(())
}
