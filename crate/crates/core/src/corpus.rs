//! Repository ingestion: activity filtering and deterministic file walking.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{Datelike, NaiveDate};
use log::warn;
use serde::Deserialize;
use walkdir::WalkDir;

use crate::language::{classify_language, Language};

/// Name of the per-repository commit metadata sidecar.
pub const COMMITS_SIDECAR: &str = "commits.jsonl";

/// Default cap on file size; larger files are skipped by the walker.
pub const DEFAULT_MAX_FILE_SIZE: u64 = 4 * 1024 * 1024;

/// Commits required in total (strictly more than this).
pub const MIN_TOTAL_COMMITS: usize = 500;
/// Commits required within the best pair of consecutive calendar years.
pub const MIN_WINDOW_COMMITS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("repository name is empty for {0}")]
    EmptyName(PathBuf),
    #[error("{path}:{line}: bad commit record: {message}")]
    BadCommitRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One cloned repository in the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepoRef {
    root_path: PathBuf,
    name: String,
    commit_dates: Option<Vec<NaiveDate>>,
}

#[derive(Deserialize)]
struct CommitLine {
    date: String,
}

impl RepoRef {
    pub fn new(
        root_path: impl Into<PathBuf>,
        name: impl Into<String>,
        commit_dates: Option<Vec<NaiveDate>>,
    ) -> Result<Self, CorpusError> {
        let root_path = root_path.into();
        let name = name.into();
        if !root_path.is_dir() {
            return Err(CorpusError::NotADirectory(root_path));
        }
        if name.is_empty() {
            return Err(CorpusError::EmptyName(root_path));
        }
        Ok(RepoRef {
            root_path,
            name,
            commit_dates,
        })
    }

    /// Open a repository directory, naming it after the directory and reading
    /// the commit sidecar when one is present.
    pub fn open(root_path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let root = root_path.as_ref();
        if !root.is_dir() {
            return Err(CorpusError::NotADirectory(root.to_path_buf()));
        }
        let name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let sidecar = root.join(COMMITS_SIDECAR);
        let dates = if sidecar.is_file() {
            Some(read_commit_dates(&sidecar)?)
        } else {
            None
        };
        RepoRef::new(root, name, dates)
    }

    pub fn root_path(&self) -> &Path {
        &self.root_path
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn commit_dates(&self) -> Option<&[NaiveDate]> {
        self.commit_dates.as_deref()
    }
}

/// Parse a `commits.jsonl` sidecar. Blank lines are ignored.
pub fn read_commit_dates(path: &Path) -> Result<Vec<NaiveDate>, CorpusError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut dates = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| CorpusError::BadCommitRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let rec: CommitLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let date = NaiveDate::parse_from_str(&rec.date, "%Y-%m-%d").map_err(|e| bad(format!("{:?}: {e}", rec.date)))?;
        dates.push(date);
    }
    Ok(dates)
}

/// Treat every immediate subdirectory of `corpus_dir` as one repository,
/// returned sorted by name.
pub fn discover_repos(corpus_dir: &Path) -> Result<Vec<RepoRef>, CorpusError> {
    if !corpus_dir.is_dir() {
        return Err(CorpusError::NotADirectory(corpus_dir.to_path_buf()));
    }
    let mut repos = Vec::new();
    for entry in fs::read_dir(corpus_dir)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            repos.push(RepoRef::open(entry.path())?);
        }
    }
    repos.sort_by(|a, b| a.name.as_bytes().cmp(b.name.as_bytes()));
    Ok(repos)
}

/// Largest number of commits falling in two consecutive calendar years.
pub fn best_two_year_window(dates: &[NaiveDate]) -> usize {
    let mut per_year: BTreeMap<i32, usize> = BTreeMap::new();
    for d in dates {
        *per_year.entry(d.year()).or_default() += 1;
    }
    per_year
        .iter()
        .map(|(&year, &count)| count + per_year.get(&(year + 1)).copied().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    MissingCommitDates,
    TooFewCommits { total: usize },
    InactiveWindow { best_window: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub repo: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default)]
pub struct ActivityReport {
    pub kept: Vec<RepoRef>,
    pub rejected: Vec<Rejection>,
}

/// Keep repositories with more than 500 commits and at least 100 commits in
/// their most active pair of consecutive calendar years.
///
/// Every metadata line counts as one commit, merges included.
pub fn filter_active_repos(repos: &[RepoRef]) -> Result<ActivityReport, CorpusError> {
    if repos.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut report = ActivityReport::default();
    for repo in repos {
        let reason = match repo.commit_dates() {
            None => Some(RejectReason::MissingCommitDates),
            Some(dates) if dates.len() <= MIN_TOTAL_COMMITS => Some(RejectReason::TooFewCommits { total: dates.len() }),
            Some(dates) => {
                let best_window = best_two_year_window(dates);
                (best_window < MIN_WINDOW_COMMITS).then_some(RejectReason::InactiveWindow { best_window })
            }
        };
        match reason {
            None => report.kept.push(repo.clone()),
            Some(reason) => {
                if reason == RejectReason::MissingCommitDates {
                    warn!("{}: no {COMMITS_SIDECAR}; repository rejected", repo.name);
                }
                report.rejected.push(Rejection {
                    repo: repo.name.clone(),
                    reason,
                });
            }
        }
    }
    Ok(report)
}

/// A classifiable file inside a repository.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub repo: Arc<RepoRef>,
    /// Forward-slash path relative to the repository root.
    pub rel_path: String,
    pub language: Language,
}

impl SourceFile {
    pub fn abs_path(&self) -> PathBuf {
        self.repo.root_path.join(&self.rel_path)
    }

    /// Read the file, replacing invalid UTF-8 sequences.
    pub fn read_lossy(&self) -> std::io::Result<String> {
        let bytes = fs::read(self.abs_path())?;
        Ok(match String::from_utf8(bytes) {
            Ok(s) => s,
            Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct WalkOptions {
    pub max_file_size: u64,
    /// Extension (lowercase, no dot) to language overrides, checked first.
    pub extensions: BTreeMap<String, Language>,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            max_file_size: DEFAULT_MAX_FILE_SIZE,
            extensions: BTreeMap::new(),
        }
    }
}

/// Iterator over every classifiable file of a set of repositories.
///
/// Repositories are visited by name and files by relative path, both in byte
/// order. Each repository is listed only when the walk reaches it.
pub struct CorpusWalker {
    repos: std::vec::IntoIter<Arc<RepoRef>>,
    current: std::vec::IntoIter<SourceFile>,
    options: WalkOptions,
}

impl Iterator for CorpusWalker {
    type Item = SourceFile;

    fn next(&mut self) -> Option<SourceFile> {
        loop {
            if let Some(f) = self.current.next() {
                return Some(f);
            }
            let repo = self.repos.next()?;
            self.current = list_repo(&repo, &self.options).into_iter();
        }
    }
}

pub fn walk_corpus(repos: &[RepoRef], options: WalkOptions) -> Result<CorpusWalker, CorpusError> {
    if repos.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut sorted: Vec<Arc<RepoRef>> = repos.iter().cloned().map(Arc::new).collect();
    sorted.sort_by(|a, b| {
        a.name
            .as_bytes()
            .cmp(b.name.as_bytes())
            .then_with(|| a.root_path.cmp(&b.root_path))
    });
    Ok(CorpusWalker {
        repos: sorted.into_iter(),
        current: Vec::new().into_iter(),
        options,
    })
}

fn override_language(path: &str, map: &BTreeMap<String, Language>) -> Option<Language> {
    if map.is_empty() {
        return None;
    }
    let name = path.rsplit('/').next()?;
    let (_, ext) = name.rsplit_once('.')?;
    map.get(&ext.to_ascii_lowercase()).copied()
}

fn list_repo(repo: &Arc<RepoRef>, options: &WalkOptions) -> Vec<SourceFile> {
    let mut files = Vec::new();
    for entry in WalkDir::new(&repo.root_path).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                warn!("{}: {e}", repo.name);
                continue;
            }
        };
        let ft = entry.file_type();
        if ft.is_symlink() || !ft.is_file() {
            continue;
        }
        let Ok(rel) = entry.path().strip_prefix(&repo.root_path) else {
            continue;
        };
        let rel_path = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let Some(language) = override_language(&rel_path, &options.extensions).or_else(|| classify_language(&rel_path))
        else {
            continue;
        };
        match entry.metadata() {
            Ok(meta) if meta.len() > options.max_file_size => {
                log::debug!("{}/{rel_path}: over size cap, skipped", repo.name);
                continue;
            }
            Ok(_) => {}
            Err(e) => {
                warn!("{}/{rel_path}: {e}", repo.name);
                continue;
            }
        }
        files.push(SourceFile {
            repo: Arc::clone(repo),
            rel_path,
            language,
        });
    }
    files.sort_by(|a, b| a.rel_path.as_bytes().cmp(b.rel_path.as_bytes()));
    files
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dates(spec: &[(i32, usize)]) -> Vec<NaiveDate> {
        spec.iter()
            .flat_map(|&(y, n)| (0..n).map(move |i| NaiveDate::from_ymd_opt(y, 1 + (i % 12) as u32, 1).unwrap()))
            .collect()
    }

    fn repo_with(dir: &Path, name: &str, d: Option<Vec<NaiveDate>>) -> RepoRef {
        let root = dir.join(name);
        fs::create_dir_all(&root).unwrap();
        RepoRef::new(root, name, d).unwrap()
    }

    /// Every pair of consecutive calendar years, enumerated directly.
    fn brute_window(d: &[NaiveDate]) -> usize {
        let (Some(lo), Some(hi)) = (d.iter().map(|x| x.year()).min(), d.iter().map(|x| x.year()).max()) else {
            return 0;
        };
        (lo..=hi)
            .map(|y| d.iter().filter(|x| x.year() == y || x.year() == y + 1).count())
            .max()
            .unwrap()
    }

    #[test]
    fn activity_thresholds() {
        let tmp = tempfile::tempdir().unwrap();
        // 501 commits, 120 of them in 2015-2016
        let mut active = dates(&[(2015, 60), (2016, 60)]);
        active.extend(dates(&[
            (2005, 50),
            (2007, 50),
            (2009, 50),
            (2011, 50),
            (2013, 50),
            (2018, 50),
            (2020, 50),
        ]));
        active.extend(dates(&[(2001, 31)]));
        assert_eq!(active.len(), 501);
        let exactly_500 = dates(&[(2015, 250), (2016, 250)]);
        let spread = dates(&(1990..2010).map(|y| (y, 30)).collect::<Vec<_>>());
        assert_eq!(spread.len(), 600);
        assert_eq!(best_two_year_window(&spread), 60);
        assert_eq!(brute_window(&spread), 60);

        let repos = vec![
            repo_with(tmp.path(), "active", Some(active)),
            repo_with(tmp.path(), "five-hundred", Some(exactly_500)),
            repo_with(tmp.path(), "spread", Some(spread)),
            repo_with(tmp.path(), "nometa", None),
        ];
        let report = filter_active_repos(&repos).unwrap();
        let kept: Vec<_> = report.kept.iter().map(|r| r.name()).collect();
        assert_eq!(kept, ["active"]);
        assert_eq!(report.rejected.len(), 3);
        assert!(report
            .rejected
            .iter()
            .any(|r| r.repo == "five-hundred" && r.reason == RejectReason::TooFewCommits { total: 500 }));
        assert!(report
            .rejected
            .iter()
            .any(|r| r.repo == "spread" && r.reason == RejectReason::InactiveWindow { best_window: 60 }));
        assert!(report
            .rejected
            .iter()
            .any(|r| r.repo == "nometa" && r.reason == RejectReason::MissingCommitDates));

        let again = filter_active_repos(&report.kept).unwrap();
        assert_eq!(again.kept, report.kept);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(filter_active_repos(&[]), Err(CorpusError::EmptyCorpus)));
        assert!(matches!(
            walk_corpus(&[], WalkOptions::default()),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn window_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(0..300);
            let d: Vec<NaiveDate> = (0..n)
                .map(|_| NaiveDate::from_ymd_opt(rng.gen_range(1995..2020), rng.gen_range(1..=12), 1).unwrap())
                .collect();
            assert_eq!(best_two_year_window(&d), brute_window(&d));
        }
    }

    #[test]
    fn sidecar_parsing() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("r");
        fs::create_dir(&root).unwrap();
        fs::write(
            root.join(COMMITS_SIDECAR),
            "{\"date\":\"2015-03-01\"}\n\n{\"date\":\"2016-12-31\"}\n",
        )
        .unwrap();
        let repo = RepoRef::open(&root).unwrap();
        assert_eq!(repo.name(), "r");
        assert_eq!(repo.commit_dates().unwrap().len(), 2);

        fs::write(root.join(COMMITS_SIDECAR), "{\"date\":\"2015-3-01x\"}\n").unwrap();
        let err = RepoRef::open(&root).unwrap_err();
        assert!(matches!(err, CorpusError::BadCommitRecord { line: 1, .. }));
    }

    #[test]
    fn walk_order_and_filtering() {
        let tmp = tempfile::tempdir().unwrap();
        let beta = tmp.path().join("beta");
        let alpha = tmp.path().join("alpha");
        for d in [&beta, &alpha] {
            fs::create_dir_all(d.join("sub")).unwrap();
        }
        fs::write(beta.join("b.c"), "int b;").unwrap();
        fs::write(beta.join("a.c"), "int a;").unwrap();
        fs::write(beta.join("img.png"), [0u8, 1, 2]).unwrap();
        fs::write(alpha.join("sub/x.py"), "# x").unwrap();
        fs::write(alpha.join("sub-y.rb"), "# y").unwrap();
        fs::write(alpha.join("big.java"), vec![b' '; 64]).unwrap();

        let repos = vec![RepoRef::open(&beta).unwrap(), RepoRef::open(&alpha).unwrap()];
        let opts = WalkOptions {
            max_file_size: 32,
            ..Default::default()
        };
        let got: Vec<(String, String)> = walk_corpus(&repos, opts.clone())
            .unwrap()
            .map(|f| (f.repo.name().to_string(), f.rel_path.clone()))
            .collect();
        assert_eq!(
            got,
            [
                ("alpha".to_string(), "sub-y.rb".to_string()),
                ("alpha".to_string(), "sub/x.py".to_string()),
                ("beta".to_string(), "a.c".to_string()),
                ("beta".to_string(), "b.c".to_string()),
            ]
        );
        let again: Vec<_> = walk_corpus(&repos, opts).unwrap().map(|f| f.rel_path).collect();
        assert_eq!(again, got.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn only_images_yield_nothing() {
        let tmp = tempfile::tempdir().unwrap();
        let r = tmp.path().join("img");
        fs::create_dir(&r).unwrap();
        fs::write(r.join("img.png"), [0u8]).unwrap();
        let repos = vec![RepoRef::open(&r).unwrap()];
        assert_eq!(walk_corpus(&repos, WalkOptions::default()).unwrap().count(), 0);
    }

    #[cfg(unix)]
    #[test]
    fn symlinks_are_skipped() {
        let tmp = tempfile::tempdir().unwrap();
        let r = tmp.path().join("r");
        fs::create_dir(&r).unwrap();
        fs::write(r.join("real.c"), "int x;").unwrap();
        std::os::unix::fs::symlink(r.join("real.c"), r.join("link.c")).unwrap();
        let repos = vec![RepoRef::open(&r).unwrap()];
        let files: Vec<_> = walk_corpus(&repos, WalkOptions::default())
            .unwrap()
            .map(|f| f.rel_path)
            .collect();
        assert_eq!(files, ["real.c"]);
    }
}
