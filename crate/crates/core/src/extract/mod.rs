//! Comment extraction, normalization, and deduplication.

mod dedup;
mod lexer;
mod normalize;

pub use dedup::{
    dedup, dedup_normalized, read_comments_jsonl, write_comments_jsonl, DedupIndex, JsonlError, NormalizedComment,
    Provenance,
};
pub use lexer::{extract_comments, lex, Comment, CommentKind, Extraction, LexWarning};
pub use normalize::{normalize, STRIPPED_CHARS};

use crate::corpus::SourceFile;

/// Extract and normalize the comments of one file into a partial index.
/// Comments that normalize to the empty string are skipped.
pub fn index_file(file: &SourceFile, content: &str) -> DedupIndex {
    let mut index = DedupIndex::new();
    for c in extract_comments(content, file.language) {
        let text = normalize(&c.raw_text);
        if text.is_empty() {
            continue;
        }
        index.insert(
            file.language,
            text,
            Provenance {
                repo: file.repo.name().to_string(),
                path: file.rel_path.clone(),
                line: c.start_line,
            },
        );
    }
    index
}

/// Extract and deduplicate the comments of every file, in walk order.
/// Unreadable files are logged and skipped.
pub fn extract_files<I: IntoIterator<Item = SourceFile>>(files: I) -> Vec<NormalizedComment> {
    let mut index = DedupIndex::new();
    for file in files {
        match file.read_lossy() {
            Ok(content) => index.merge(index_file(&file, &content)),
            Err(e) => log::warn!("{}: {e}", file.abs_path().display()),
        }
    }
    index.finish()
}
