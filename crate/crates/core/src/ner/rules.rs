//! Deterministic pattern and lexicon tagger.
//!
//! Rules run in a fixed priority order over tokens; a later rule never
//! claims a token an earlier rule already claimed, so the output spans are
//! non-overlapping.

use std::sync::LazyLock;

use regex::Regex;

use super::lexicon::Lexicons;
use super::tokenize::{tokenize, Token};
use super::{EntitySpan, EntityType, SpanSource};

static INITIALS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{Lu}(?:\.-?\p{Lu}|-\p{Lu})*$").unwrap());
static SURNAME: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{Lu}[\p{L}'’\-]*\p{Ll}[\p{L}'’\-]*$").unwrap());
static DOI_PREFIX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^10\.\d{4,9}$").unwrap());
static DOI_FULL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^10\.\d{4,9}/\S+$").unwrap());
static ISBN_VALUE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[0-9][0-9\-]{8,16}[0-9Xx]$").unwrap());
static ISSN_VALUE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d{4}-\d{3}[\dXx]$").unwrap());
static NUMERIC: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[A-Za-z]?\d+[A-Za-z]?$").unwrap());
static PAGE_RANGE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[A-Za-z]?\d+(?:-{1,2}|–|—)[A-Za-z]?\d+$").unwrap());
static YEAR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d{4})[a-z]?$").unwrap());

/// Lowest and highest year the rule tagger accepts.
pub const YEAR_RANGE: (u32, u32) = (1900, 2029);

const NAME_STOPWORDS: &[&str] = &[
    "A",
    "An",
    "And",
    "As",
    "At",
    "Also",
    "Based",
    "By",
    "For",
    "From",
    "If",
    "In",
    "Is",
    "It",
    "Note",
    "Of",
    "On",
    "Or",
    "Return",
    "Returns",
    "See",
    "So",
    "That",
    "The",
    "These",
    "This",
    "To",
    "Use",
    "Used",
    "We",
    "When",
    "Where",
    "With",
    "Copyright",
    "Version",
    "Section",
    "Chapter",
    "Table",
    "Figure",
    "Fig",
    "Eq",
    "Algorithm",
    "Step",
    "Part",
    "Vol",
    "No",
    "Proc",
    "Proceedings",
    "Journal",
];
const PARTICLES: &[&str] = &[
    "van", "von", "de", "der", "den", "di", "da", "du", "le", "la", "dos", "del",
];
const AUTHOR_JOINERS: &[&str] = &[",", "and", "&", ";", "."];
const MAX_TITLE_TOKENS: usize = 40;

struct Tagger<'a> {
    tokens: &'a [Token],
    claimed: Vec<Option<EntityType>>,
    /// Token ranges `[lo, hi)` with their type.
    spans: Vec<(EntityType, usize, usize)>,
}

impl<'a> Tagger<'a> {
    fn word(&self, i: usize) -> &str {
        self.tokens.get(i).map_or("", |t| t.text.as_str())
    }

    fn free(&self, lo: usize, hi: usize) -> bool {
        hi <= self.tokens.len() && lo < hi && self.claimed[lo..hi].iter().all(Option::is_none)
    }

    fn claim(&mut self, etype: EntityType, lo: usize, hi: usize) -> bool {
        if !self.free(lo, hi) {
            return false;
        }
        for c in &mut self.claimed[lo..hi] {
            *c = Some(etype);
        }
        self.spans.push((etype, lo, hi));
        true
    }

    fn skip_dot(&self, i: usize) -> usize {
        if self.word(i) == "." {
            i + 1
        } else {
            i
        }
    }

    fn urls(&mut self) {
        let n = self.tokens.len();
        let mut i = 0;
        while i < n {
            let w = self.word(i).to_ascii_lowercase();
            let scheme = ["http", "https", "ftp"].contains(&w.as_str()) && self.word(i + 1) == ":";
            let inline = w.starts_with("www.")
                || ["http:", "https:", "ftp:"]
                    .iter()
                    .any(|p| w.starts_with(p) && w.len() > p.len());
            if !(scheme || inline) {
                i += 1;
                continue;
            }
            let mut hi = if scheme { i + 2 } else { i + 1 };
            while hi < n && looks_like_url_part(self.word(hi), self.tokens.get(hi + 1).map(|t| t.text.as_str())) {
                hi += 1;
            }
            self.claim(EntityType::Url, i, hi);
            i = hi;
        }
    }

    fn dois(&mut self) {
        for i in 0..self.tokens.len() {
            let w = self.word(i);
            if DOI_FULL.is_match(w) {
                self.claim(EntityType::Doi, i, i + 1);
            } else if DOI_PREFIX.is_match(w) {
                let next = self.tokens.get(i + 1);
                let suffix =
                    next.is_some_and(|t| !t.is_punct() && t.text.chars().any(|c| c.is_ascii_digit() || c == '.'));
                let hi = if suffix { i + 2 } else { i + 1 };
                self.claim(EntityType::Doi, i, hi);
            }
        }
    }

    fn identifiers(&mut self) {
        for i in 0..self.tokens.len() {
            let label = self.word(i).to_ascii_lowercase();
            let etype = match label.as_str() {
                "isbn" | "isbn-10" | "isbn-13" | "isbn10" | "isbn13" => EntityType::Isbn,
                "issn" => EntityType::Issn,
                _ => continue,
            };
            let mut j = i + 1;
            if self.word(j) == ":" {
                j += 1;
            }
            let value = self.word(j);
            let ok = match etype {
                EntityType::Isbn => {
                    ISBN_VALUE.is_match(value) && value.chars().filter(char::is_ascii_digit).count() >= 9
                }
                _ => ISSN_VALUE.is_match(value),
            };
            if ok {
                self.claim(etype, j, j + 1);
            }
        }
    }

    /// `Vol. 30`, `No. 7`, `pp. 740-755`: the keyword is part of the span.
    fn keyword_numbers(&mut self) {
        for i in 0..self.tokens.len() {
            let key = self.word(i).to_lowercase();
            let etype = match key.as_str() {
                "vol" | "volume" | "vols" => EntityType::Volume,
                "no" | "nr" | "number" | "issue" | "num" => EntityType::Number,
                "pp" | "p" | "pages" | "page" | "pg" | "pgs" => EntityType::Pages,
                _ => continue,
            };
            if key == "p" && self.word(i) != "p" {
                // "P." is an initial, not a page marker
                continue;
            }
            let j = self.skip_dot(i + 1);
            let value = self.word(j);
            let ok = (etype == EntityType::Pages && PAGE_RANGE.is_match(value))
                || (NUMERIC.is_match(value) && value.chars().any(|c| c.is_ascii_digit()));
            if !ok {
                continue;
            }
            let mut hi = j + 1;
            if etype == EntityType::Pages
                && ["-", "--", "–"].contains(&self.word(hi))
                && NUMERIC.is_match(self.word(hi + 1))
            {
                hi += 2;
            }
            self.claim(etype, i, hi);
        }
    }

    fn years(&mut self) {
        for i in 0..self.tokens.len() {
            if let Some(c) = YEAR.captures(self.word(i)) {
                let y: u32 = c[1].parse().unwrap_or(0);
                if (YEAR_RANGE.0..=YEAR_RANGE.1).contains(&y) {
                    self.claim(EntityType::Year, i, i + 1);
                }
            }
        }
    }

    fn months(&mut self, lex: &Lexicons) {
        for i in 0..self.tokens.len() {
            if lex.is_month(self.word(i)) {
                self.claim(EntityType::Month, i, i + 1);
            }
        }
    }

    fn phrases(&mut self, set: &super::lexicon::PhraseSet, etype: EntityType) {
        let mut i = 0;
        while i < self.tokens.len() {
            if let Some(hi) = set.longest_match(self.tokens, i) {
                if self.claim(etype, i, hi) {
                    i = hi;
                    continue;
                }
            }
            i += 1;
        }
    }

    fn is_initial(&self, i: usize) -> bool {
        INITIALS.is_match(self.word(i)) && self.claimed.get(i).is_some_and(Option::is_none)
    }

    fn is_surname(&self, i: usize) -> bool {
        let w = self.word(i);
        SURNAME.is_match(w)
            && !NAME_STOPWORDS.contains(&w)
            && w.chars().count() >= 2
            && self.claimed.get(i).is_some_and(Option::is_none)
    }

    fn authors(&mut self) {
        let n = self.tokens.len();
        let mut i = 0;
        while i < n {
            if let Some(hi) = self.initials_first(i).or_else(|| self.surname_first(i)) {
                if self.claim(EntityType::Author, i, hi) {
                    i = hi;
                    continue;
                }
            }
            if self.is_surname(i) && self.word(i + 1) == "et" && self.word(i + 2).starts_with("al") {
                self.claim(EntityType::Author, i, i + 1);
                i += 3;
                continue;
            }
            i += 1;
        }
    }

    /// `P. A. Flach`, `J.P. Snyder`, `J. van Leeuwen`
    fn initials_first(&self, i: usize) -> Option<usize> {
        let mut j = i;
        while self.is_initial(j) && self.word(j + 1) == "." {
            j += 2;
        }
        if j == i {
            return None;
        }
        while PARTICLES.contains(&self.word(j)) {
            j += 1;
        }
        self.is_surname(j).then_some(j + 1)
    }

    /// `Coppens, P.`, `Becker, P. J.`
    fn surname_first(&self, i: usize) -> Option<usize> {
        if !self.is_surname(i) || self.word(i + 1) != "," {
            return None;
        }
        let mut j = i + 2;
        let mut end = None;
        while self.is_initial(j) {
            if self.word(j + 1) == "." {
                j += 2;
                end = Some(j);
            } else if j + 1 >= self.tokens.len() || [",", ";", "(", ")", "and", "&"].contains(&self.word(j + 1)) {
                j += 1;
                end = Some(j);
                break;
            } else {
                break;
            }
        }
        end
    }

    fn quoted_titles(&mut self) {
        let n = self.tokens.len();
        let mut i = 0;
        while i < n {
            let open = self.word(i);
            let closers: &[&str] = match open {
                "\"" => &["\""],
                "`" => &["'", "`"],
                _ => {
                    i += 1;
                    continue;
                }
            };
            let mut lo = i + 1;
            while lo < n && self.word(lo) == open {
                lo += 1;
            }
            let Some(close) = (lo..n.min(lo + MAX_TITLE_TOKENS + 1)).find(|&k| closers.contains(&self.word(k))) else {
                i += 1;
                continue;
            };
            let wordy = (lo..close)
                .filter(|&k| self.word(k).chars().any(char::is_alphabetic))
                .count();
            if wordy >= 2 && self.free(lo, close) {
                let hi = trim_punct(self.tokens, lo, close).1;
                self.claim(EntityType::Title, lo, hi);
            }
            i = close + 1;
        }
    }

    /// Title as the longest unclaimed stretch after an author group that is
    /// closed by some other entity.
    fn gap_titles(&mut self) {
        let mut spans = self.spans.clone();
        spans.sort_by_key(|s| s.1);
        let mut k = 0;
        let mut found = Vec::new();
        while k < spans.len() {
            if spans[k].0 != EntityType::Author {
                k += 1;
                continue;
            }
            // extend the author group
            let mut g = k;
            while g + 1 < spans.len()
                && spans[g + 1].0 == EntityType::Author
                && (spans[g].2..spans[g + 1].1).all(|t| AUTHOR_JOINERS.contains(&self.word(t)))
            {
                g += 1;
            }
            let mut best: Option<(usize, usize, usize)> = None;
            let mut left_end = spans[g].2;
            let mut r = g + 1;
            while r < spans.len() && spans[r].0 != EntityType::Author {
                let (lo, hi) = trim_punct(self.tokens, left_end, spans[r].1);
                let wordy = (lo..hi)
                    .filter(|&t| self.word(t).chars().any(char::is_alphabetic))
                    .count();
                if lo < hi && wordy >= 2 && hi - lo <= MAX_TITLE_TOKENS && self.free(lo, hi) {
                    let chars = self.tokens[hi - 1].end - self.tokens[lo].start;
                    if best.is_none_or(|b| chars > b.2) {
                        best = Some((lo, hi, chars));
                    }
                }
                left_end = spans[r].2;
                r += 1;
            }
            if let Some((lo, hi, _)) = best {
                found.push((lo, hi));
            }
            k = r;
        }
        for (lo, hi) in found {
            self.claim(EntityType::Title, lo, hi);
        }
    }
}

fn trim_punct(tokens: &[Token], mut lo: usize, mut hi: usize) -> (usize, usize) {
    while lo < hi && tokens[lo].is_punct() {
        lo += 1;
    }
    while hi > lo && tokens[hi - 1].is_punct() {
        hi -= 1;
    }
    (lo, hi)
}

fn looks_like_url_part(word: &str, next: Option<&str>) -> bool {
    if word.is_empty() || word.chars().all(|c| super::tokenize::SPLIT_PUNCT.contains(&c)) {
        return false;
    }
    let marked = |w: &str| {
        w.chars()
            .any(|c| matches!(c, '.' | '-' | '_' | '~' | '%' | '=' | '?' | '&') || c.is_ascii_digit())
    };
    if marked(word) {
        return true;
    }
    // bare path segments only when the path visibly continues
    word.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()) && next.is_some_and(marked)
}

/// Tag `text` with the deterministic rules.
pub fn rule_tag(text: &str, lexicons: &Lexicons) -> Vec<EntitySpan> {
    let tokens = tokenize(text);
    let mut t = Tagger {
        tokens: &tokens,
        claimed: vec![None; tokens.len()],
        spans: Vec::new(),
    };
    t.urls();
    t.dois();
    t.identifiers();
    t.keyword_numbers();
    t.years();
    t.months(lexicons);
    t.phrases(&lexicons.venues, EntityType::BooktitleOrJournal);
    t.phrases(&lexicons.publishers, EntityType::Publisher);
    t.quoted_titles();
    t.authors();
    t.gap_titles();
    let mut spans: Vec<EntitySpan> = t
        .spans
        .iter()
        .map(|&(etype, lo, hi)| EntitySpan::new(etype, tokens[lo].start, tokens[hi - 1].end, SpanSource::Rule))
        .collect();
    spans.sort();
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(text: &str) -> Vec<(EntityType, String)> {
        rule_tag(text, &Lexicons::bundled())
            .into_iter()
            .map(|s| (s.etype, s.text(text).to_string()))
            .collect()
    }

    #[test]
    fn parenthesized_year() {
        assert_eq!(tags("( 1974 )"), [(EntityType::Year, "1974".to_string())]);
        assert_eq!(tags("(1899) (2030)"), []);
    }

    #[test]
    fn volume_and_number_keep_keywords() {
        assert_eq!(
            tags("Vol. 30, No. 7"),
            [
                (EntityType::Volume, "Vol. 30".to_string()),
                (EntityType::Number, "No. 7".to_string())
            ]
        );
        assert_eq!(tags("pp. 740-755"), [(EntityType::Pages, "pp. 740-755".to_string())]);
    }

    #[test]
    fn nothing_fires_on_plain_text() {
        assert!(tags("hello world").is_empty());
        assert!(tags("").is_empty());
    }

    #[test]
    fn author_patterns() {
        let got = tags("P. A. Flach, N. Lachiche and Coppens, P. J. and Smith et al.");
        let authors: Vec<_> = got
            .iter()
            .filter(|(t, _)| *t == EntityType::Author)
            .map(|(_, s)| s.as_str())
            .collect();
        assert_eq!(authors, ["P. A. Flach", "N. Lachiche", "Coppens, P. J.", "Smith"]);
        assert!(tags("See A. The next step").is_empty());
        let got = tags("J.P. Snyder and P. L'Ecuyer");
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn identifiers_and_links() {
        let text =
            "DOI: 10.1109 83.862633 ISBN 0-201-06672-6 ISSN 0098-3500 http: papers.nips.cc paper 5854-spatial.pdf";
        let got = tags(text);
        assert!(got.contains(&(EntityType::Doi, "10.1109 83.862633".to_string())));
        assert!(got.contains(&(EntityType::Isbn, "0-201-06672-6".to_string())));
        assert!(got.contains(&(EntityType::Issn, "0098-3500".to_string())));
        assert!(got.contains(&(
            EntityType::Url,
            "http: papers.nips.cc paper 5854-spatial.pdf".to_string()
        )));
    }

    #[test]
    fn titles_from_quotes_and_gaps() {
        let got = tags("Scoccimarro, R., `Fast estimators for redshift-space clustering`, Phys. Review D, 2015");
        assert!(got.contains(&(
            EntityType::Title,
            "Fast estimators for redshift-space clustering".to_string()
        )));
        let got = tags("M. Matsumoto, T. Nishimura. Mersenne twister: a uniform generator. ACM Transactions on Modeling and Computer Simulation, 1998");
        assert!(
            got.contains(&(EntityType::Title, "Mersenne twister: a uniform generator".to_string())),
            "{got:?}"
        );
        assert!(got.contains(&(
            EntityType::BooktitleOrJournal,
            "ACM Transactions on Modeling and Computer Simulation".to_string()
        )));
    }

    #[test]
    fn spans_never_overlap() {
        let text = "Knuth, D. E. The Art of Computer Programming, Vol. 2, Addison-Wesley, 1981, pp. 1-10, June";
        let spans = rule_tag(text, &Lexicons::bundled());
        for w in spans.windows(2) {
            assert!(w[0].end <= w[1].start);
        }
        assert!(spans.iter().any(|s| s.etype == EntityType::Publisher));
        assert!(spans.iter().any(|s| s.etype == EntityType::Month));
    }
}
