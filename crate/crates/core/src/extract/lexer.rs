//! Comment lexer for the seven supported languages.
//!
//! The lexer only distinguishes code, string-like literals, and comments.
//! All delimiters are ASCII, so scanning works on bytes and every slice
//! boundary falls on a UTF-8 character boundary.

use serde::{Deserialize, Serialize};

use crate::language::Language;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommentKind {
    Line,
    Block,
}

/// One comment as it appears in the source, delimiters excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub kind: CommentKind,
    /// 1-based line of the opening delimiter.
    pub start_line: usize,
    /// 1-based line of the closing delimiter (or of the last character).
    pub end_line: usize,
    pub raw_text: String,
    /// Byte offset of `raw_text` in the source.
    pub start: usize,
    /// Exclusive byte end of `raw_text` in the source.
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexWarning {
    /// A block comment runs to end of file; it was emitted anyway.
    UnterminatedBlockComment { line: usize },
}

/// Comments plus any non-fatal problems found while lexing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub comments: Vec<Comment>,
    pub warnings: Vec<LexWarning>,
}

/// Extract every line and block comment from `content`.
///
/// Comment markers inside string literals are ignored. Adjacent line
/// comments are reported individually. Empty comments (`//`, `/**/`) are
/// dropped.
pub fn extract_comments(content: &str, language: Language) -> Vec<Comment> {
    lex(content, language).comments
}

pub fn lex(content: &str, language: Language) -> Extraction {
    let mut lexer = Lexer::new(content, language);
    lexer.run();
    for w in &lexer.out.warnings {
        let LexWarning::UnterminatedBlockComment { line } = w;
        log::warn!("unterminated block comment starting at line {line}");
    }
    lexer.out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    Eof,
    /// Closing brace of an interpolation such as `#{...}` or `${...}`.
    Brace,
}

struct Lexer<'a> {
    src: &'a str,
    b: &'a [u8],
    pos: usize,
    lang: Language,
    line_starts: Vec<usize>,
    out: Extraction,
    /// Last significant code byte, for regex-vs-division decisions.
    prev_sig: Option<usize>,
    /// Last code byte was the end of an operand (string, regex, literal).
    prev_operand: bool,
    /// Ruby heredoc terminators waiting for the end of the current line.
    pending_heredocs: Vec<(String, bool)>,
    /// PHP: the `?>` tag was reached.
    php_closed: bool,
    /// Ruby `__END__` was reached.
    halted: bool,
}

const JS_REGEX_KEYWORDS: &[&str] = &[
    "return",
    "typeof",
    "instanceof",
    "in",
    "of",
    "new",
    "delete",
    "void",
    "throw",
    "case",
    "do",
    "else",
    "yield",
    "await",
];
const RUBY_REGEX_KEYWORDS: &[&str] = &[
    "if", "elsif", "unless", "while", "until", "when", "and", "or", "not", "return", "then", "puts", "p", "in",
];

impl<'a> Lexer<'a> {
    fn new(src: &'a str, lang: Language) -> Self {
        let b = src.as_bytes();
        let mut line_starts = vec![0];
        line_starts.extend(b.iter().enumerate().filter(|(_, &c)| c == b'\n').map(|(i, _)| i + 1));
        Lexer {
            src,
            b,
            pos: 0,
            lang,
            line_starts,
            out: Extraction::default(),
            prev_sig: None,
            prev_operand: false,
            pending_heredocs: Vec::new(),
            php_closed: false,
            halted: false,
        }
    }

    fn line_of(&self, pos: usize) -> usize {
        match self.line_starts.binary_search(&pos) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.b.get(self.pos + off).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.b[self.pos..].starts_with(s.as_bytes())
    }

    fn at_line_start(&self) -> bool {
        self.pos == 0 || self.b[self.pos - 1] == b'\n'
    }

    fn c_like(&self) -> bool {
        matches!(
            self.lang,
            Language::C | Language::Cpp | Language::Java | Language::JavaScript
        )
    }

    fn push(&mut self, kind: CommentKind, start: usize, end: usize, close_pos: usize) {
        if start >= end {
            return;
        }
        let open_line = self.line_of(start.saturating_sub(1));
        let last = if close_pos >= self.b.len() {
            self.b.len().saturating_sub(1)
        } else {
            close_pos
        };
        self.out.comments.push(Comment {
            kind,
            start_line: open_line,
            end_line: self.line_of(last).max(open_line),
            raw_text: self.src[start..end].to_string(),
            start,
            end,
        });
    }

    fn run(&mut self) {
        if self.lang == Language::Php {
            self.run_php();
        } else {
            if self.lang == Language::JavaScript && self.starts_with("#!") {
                self.skip_to_eol();
            }
            self.lex_code(Stop::Eof);
        }
    }

    fn run_php(&mut self) {
        while self.pos < self.b.len() {
            // inline HTML until an opening tag
            let rest = &self.src[self.pos..];
            let Some(open) = rest.find("<?") else {
                break;
            };
            self.pos += open + 2;
            if self.starts_with("php") {
                self.pos += 3;
            } else if self.starts_with("=") {
                self.pos += 1;
            }
            self.php_closed = false;
            self.prev_sig = None;
            self.prev_operand = false;
            self.lex_code(Stop::Eof);
        }
    }

    fn skip_to_eol(&mut self) {
        while self.pos < self.b.len() && self.b[self.pos] != b'\n' {
            self.pos += 1;
        }
    }

    /// Scan code until end of input, an unmatched `}` (for interpolations),
    /// or a PHP close tag.
    fn lex_code(&mut self, stop: Stop) {
        let mut depth = 0usize;
        while self.pos < self.b.len() && !self.halted {
            let c = self.b[self.pos];
            if stop == Stop::Brace {
                if c == b'{' {
                    depth += 1;
                } else if c == b'}' {
                    if depth == 0 {
                        self.pos += 1;
                        return;
                    }
                    depth -= 1;
                }
            }
            if self.lang == Language::Php && c == b'?' && self.peek(1) == Some(b'>') {
                self.pos += 2;
                self.php_closed = true;
                return;
            }
            if c == b'\n' {
                self.pos += 1;
                if !self.pending_heredocs.is_empty() {
                    self.skip_ruby_heredoc_bodies();
                }
                if self.lang == Language::Ruby && self.at_line_start() {
                    self.ruby_line_start();
                }
                continue;
            }
            if self.pos == 0 && self.lang == Language::Ruby {
                self.ruby_line_start();
                if self.halted || self.pos != 0 {
                    continue;
                }
            }
            if self.try_comment() {
                if self.php_closed {
                    return;
                }
                continue;
            }
            if self.try_literal() {
                self.prev_sig = Some(self.pos.saturating_sub(1));
                self.prev_operand = true;
                continue;
            }
            if !c.is_ascii_whitespace() {
                self.prev_sig = Some(self.pos);
                self.prev_operand = false;
            }
            self.pos += 1;
        }
    }

    fn ruby_line_start(&mut self) {
        if self.starts_with("=begin") && self.peek(6).is_none_or(|c| c.is_ascii_whitespace()) {
            self.ruby_block_comment();
        } else if self.starts_with("__END__") && matches!(self.peek(7), None | Some(b'\n') | Some(b'\r')) {
            self.halted = true;
        }
    }

    fn try_comment(&mut self) -> bool {
        let c = self.b[self.pos];
        let next = self.peek(1);
        match self.lang {
            _ if self.c_like() || self.lang == Language::Php => {
                if c == b'/' && next == Some(b'/') {
                    self.line_comment(2);
                    return true;
                }
                if c == b'/' && next == Some(b'*') {
                    self.block_comment();
                    return true;
                }
                if self.lang == Language::Php && c == b'#' && next != Some(b'[') {
                    self.line_comment(1);
                    return true;
                }
                false
            }
            Language::Python | Language::Ruby => {
                if c == b'#' {
                    self.line_comment(1);
                    return true;
                }
                false
            }
            _ => false,
        }
    }

    fn line_comment(&mut self, marker_len: usize) {
        let start = self.pos + marker_len;
        let mut i = start;
        let continues = matches!(self.lang, Language::C | Language::Cpp);
        while i < self.b.len() {
            match self.b[i] {
                b'\n' => {
                    let mut j = i;
                    if j > start && self.b[j - 1] == b'\r' {
                        j -= 1;
                    }
                    if continues && j > start && self.b[j - 1] == b'\\' {
                        i += 1;
                        continue;
                    }
                    break;
                }
                b'?' if self.lang == Language::Php && self.b.get(i + 1) == Some(&b'>') => break,
                _ => i += 1,
            }
        }
        let mut end = i;
        if end > start && self.b[end - 1] == b'\r' {
            end -= 1;
        }
        self.push(CommentKind::Line, start, end, i.saturating_sub(1).max(start));
        self.pos = i;
    }

    fn block_comment(&mut self) {
        let start = self.pos + 2;
        match self.src[start..].find("*/") {
            Some(off) => {
                let end = start + off;
                self.push(CommentKind::Block, start, end, end);
                self.pos = end + 2;
            }
            None => {
                let line = self.line_of(self.pos);
                self.out.warnings.push(LexWarning::UnterminatedBlockComment { line });
                let end = self.b.len();
                self.push(CommentKind::Block, start, end, end);
                self.pos = end;
            }
        }
    }

    fn ruby_block_comment(&mut self) {
        let open = self.pos;
        let mut start = self.pos + 6;
        // text after `=begin` on the same line belongs to the comment
        while start < self.b.len() && (self.b[start] == b' ' || self.b[start] == b'\t') {
            start += 1;
        }
        if self.b[start..].starts_with(b"\r\n") {
            start += 2;
        } else if self.b.get(start) == Some(&b'\n') {
            start += 1;
        }
        let mut i = start;
        loop {
            if i >= self.b.len() {
                let line = self.line_of(open);
                self.out.warnings.push(LexWarning::UnterminatedBlockComment { line });
                let end = self.b.len();
                self.push(CommentKind::Block, start, end, end);
                self.pos = end;
                return;
            }
            let at_start = i == 0 || self.b[i - 1] == b'\n';
            if at_start && self.b[i..].starts_with(b"=end") && self.b.get(i + 4).is_none_or(|c| c.is_ascii_whitespace())
            {
                self.push(CommentKind::Block, start, i, i);
                self.pos = i + 4;
                self.skip_to_eol();
                return;
            }
            i += 1;
        }
    }

    /// Skip a string, character, regex, heredoc, or other literal starting at
    /// the current position. Returns false if nothing literal starts here.
    fn try_literal(&mut self) -> bool {
        let c = self.b[self.pos];
        match c {
            b'"' | b'\'' => {
                if c == b'\'' && self.is_digit_separator() {
                    return false;
                }
                if self.lang == Language::Cpp && c == b'"' && self.try_cpp_raw_string() {
                    return true;
                }
                if self.is_triple_quote_lang() && self.starts_with_triple(c) {
                    self.skip_triple(c);
                    return true;
                }
                self.skip_quoted(c);
                true
            }
            b'`' if matches!(self.lang, Language::JavaScript | Language::Ruby | Language::Php) => {
                self.skip_quoted(c);
                true
            }
            b'/' if matches!(self.lang, Language::JavaScript | Language::Ruby) => {
                self.regex_allowed() && self.skip_regex()
            }
            b'<' if self.lang == Language::Php && self.starts_with("<<<") => self.skip_php_heredoc(),
            b'<' if self.lang == Language::Ruby && self.starts_with("<<") => self.register_ruby_heredoc(),
            b'%' if self.lang == Language::Ruby => self.skip_ruby_percent(),
            b'$' if self.lang == Language::Ruby => {
                // special globals such as $' and $"
                if matches!(self.peek(1), Some(b'\'' | b'"' | b'`' | b'/' | b'#')) {
                    self.pos += 2;
                    return true;
                }
                false
            }
            b'?' if self.lang == Language::Ruby => {
                // character literals such as ?" and ?#
                let prev_is_ident =
                    self.pos > 0 && (self.b[self.pos - 1].is_ascii_alphanumeric() || self.b[self.pos - 1] == b'_');
                if !prev_is_ident
                    && matches!(self.peek(1), Some(b'\'' | b'"' | b'`' | b'#'))
                    && !self.peek(2).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 2;
                    return true;
                }
                false
            }
            _ => false,
        }
    }

    fn is_triple_quote_lang(&self) -> bool {
        matches!(self.lang, Language::Python | Language::Java)
    }

    fn starts_with_triple(&self, q: u8) -> bool {
        if self.lang == Language::Java && q != b'"' {
            return false;
        }
        self.peek(1) == Some(q) && self.peek(2) == Some(q)
    }

    fn skip_triple(&mut self, q: u8) {
        let mut i = self.pos + 3;
        while i < self.b.len() {
            if self.b[i] == b'\\' {
                i += 2;
                continue;
            }
            if self.b[i] == q && self.b.get(i + 1) == Some(&q) && self.b.get(i + 2) == Some(&q) {
                self.pos = i + 3;
                return;
            }
            i += 1;
        }
        self.pos = self.b.len();
    }

    /// C++14 digit separators (`1'000'000`) and hex literals such as `0xFF'FF`.
    fn is_digit_separator(&self) -> bool {
        if !matches!(self.lang, Language::C | Language::Cpp) || self.pos == 0 {
            return false;
        }
        if !self.b[self.pos - 1].is_ascii_hexdigit() {
            return false;
        }
        let mut i = self.pos;
        while i > 0 && (self.b[i - 1].is_ascii_alphanumeric() || matches!(self.b[i - 1], b'\'' | b'.')) {
            i -= 1;
        }
        self.b[i].is_ascii_digit()
    }

    fn multiline_strings(&self) -> bool {
        matches!(self.lang, Language::Php | Language::Ruby)
    }

    fn interpolation_opener(&self, q: u8, i: usize) -> bool {
        let next = self.b.get(i + 1).copied();
        match (self.lang, q) {
            (Language::Ruby, b'"' | b'`') => self.b[i] == b'#' && next == Some(b'{'),
            (Language::JavaScript, b'`') => self.b[i] == b'$' && next == Some(b'{'),
            (Language::Php, b'"') => self.b[i] == b'{' && next == Some(b'$'),
            _ => false,
        }
    }

    fn skip_quoted(&mut self, q: u8) {
        let single_line = !(self.multiline_strings() || q == b'`');
        let mut i = self.pos + 1;
        while i < self.b.len() {
            let c = self.b[i];
            if c == b'\\' {
                i += 2;
                continue;
            }
            if c == q {
                self.pos = i + 1;
                return;
            }
            if c == b'\n' && single_line {
                // unterminated literal; resume lexing at the newline
                self.pos = i;
                return;
            }
            if self.interpolation_opener(q, i) {
                // PHP `{$` keeps the brace as part of the expression
                self.pos = if self.lang == Language::Php { i + 1 } else { i + 2 };
                self.lex_code(Stop::Brace);
                i = self.pos;
                continue;
            }
            i += 1;
        }
        self.pos = self.b.len();
    }

    fn try_cpp_raw_string(&mut self) -> bool {
        // identifier immediately before the quote must be R, u8R, uR, UR or LR
        let mut s = self.pos;
        while s > 0 && (self.b[s - 1].is_ascii_alphanumeric() || self.b[s - 1] == b'_') {
            s -= 1;
        }
        let prefix = &self.src[s..self.pos];
        if !matches!(prefix, "R" | "u8R" | "uR" | "UR" | "LR") {
            return false;
        }
        let dstart = self.pos + 1;
        let Some(paren) = self.src[dstart..].find('(') else {
            return false;
        };
        let delim = &self.src[dstart..dstart + paren];
        if delim.len() > 16
            || delim
                .bytes()
                .any(|c| c.is_ascii_whitespace() || c == b'\\' || c == b')')
        {
            return false;
        }
        let closing = format!("){delim}\"");
        let body = dstart + paren + 1;
        self.pos = match self.src[body..].find(&closing) {
            Some(off) => body + off + closing.len(),
            None => self.b.len(),
        };
        true
    }

    fn regex_allowed(&self) -> bool {
        let next = self.peek(1);
        if self.lang == Language::JavaScript && matches!(next, Some(b'/') | Some(b'*')) {
            return false;
        }
        if self.prev_operand {
            return false;
        }
        let Some(p) = self.prev_sig else {
            return true;
        };
        let pc = self.b[p];
        if pc.is_ascii_alphanumeric() || pc == b'_' || pc == b'$' {
            let mut s = p + 1;
            while s > 0 && (self.b[s - 1].is_ascii_alphanumeric() || self.b[s - 1] == b'_' || self.b[s - 1] == b'$') {
                s -= 1;
            }
            let word = &self.src[s..=p];
            let keywords = if self.lang == Language::Ruby {
                RUBY_REGEX_KEYWORDS
            } else {
                JS_REGEX_KEYWORDS
            };
            if !keywords.contains(&word) {
                return false;
            }
            // Ruby `puts /x/` needs a space before the slash and none after
            if self.lang == Language::Ruby && next == Some(b' ') {
                return false;
            }
            return true;
        }
        if matches!(pc, b')' | b']' | b'}') {
            return false;
        }
        true
    }

    fn skip_regex(&mut self) -> bool {
        let mut i = self.pos + 1;
        let mut in_class = false;
        while i < self.b.len() {
            match self.b[i] {
                b'\\' => i += 2,
                b'\n' => return false,
                b'[' => {
                    in_class = true;
                    i += 1;
                }
                b']' => {
                    in_class = false;
                    i += 1;
                }
                b'/' if !in_class => {
                    self.pos = i + 1;
                    return true;
                }
                _ => i += 1,
            }
        }
        false
    }

    fn skip_php_heredoc(&mut self) -> bool {
        let mut i = self.pos + 3;
        while i < self.b.len() && (self.b[i] == b' ' || self.b[i] == b'\t') {
            i += 1;
        }
        let quote = match self.b.get(i) {
            Some(&q @ (b'"' | b'\'')) => {
                i += 1;
                Some(q)
            }
            _ => None,
        };
        let id_start = i;
        while i < self.b.len() && (self.b[i].is_ascii_alphanumeric() || self.b[i] == b'_') {
            i += 1;
        }
        if i == id_start || self.b[id_start].is_ascii_digit() {
            return false;
        }
        let id = self.src[id_start..i].to_string();
        if let Some(q) = quote {
            if self.b.get(i) != Some(&q) {
                return false;
            }
            i += 1;
        }
        // body starts on the next line
        while i < self.b.len() && self.b[i] != b'\n' {
            i += 1;
        }
        loop {
            if i >= self.b.len() {
                self.pos = self.b.len();
                return true;
            }
            i += 1; // past newline
            let mut j = i;
            while j < self.b.len() && (self.b[j] == b' ' || self.b[j] == b'\t') {
                j += 1;
            }
            if self.b[j..].starts_with(id.as_bytes()) {
                let after = j + id.len();
                if !self
                    .b
                    .get(after)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos = after;
                    return true;
                }
            }
            while i < self.b.len() && self.b[i] != b'\n' {
                i += 1;
            }
        }
    }

    fn register_ruby_heredoc(&mut self) -> bool {
        let mut i = self.pos + 2;
        let indented = matches!(self.b.get(i), Some(b'~') | Some(b'-'));
        if indented {
            i += 1;
        }
        let quote = match self.b.get(i) {
            Some(&q @ (b'"' | b'\'' | b'`')) => {
                i += 1;
                Some(q)
            }
            _ => None,
        };
        let id_start = i;
        while i < self.b.len() && (self.b[i].is_ascii_alphanumeric() || self.b[i] == b'_') {
            i += 1;
        }
        if i == id_start || self.b[id_start].is_ascii_digit() {
            return false;
        }
        if quote.is_none() && !indented && !self.b[id_start].is_ascii_uppercase() {
            return false;
        }
        if let Some(q) = quote {
            if self.b.get(i) != Some(&q) {
                return false;
            }
            i += 1;
        }
        self.pending_heredocs
            .push((self.src[id_start..i - quote.map_or(0, |_| 1)].to_string(), indented));
        self.pos = i;
        true
    }

    /// Called right after a newline when heredocs are pending.
    fn skip_ruby_heredoc_bodies(&mut self) {
        let pending = std::mem::take(&mut self.pending_heredocs);
        for (id, indented) in pending {
            loop {
                if self.pos >= self.b.len() {
                    return;
                }
                let line_end = self.src[self.pos..].find('\n').map_or(self.b.len(), |o| self.pos + o);
                let line = self.src[self.pos..line_end].trim_end_matches('\r');
                let candidate = if indented { line.trim_start() } else { line };
                self.pos = (line_end + 1).min(self.b.len());
                if candidate == id {
                    break;
                }
            }
        }
    }

    fn skip_ruby_percent(&mut self) -> bool {
        let mut i = self.pos + 1;
        let kind = self.b.get(i).copied();
        let interpolates = match kind {
            Some(b'q' | b'w' | b'i' | b's') => {
                i += 1;
                false
            }
            Some(b'Q' | b'W' | b'I' | b'r' | b'x') => {
                i += 1;
                true
            }
            Some(b'(' | b'[' | b'{' | b'<' | b'|' | b'!') => {
                // bare %(...) only where an operand may start
                if self.prev_operand
                    || self.prev_sig.is_some_and(|p| {
                        self.b[p].is_ascii_alphanumeric() || matches!(self.b[p], b')' | b']' | b'}' | b'_')
                    })
                {
                    return false;
                }
                true
            }
            _ => return false,
        };
        let Some(&open) = self.b.get(i) else {
            return false;
        };
        if open.is_ascii_alphanumeric() || open.is_ascii_whitespace() {
            return false;
        }
        let close = match open {
            b'(' => b')',
            b'[' => b']',
            b'{' => b'}',
            b'<' => b'>',
            other => other,
        };
        let mut depth = 0usize;
        i += 1;
        while i < self.b.len() {
            let c = self.b[i];
            if c == b'\\' {
                i += 2;
                continue;
            }
            if interpolates && c == b'#' && self.b.get(i + 1) == Some(&b'{') {
                self.pos = i + 2;
                self.lex_code(Stop::Brace);
                i = self.pos;
                continue;
            }
            if c == close && depth == 0 {
                self.pos = i + 1;
                return true;
            }
            if open != close {
                if c == open {
                    depth += 1;
                } else if c == close {
                    depth -= 1;
                }
            }
            i += 1;
        }
        self.pos = self.b.len();
        true
    }
}
