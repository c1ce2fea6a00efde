/// Punctuation split off the edges of whitespace-separated chunks.
pub const SPLIT_PUNCT: &[char] = &['.', ',', ';', ':', '(', ')', '[', ']', '"', '\'', '`'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Unicode scalar offset of the first character.
    pub start: usize,
    /// Exclusive end offset.
    pub end: usize,
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.text.chars().all(|c| SPLIT_PUNCT.contains(&c))
    }
}

/// Split on whitespace, then peel leading and trailing punctuation into
/// single-character tokens. Inner punctuation (`740-755`, `10.1109`) stays.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && !chars[j].is_whitespace() {
            j += 1;
        }
        split_chunk(&chars, i, j, &mut tokens);
        i = j;
    }
    tokens
}

fn split_chunk(chars: &[char], mut lo: usize, mut hi: usize, out: &mut Vec<Token>) {
    let single = |at: usize| Token {
        text: chars[at].to_string(),
        start: at,
        end: at + 1,
    };
    while lo < hi && SPLIT_PUNCT.contains(&chars[lo]) {
        out.push(single(lo));
        lo += 1;
    }
    let mut trailing = Vec::new();
    while hi > lo && SPLIT_PUNCT.contains(&chars[hi - 1]) {
        trailing.push(single(hi - 1));
        hi -= 1;
    }
    if lo < hi {
        out.push(Token {
            text: chars[lo..hi].iter().collect(),
            start: lo,
            end: hi,
        });
    }
    out.extend(trailing.into_iter().rev());
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splitting_rule() {
        assert_eq!(
            words("Coppens, P. (1974)."),
            ["Coppens", ",", "P", ".", "(", "1974", ")", "."]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(words("pp. 740-755"), ["pp", ".", "740-755"]);
        assert_eq!(
            words("\"Mining (SSDBM'06),"),
            ["\"", "Mining", "(", "SSDBM'06", ")", ","]
        );
        assert_eq!(words("..."), [".", ".", "."]);
    }

    #[test]
    fn offsets_are_scalar_indices() {
        let toks = tokenize("Böhm, P.");
        assert_eq!((toks[0].start, toks[0].end), (0, 4));
        assert_eq!((toks[1].start, toks[1].end), (4, 5));
    }

    proptest! {
        #[test]
        fn tokens_ordered_and_cover_text(s in "[a-zA-Z0-9 .,;:()\\[\\]\"'`é-]{0,50}") {
            let chars: Vec<char> = s.chars().collect();
            let toks = tokenize(&s);
            let mut last = 0;
            for t in &toks {
                prop_assert!(t.start < t.end && t.start >= last);
                prop_assert_eq!(chars[t.start..t.end].iter().collect::<String>(), t.text.clone());
                last = t.end;
            }
            let joined: String = toks.iter().map(|t| t.text.as_str()).collect();
            let expect: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, expect);
        }
    }
}
