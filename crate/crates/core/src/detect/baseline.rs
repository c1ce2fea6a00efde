//! Pattern baseline: a citation needs a surname, a year, a volume and a first
//! page number all present in the text.

use std::sync::LazyLock;

use regex::Regex;

static SURNAME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b\p{Lu}\p{Ll}+(?:-\p{Lu}\p{Ll}+)?\s*,\s*\p{Lu}\.|\b\p{Lu}\.\s*(?:\p{Lu}\.\s*)*\p{Lu}\p{Ll}+|\b\p{Lu}\p{Ll}+\s+et\s+al\b",
    )
    .unwrap()
});
static YEAR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(?:19\d\d|20[0-2]\d)\b").unwrap());
static VOLUME: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bvol\.?\s*\d+|\b\d+\s*\(\s*\d+\s*\)").unwrap());
static FIRST_PAGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:pp?\.|pages?)\s*\d+|\b\d+\s*(?:-{1,2}|–)\s*\d+\b").unwrap());

pub fn baseline_detect(text: &str) -> bool {
    [&*SURNAME, &*YEAR, &*VOLUME, &*FIRST_PAGE]
        .iter()
        .all(|re| re.is_match(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(baseline_detect("Smith, J. (1999). J. Foo, vol. 12, pp. 34-56"));
        assert!(!baseline_detect(
            "TYPE-I Lorentzian, Becker , P. J. & Coppens, P. ( 1974 ). Acta Cryst . A30 , 129 ;"
        ));
        assert!(!baseline_detect(""));
    }

    #[test]
    fn each_pattern_is_needed() {
        let full = "D. E. Knuth, 1984, Comput. J. 27(2), 97-111";
        assert!(baseline_detect(full));
        assert!(!baseline_detect("d. e. knuth, 1984, Comput. J. 27(2), 97-111"));
        assert!(!baseline_detect("D. E. Knuth, Comput. J. 27(2), 97-111"));
        assert!(!baseline_detect("D. E. Knuth, 1984, Comput. J. 27, 97-111"));
        assert!(!baseline_detect("D. E. Knuth, 1984, Comput. J. 27(2)"));
        assert!(baseline_detect("Knuth et al 1984 Vol 3 p. 7"));
    }
}
