/// Characters replaced by a space before whitespace is collapsed.
pub const STRIPPED_CHARS: [char; 6] = ['\n', '/', '*', '\\', '#', '!'];

/// Replace each stripped character with a space, collapse whitespace runs to
/// one space, and trim.
///
/// Replacing rather than deleting keeps `A/B` as two tokens.
pub fn normalize(raw_text: &str) -> String {
    let mut out = String::with_capacity(raw_text.len());
    let mut pending_space = false;
    for c in raw_text.chars() {
        if c.is_whitespace() || STRIPPED_CHARS.contains(&c) {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn replacement_rule() {
        assert_eq!(normalize("A/B\n*C"), "A B C");
        assert_eq!(normalize("plain text"), "plain text");
        assert_eq!(normalize("  ** !! \\ # "), "");
        assert_eq!(normalize("http://x.org/a"), "http: x.org a");
    }

    #[test]
    fn literate_programming_comment() {
        let body = "\n     * This program is intended to be pedagogic.  Specifically, this program was\n     * the basis of the Literate Programming column which appeared in the\n     * Communications of the ACM (CACM), in the June 1989 issue (32, 6,\n     * 740-755).\n ";
        let n = normalize(body);
        assert!(!n.contains('\n'));
        assert!(n.contains("Communications of the ACM (CACM), in the June 1989 issue (32, 6, 740-755)."));
    }

    proptest! {
        #[test]
        fn idempotent(s in "[a-zA-Z0-9 \\n\\t/*\\\\#!.,é]{0,60}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
            prop_assert!(!once.chars().any(|c| STRIPPED_CHARS.contains(&c)));
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' ') && !once.contains("  "));
        }
    }
}
