//! The seven supported source languages and the file-extension table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A supported programming language.
///
/// The declaration order is the ordering used when sorting deduplicated
/// comments by language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Language {
    #[serde(rename = "C")]
    C,
    #[serde(rename = "C++")]
    Cpp,
    #[serde(rename = "Java")]
    Java,
    #[serde(rename = "JavaScript")]
    JavaScript,
    #[serde(rename = "Python")]
    Python,
    #[serde(rename = "PHP")]
    Php,
    #[serde(rename = "Ruby")]
    Ruby,
}

const EXTENSIONS: &[(&str, Language)] = &[
    ("c", Language::C),
    ("h", Language::C),
    ("cpp", Language::Cpp),
    ("cc", Language::Cpp),
    ("cxx", Language::Cpp),
    ("hpp", Language::Cpp),
    ("hh", Language::Cpp),
    ("hxx", Language::Cpp),
    ("java", Language::Java),
    ("js", Language::JavaScript),
    ("py", Language::Python),
    ("php", Language::Php),
    ("rb", Language::Ruby),
];

impl Language {
    pub const ALL: [Language; 7] = [
        Language::C,
        Language::Cpp,
        Language::Java,
        Language::JavaScript,
        Language::Python,
        Language::Php,
        Language::Ruby,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Language::C => "C",
            Language::Cpp => "C++",
            Language::Java => "Java",
            Language::JavaScript => "JavaScript",
            Language::Python => "Python",
            Language::Php => "PHP",
            Language::Ruby => "Ruby",
        }
    }

    /// Extensions (without the dot) mapped to this language.
    pub fn extensions(self) -> impl Iterator<Item = &'static str> {
        EXTENSIONS.iter().filter(move |(_, l)| *l == self).map(|(e, _)| *e)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown language {0:?}")]
pub struct UnknownLanguage(pub String);

impl FromStr for Language {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let lang = match lower.as_str() {
            "c" => Language::C,
            "c++" | "cpp" => Language::Cpp,
            "java" => Language::Java,
            "javascript" | "js" => Language::JavaScript,
            "python" | "py" => Language::Python,
            "php" => Language::Php,
            "ruby" | "rb" => Language::Ruby,
            _ => return Err(UnknownLanguage(s.to_string())),
        };
        Ok(lang)
    }
}

/// Classify a path by its extension (case-insensitive).
///
/// Returns `None` for extensions outside the table, including files with no
/// extension at all.
pub fn classify_language(rel_path: &str) -> Option<Language> {
    let file_name = rel_path.rsplit(['/', '\\']).next()?;
    let (stem, ext) = file_name.rsplit_once('.')?;
    if stem.is_empty() && !file_name[1..].contains('.') {
        // dotfiles such as ".c" have no extension
        return None;
    }
    let ext = ext.to_ascii_lowercase();
    EXTENSIONS.iter().find(|(e, _)| *e == ext).map(|(_, lang)| *lang)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_table() {
        assert_eq!(classify_language("src/main.c"), Some(Language::C));
        assert_eq!(classify_language("lib/util.JS"), Some(Language::JavaScript));
        assert_eq!(classify_language("README.md"), None);
        assert_eq!(classify_language("a/b/x.HxX"), Some(Language::Cpp));
        assert_eq!(classify_language("Makefile"), None);
        assert_eq!(classify_language("dir.c/notes"), None);
        assert_eq!(classify_language(".c"), None);
    }

    #[test]
    fn every_extension_maps_back() {
        for lang in Language::ALL {
            for ext in lang.extensions() {
                assert_eq!(classify_language(&format!("f.{ext}")), Some(lang));
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for lang in Language::ALL {
            assert_eq!(lang.name().parse::<Language>().unwrap(), lang);
            let json = serde_json::to_string(&lang).unwrap();
            assert_eq!(json, format!("\"{}\"", lang.name()));
        }
    }
}
