use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use codecite::dataset::KeywordGroupConfig;
use codecite::{EntityType, Language};
use serde::Deserialize;

/// Settings shared by the subcommands. Command-line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Vec<PathBuf>,
    /// Extra or overriding extension to language mappings, e.g. `inc = "PHP"`.
    pub extensions: BTreeMap<String, Language>,
    pub max_file_size: Option<u64>,
    pub groups: BTreeMap<String, KeywordGroupConfig>,
    pub required_types: Option<Vec<EntityType>>,
    pub max_gap: Option<usize>,
    pub seed: Option<u64>,
    pub epochs: Option<usize>,
    pub lexicons: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub jobs: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

impl PipelineConfig {
    /// Load TOML, or JSON when the file ends in `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: PipelineConfig = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|source| ConfigError::Json {
                path: path.to_path_buf(),
                source,
            })?
        } else {
            toml::from_str(&text).map_err(|source| ConfigError::Toml {
                path: path.to_path_buf(),
                source,
            })?
        };
        cfg.extensions = cfg
            .extensions
            .into_iter()
            .map(|(k, v)| (k.trim_start_matches('.').to_ascii_lowercase(), v))
            .collect();
        for (name, group) in cfg.groups.iter_mut() {
            if group.keyword.is_empty() {
                group.keyword = name.to_lowercase();
            }
        }
        Ok(cfg)
    }

    /// Grouping rules for `keyword`: configured ones first, then the presets.
    pub fn group(&self, keyword: &str) -> KeywordGroupConfig {
        let key = keyword.to_lowercase();
        self.groups
            .get(&key)
            .cloned()
            .unwrap_or_else(|| KeywordGroupConfig::preset(&key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_groups_take_keyword_from_table_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(
            &path,
            "max_gap = 7\n[extensions]\n\".INC\" = \"PHP\"\n[groups.springer]\nmarkers = [\"springer.com\"]\n",
        )
        .unwrap();
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.max_gap, Some(7));
        assert_eq!(cfg.extensions.get("inc"), Some(&Language::Php));
        let g = cfg.group("Springer");
        assert_eq!(g.keyword, "springer");
        assert_eq!(g.markers, vec!["springer.com"]);
        assert_eq!(cfg.group("acm"), KeywordGroupConfig::acm());
    }

    #[test]
    fn json_config_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let ok = dir.path().join("c.json");
        fs::write(&ok, r#"{"seed": 7, "required_types": ["author", "year"]}"#).unwrap();
        let cfg = PipelineConfig::load(&ok).unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.required_types, Some(vec![EntityType::Author, EntityType::Year]));

        let bad = dir.path().join("bad.toml");
        fs::write(&bad, "maxgap = 3\n").unwrap();
        assert!(matches!(PipelineConfig::load(&bad), Err(ConfigError::Toml { .. })));
    }
}
