//! `kgforge.toml`: every section is optional; command-line flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kgforge::embed::TrainConfig;
use kgforge::linker::LinkerConfig;
use kgforge::ontology::{EntityKind, Registry, UriPolicy, DEFAULT_BASE, DEFAULT_ONTOLOGY_NS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub log_level: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub uri: UriSection,
    /// Extra or replacement Turtle prefixes.
    pub prefixes: BTreeMap<String, String>,
    pub linker: LinkerConfig,
    pub catalog: CatalogSection,
    pub stats: StatsSection,
    pub embed: TrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UriSection {
    pub base: String,
    pub ontology_namespace: String,
    /// Class name → path segment.
    pub segments: BTreeMap<String, String>,
}

impl Default for UriSection {
    fn default() -> Self {
        UriSection {
            base: DEFAULT_BASE.to_owned(),
            ontology_namespace: DEFAULT_ONTOLOGY_NS.to_owned(),
            segments: BTreeMap::new(),
        }
    }
}

impl UriSection {
    pub fn registry(&self) -> Result<Registry, String> {
        Registry::lpwc(&self.ontology_namespace).map_err(|e| e.to_string())
    }

    pub fn policy(&self) -> Result<UriPolicy, String> {
        let mut overrides = BTreeMap::new();
        for (class, segment) in &self.segments {
            let kind: EntityKind = class.parse().map_err(|e| format!("uri.segments: {e}"))?;
            overrides.insert(kind, segment.clone());
        }
        UriPolicy::new(&self.base, &overrides).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogSection {
    /// Offline catalog JSON file.
    pub fixture: Option<PathBuf>,
    /// SPARQL endpoint for authors and works.
    pub url: Option<String>,
    pub conference_endpoint: Option<String>,
    pub dataset_endpoint: Option<String>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSection {
    pub conferences: Vec<String>,
    pub format: String,
}

impl Default for StatsSection {
    fn default() -> Self {
        StatsSection { conferences: vec!["naacl".into(), "emnlp".into(), "acl".into()], format: "csv".into() }
    }
}

/// Read `path`, or `kgforge.toml` in the working directory when no path is
/// given and that file exists.
pub fn load(path: Option<&Path>) -> Result<RunConfig, String> {
    let default_path = Path::new("kgforge.toml");
    let path = match path {
        Some(p) => p,
        None if default_path.is_file() => default_path,
        None => return Ok(RunConfig::default()),
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: RunConfig = toml::from_str(
            r#"
            output = "out"
            [uri.segments]
            Paper = "papers"
            [linker]
            min_sim = 0.95
            [embed]
            technique = "rotate"
            dim = 16
            "#,
        )
        .unwrap();
        assert_eq!(cfg.linker.min_sim, 0.95);
        assert!(!cfg.linker.case_sensitive);
        assert_eq!(cfg.embed.dim, 16);
        assert_eq!(cfg.embed.max_epochs, 900);
        assert_eq!(cfg.uri.policy().unwrap().segment(EntityKind::Paper), "papers");
        assert_eq!(cfg.stats.format, "csv");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("colour = 1").is_err());
    }
}
