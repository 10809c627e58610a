use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::{CatalogAuthor, CatalogCandidate, CatalogClient, CatalogError, WorkHit};
use crate::textnorm::normalize;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureAuthor {
    pub id: String,
    pub name: String,
    /// Work ids.
    #[serde(default)]
    pub works: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureWork {
    pub id: String,
    pub title: String,
    /// Author ids.
    #[serde(default)]
    pub authors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureConference {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub acronym: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureDataset {
    pub id: String,
    pub label: String,
}

/// On-disk format of an offline catalog.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixtureData {
    pub authors: Vec<FixtureAuthor>,
    pub works: Vec<FixtureWork>,
    pub conferences: Vec<FixtureConference>,
    pub datasets: Vec<FixtureDataset>,
}

/// A catalog held in memory, loaded from a JSON file. Author membership is
/// the union of `authors[].works` and `works[].authors`.
#[derive(Debug, Clone)]
pub struct FixtureCatalog {
    data: FixtureData,
    works_of: HashMap<String, Vec<usize>>,
    authors_of: HashMap<String, Vec<usize>>,
    works_by_title: HashMap<String, Vec<usize>>,
    authors_by_name: HashMap<String, Vec<usize>>,
}

fn name_key(name: &str) -> String {
    name.trim().nfc().collect::<String>().to_lowercase()
}

impl FixtureCatalog {
    pub fn new(data: FixtureData) -> Self {
        let work_index: HashMap<&str, usize> = data.works.iter().enumerate().map(|(i, w)| (w.id.as_str(), i)).collect();
        let author_index: HashMap<&str, usize> =
            data.authors.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();

        let mut works_of: HashMap<String, Vec<usize>> = HashMap::new();
        let mut authors_of: HashMap<String, Vec<usize>> = HashMap::new();
        let mut pair = |author: usize, work: usize| {
            let a = &data.authors[author].id;
            let w = &data.works[work].id;
            let ws = works_of.entry(a.clone()).or_default();
            if !ws.contains(&work) {
                ws.push(work);
            }
            let au = authors_of.entry(w.clone()).or_default();
            if !au.contains(&author) {
                au.push(author);
            }
        };
        for (ai, a) in data.authors.iter().enumerate() {
            for w in &a.works {
                if let Some(&wi) = work_index.get(w.as_str()) {
                    pair(ai, wi);
                }
            }
        }
        for (wi, w) in data.works.iter().enumerate() {
            for a in &w.authors {
                if let Some(&ai) = author_index.get(a.as_str()) {
                    pair(ai, wi);
                }
            }
        }

        let mut works_by_title: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, w) in data.works.iter().enumerate() {
            works_by_title.entry(normalize(&w.title).into_string()).or_default().push(i);
        }
        let mut authors_by_name: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, a) in data.authors.iter().enumerate() {
            authors_by_name.entry(name_key(&a.name)).or_default().push(i);
        }
        FixtureCatalog { data, works_of, authors_of, works_by_title, authors_by_name }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(Self::new(serde_json::from_str(text)?))
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CatalogError::Unavailable(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CatalogError::BadResponse(format!("{}: {e}", path.display())))
    }

    pub fn data(&self) -> &FixtureData {
        &self.data
    }
}

impl CatalogClient for FixtureCatalog {
    fn candidates_by_name(&self, name: &str) -> Result<Vec<CatalogCandidate>, CatalogError> {
        let hits = self.authors_by_name.get(&name_key(name)).map_or(&[][..], Vec::as_slice);
        Ok(hits
            .iter()
            .map(|&i| {
                let a = &self.data.authors[i];
                let works = self.works_of.get(&a.id).map_or(&[][..], Vec::as_slice);
                CatalogCandidate {
                    id: a.id.clone(),
                    name: a.name.clone(),
                    work_titles: works.iter().map(|&w| self.data.works[w].title.clone()).collect(),
                }
            })
            .collect())
    }

    fn works_by_title_variant(&self, variant: &str) -> Result<Vec<WorkHit>, CatalogError> {
        let hits = self.works_by_title.get(normalize(variant).as_str()).map_or(&[][..], Vec::as_slice);
        Ok(hits
            .iter()
            .map(|&i| {
                let w = &self.data.works[i];
                let authors = self.authors_of.get(&w.id).map_or(&[][..], Vec::as_slice);
                WorkHit {
                    id: w.id.clone(),
                    title: w.title.clone(),
                    authors: authors
                        .iter()
                        .map(|&a| CatalogAuthor { id: self.data.authors[a].id.clone(), name: self.data.authors[a].name.clone() })
                        .collect(),
                }
            })
            .collect())
    }

    fn conference_lookup(&self, name: &str, acronym: Option<&str>) -> Result<Vec<String>, CatalogError> {
        let name = normalize(name);
        let acronym = acronym.map(normalize).filter(|a| !a.is_empty());
        Ok(self
            .data
            .conferences
            .iter()
            .filter(|c| {
                let by_acronym = match (&acronym, &c.acronym) {
                    (Some(want), Some(have)) => want.as_str() == normalize(have).as_str(),
                    _ => false,
                };
                by_acronym || (!name.is_empty() && normalize(&c.name).as_str() == name.as_str())
            })
            .map(|c| c.id.clone())
            .collect())
    }

    fn dataset_lookup(&self, label: &str) -> Result<Vec<String>, CatalogError> {
        let label = normalize(label);
        Ok(self
            .data
            .datasets
            .iter()
            .filter(|d| !label.is_empty() && normalize(&d.label).as_str() == label.as_str())
            .map(|d| d.id.clone())
            .collect())
    }
}
