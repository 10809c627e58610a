use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::record::EntityRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingLink {
    /// Position of the link in the input sequence.
    pub index: usize,
    pub repository: String,
    pub paper: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JoinReport {
    pub links: usize,
    pub joined: usize,
    pub papers_enriched: usize,
    pub dangling: Vec<DanglingLink>,
}

/// Attach repositories to papers. Each repository record carries the papers
/// that point at it as reverse `hasRepository` links; a matching paper gains
/// `hasRepository` (and `hasOfficialRepository` when the link is official),
/// in link order. Returns the repositories that joined at least one paper.
pub fn join_code_links(papers: &mut [EntityRecord], links: Vec<EntityRecord>) -> (Vec<EntityRecord>, JoinReport) {
    let by_slug: HashMap<String, usize> = papers.iter().enumerate().map(|(i, p)| (p.slug.clone(), i)).collect();
    let mut report = JoinReport { links: links.len(), ..JoinReport::default() };
    let mut enriched = BTreeSet::new();
    let mut kept = Vec::new();

    for (index, mut repo) in links.into_iter().enumerate() {
        let official = repo.scalar("isOfficial") == Some("true");
        let sources = repo.reverse_links.remove("hasRepository").unwrap_or_default();
        let mut joined_any = false;
        for source in &sources {
            match by_slug.get(&source.slug) {
                Some(&i) => {
                    papers[i].push_link("hasRepository", repo.as_ref());
                    if official {
                        papers[i].push_link("hasOfficialRepository", repo.as_ref());
                    }
                    enriched.insert(i);
                    joined_any = true;
                }
                None => report.dangling.push(DanglingLink {
                    index,
                    repository: repo.slug.clone(),
                    paper: Some(source.slug.clone()),
                }),
            }
        }
        if sources.is_empty() {
            report.dangling.push(DanglingLink { index, repository: repo.slug.clone(), paper: None });
        }
        if joined_any {
            report.joined += 1;
            kept.push(repo);
        }
    }
    report.papers_enriched = enriched.len();
    (kept, report)
}
