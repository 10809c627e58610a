use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{CatalogAuthor, CatalogCandidate, CatalogClient, CatalogError, WorkHit};
use crate::textnorm::normalize;

pub const SEMOPENALEX_SPARQL: &str = "https://semopenalex.org/sparql";
pub const DBLP_SPARQL: &str = "https://sparql.dblp.org/sparql";
pub const WIKIDATA_SPARQL: &str = "https://query.wikidata.org/sparql";

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Authors and works.
    pub scholarly_endpoint: String,
    pub conference_endpoint: String,
    pub dataset_endpoint: String,
    pub max_in_flight: usize,
    /// Retries after the first attempt; the wait doubles from `backoff`.
    pub retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
    /// JSON-lines response cache, read at startup and appended to.
    pub cache_path: Option<PathBuf>,
    pub user_agent: String,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            scholarly_endpoint: SEMOPENALEX_SPARQL.into(),
            conference_endpoint: DBLP_SPARQL.into(),
            dataset_endpoint: WIKIDATA_SPARQL.into(),
            max_in_flight: 4,
            retries: 3,
            backoff: Duration::from_secs(1),
            timeout: Duration::from_secs(30),
            cache_path: None,
            user_agent: concat!("kgforge/", env!("CARGO_PKG_VERSION")).into(),
        }
    }
}

struct Semaphore {
    free: Mutex<usize>,
    cond: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(n: usize) -> Self {
        Semaphore { free: Mutex::new(n.max(1)), cond: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("semaphore poisoned");
        while *free == 0 {
            free = self.cond.wait(free).expect("semaphore poisoned");
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("semaphore poisoned") += 1;
        self.0.cond.notify_one();
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    body: String,
}

#[derive(Deserialize)]
struct SparqlJson {
    results: SparqlBindings,
}

#[derive(Deserialize)]
struct SparqlBindings {
    bindings: Vec<BTreeMap<String, SparqlValue>>,
}

#[derive(Deserialize)]
struct SparqlValue {
    value: String,
}

type Rows = Vec<BTreeMap<String, String>>;

/// SPARQL-protocol client (POST form, JSON results) with bounded
/// concurrency, retries with exponential backoff and a persistent cache.
pub struct RemoteCatalog {
    cfg: RemoteConfig,
    agent: ureq::Agent,
    gate: Semaphore,
    cache: Mutex<HashMap<String, String>>,
    cache_file: Mutex<Option<File>>,
    requests: Mutex<u64>,
}

fn sparql_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl RemoteCatalog {
    pub fn new(cfg: RemoteConfig) -> Result<Self, CatalogError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(cfg.timeout))
            .http_status_as_error(false)
            .user_agent(cfg.user_agent.as_str())
            .build()
            .into();

        let mut cache = HashMap::new();
        let mut cache_file = None;
        if let Some(path) = &cfg.cache_path {
            if let Ok(f) = File::open(path) {
                for line in BufReader::new(f).lines() {
                    let line = line.map_err(|e| CatalogError::Unavailable(format!("{}: {e}", path.display())))?;
                    if let Ok(entry) = serde_json::from_str::<CacheLine>(&line) {
                        cache.insert(entry.key, entry.body);
                    }
                }
            }
            let f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| CatalogError::Unavailable(format!("{}: {e}", path.display())))?;
            cache_file = Some(f);
        }
        Ok(RemoteCatalog {
            gate: Semaphore::new(cfg.max_in_flight),
            cfg,
            agent,
            cache: Mutex::new(cache),
            cache_file: Mutex::new(cache_file),
            requests: Mutex::new(0),
        })
    }

    /// HTTP requests sent so far (cache hits excluded).
    pub fn requests_sent(&self) -> u64 {
        *self.requests.lock().expect("counter poisoned")
    }

    fn post(&self, endpoint: &str, query: &str) -> Result<String, CatalogError> {
        let _permit = self.gate.acquire();
        let mut wait = self.cfg.backoff;
        let mut attempt = 0;
        loop {
            *self.requests.lock().expect("counter poisoned") += 1;
            let outcome = self
                .agent
                .post(endpoint)
                .header("Accept", "application/sparql-results+json")
                .send_form([("query", query)]);
            let retryable = match outcome {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status == 200 {
                        return resp
                            .body_mut()
                            .read_to_string()
                            .map_err(|e| CatalogError::BadResponse(e.to_string()));
                    }
                    if status != 429 && status < 500 {
                        return Err(CatalogError::BadResponse(format!("{endpoint} answered HTTP {status}")));
                    }
                    format!("HTTP {status}")
                }
                Err(e) => e.to_string(),
            };
            if attempt >= self.cfg.retries {
                return Err(CatalogError::Unavailable(format!(
                    "{endpoint}: {retryable} after {} attempts",
                    attempt + 1
                )));
            }
            log::warn!("{endpoint}: {retryable}, retrying in {wait:?}");
            thread::sleep(wait);
            wait *= 2;
            attempt += 1;
        }
    }

    fn select(&self, endpoint: &str, query: &str) -> Result<Rows, CatalogError> {
        let key = format!("{endpoint}\n{query}");
        let cached = self.cache.lock().expect("cache poisoned").get(&key).cloned();
        let body = match cached {
            Some(body) => body,
            None => {
                let body = self.post(endpoint, query)?;
                // only bodies that parse are worth keeping
                parse_rows(&body)?;
                if let Some(f) = self.cache_file.lock().expect("cache poisoned").as_mut() {
                    let line = serde_json::to_string(&CacheLine { key: key.clone(), body: body.clone() })
                        .map_err(|e| CatalogError::BadResponse(e.to_string()))?;
                    writeln!(f, "{line}").map_err(|e| CatalogError::Unavailable(format!("cache write: {e}")))?;
                }
                self.cache.lock().expect("cache poisoned").insert(key, body.clone());
                body
            }
        };
        parse_rows(&body)
    }
}

fn parse_rows(body: &str) -> Result<Rows, CatalogError> {
    let parsed: SparqlJson = serde_json::from_str(body).map_err(|e| CatalogError::BadResponse(e.to_string()))?;
    Ok(parsed
        .results
        .bindings
        .into_iter()
        .map(|row| row.into_iter().map(|(k, v)| (k, v.value)).collect())
        .collect())
}

const PREFIXES: &str = "PREFIX foaf: <http://xmlns.com/foaf/0.1/>\n\
PREFIX dcterms: <http://purl.org/dc/terms/>\n\
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n";

impl CatalogClient for RemoteCatalog {
    fn candidates_by_name(&self, name: &str) -> Result<Vec<CatalogCandidate>, CatalogError> {
        let query = format!(
            "{PREFIXES}SELECT ?author ?name ?title WHERE {{\n  VALUES ?name {{ {} }}\n  ?author foaf:name ?name .\n  \
             OPTIONAL {{ ?work dcterms:creator ?author ; dcterms:title ?title . }}\n}}",
            sparql_string(name.trim())
        );
        let mut by_author: BTreeMap<String, CatalogCandidate> = BTreeMap::new();
        for row in self.select(&self.cfg.scholarly_endpoint, &query)? {
            let Some(id) = row.get("author") else { continue };
            let cand = by_author.entry(id.clone()).or_insert_with(|| CatalogCandidate {
                id: id.clone(),
                name: row.get("name").cloned().unwrap_or_default(),
                work_titles: Vec::new(),
            });
            if let Some(title) = row.get("title") {
                cand.work_titles.push(title.clone());
            }
        }
        Ok(by_author.into_values().collect())
    }

    fn works_by_title_variant(&self, variant: &str) -> Result<Vec<WorkHit>, CatalogError> {
        let wanted = normalize(variant);
        if wanted.is_empty() {
            return Ok(Vec::new());
        }
        let query = format!(
            "{PREFIXES}SELECT ?work ?title ?author ?name WHERE {{\n  ?work dcterms:title ?title .\n  \
             FILTER(CONTAINS(LCASE(STR(?title)), {}))\n  \
             OPTIONAL {{ ?work dcterms:creator ?author . ?author foaf:name ?name . }}\n}} LIMIT 500",
            sparql_string(wanted.as_str())
        );
        let mut works: BTreeMap<String, WorkHit> = BTreeMap::new();
        for row in self.select(&self.cfg.scholarly_endpoint, &query)? {
            let (Some(id), Some(title)) = (row.get("work"), row.get("title")) else { continue };
            if normalize(title).as_str() != wanted.as_str() {
                continue;
            }
            let work = works.entry(id.clone()).or_insert_with(|| WorkHit {
                id: id.clone(),
                title: title.clone(),
                authors: Vec::new(),
            });
            if let (Some(author), Some(name)) = (row.get("author"), row.get("name")) {
                if !work.authors.iter().any(|a| &a.id == author) {
                    work.authors.push(CatalogAuthor { id: author.clone(), name: name.clone() });
                }
            }
        }
        Ok(works.into_values().collect())
    }

    fn conference_lookup(&self, name: &str, acronym: Option<&str>) -> Result<Vec<String>, CatalogError> {
        let acronym = acronym.map(|a| a.trim().to_lowercase()).unwrap_or_default();
        let query = format!(
            "PREFIX dblp: <https://dblp.org/rdf/schema#>\nSELECT DISTINCT ?venue WHERE {{\n  \
             ?venue a dblp:Stream ; dblp:streamTitle ?t .\n  OPTIONAL {{ ?venue dblp:streamAcronym ?a . }}\n  \
             FILTER(LCASE(STR(?a)) = {} || LCASE(STR(?t)) = {})\n}}",
            sparql_string(&acronym),
            sparql_string(&name.trim().to_lowercase())
        );
        Ok(self
            .select(&self.cfg.conference_endpoint, &query)?
            .into_iter()
            .filter_map(|mut r| r.remove("venue"))
            .collect())
    }

    fn dataset_lookup(&self, label: &str) -> Result<Vec<String>, CatalogError> {
        let query = format!(
            "{PREFIXES}SELECT DISTINCT ?item WHERE {{\n  VALUES ?label {{ {}@en }}\n  ?item rdfs:label ?label .\n}}",
            sparql_string(label.trim())
        );
        Ok(self
            .select(&self.cfg.dataset_endpoint, &query)?
            .into_iter()
            .filter_map(|mut r| r.remove("item"))
            .collect())
    }
}
