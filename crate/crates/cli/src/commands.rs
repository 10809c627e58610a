use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use kgforge::embed::{
    build_split, export_table, index_graph, train, EmbedError, ExportTarget, Technique, TrainConfig,
};
use kgforge::ingest::{write_report, IngestError};
use kgforge::linker::{CatalogClient, FixtureCatalog, RemoteCatalog, RemoteConfig};
use kgforge::ontology::{default_link_targets, Registry, UriPolicy};
use kgforge::pipeline::{
    build_graph, default_prefixes, discover_dumps, link_graph, ontology_graph, validate_graph, void_graph,
    PipelineError,
};
use kgforge::rdf::{read_graph_file, write_graph_file, GraphBuffer, PrefixMap, RdfError};
use kgforge::stats::{count_entities, metric_distribution, write_entities_csv, write_metrics_csv};
use serde_json::json;

use crate::config::RunConfig;
use crate::manifest;
use crate::{BuildArgs, EmbedArgs, Failure, LinkArgs, StatsArgs, ValidateArgs};

type Outcome = Result<(), Failure>;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn required(flag: Option<PathBuf>, config: Option<&PathBuf>, name: &str) -> Result<PathBuf, Failure> {
    flag.or_else(|| config.cloned()).ok_or_else(|| Failure::Usage(format!("{name} is required")))
}

fn ensure_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn schema(cfg: &RunConfig, base: Option<&str>) -> Result<(Registry, UriPolicy), Failure> {
    let mut uri = cfg.uri.clone();
    if let Some(b) = base {
        uri.base = b.to_owned();
    }
    Ok((uri.registry().map_err(Failure::Usage)?, uri.policy().map_err(Failure::Usage)?))
}

fn prefixes(cfg: &RunConfig, registry: &Registry) -> PrefixMap {
    let mut p = default_prefixes(registry);
    p.extend(cfg.prefixes.clone());
    p
}

fn write_graph(graph: &GraphBuffer, path: &Path, prefixes: &PrefixMap) -> Result<usize, Failure> {
    write_graph_file(graph, path, prefixes).map_err(|e| io_failure(path, e))
}

fn read_graph(path: &Path) -> Result<GraphBuffer, Failure> {
    match read_graph_file(path) {
        Ok(g) => Ok(g),
        Err(RdfError::SinkWrite(e)) => Err(io_failure(path, e)),
        Err(e) => Err(Failure::Invalid(format!("{}: {e}", path.display()))),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_failure(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn record(dir: &Path, command: &str, config: serde_json::Value, inputs: &[PathBuf], outputs: &[PathBuf]) -> Outcome {
    manifest::record_run(dir, command, config, inputs, outputs).map(|_| ()).map_err(|e| io_failure(dir, e))
}

fn graph_or_default(graph: Option<PathBuf>, out: &Path) -> PathBuf {
    graph.unwrap_or_else(|| out.join("lpwc.nt"))
}

// build -----------------------------------------------------------------------

pub fn build(args: BuildArgs, cfg: &RunConfig) -> Outcome {
    let input = required(args.input, cfg.input.as_ref(), "--in")?;
    let out = required(args.out, cfg.output.as_ref(), "--out")?;
    if !input.is_dir() {
        return Err(Failure::Usage(format!("{} is not a directory", input.display())));
    }
    ensure_dir(&out)?;
    let (registry, policy) = schema(cfg, args.base.as_deref())?;
    let prefixes = prefixes(cfg, &registry);

    let built = build_graph(&input, &registry, &policy).map_err(|e| match e {
        PipelineError::NoDumps(_) | PipelineError::DuplicateDump { .. } => Failure::Usage(e.to_string()),
        PipelineError::Io(_) | PipelineError::Ingest { source: IngestError::Io(_), .. } => Failure::Io(e.to_string()),
        PipelineError::Rdf(RdfError::SinkWrite(_)) => Failure::Io(e.to_string()),
        _ => Failure::Invalid(e.to_string()),
    })?;

    let graph_path = out.join("lpwc.nt");
    let ontology_path = out.join("lpwc-ontology.ttl");
    let void_path = out.join("void.ttl");
    let report_path = out.join("ingest-report.jsonl");
    let triples = write_graph(&built.graph, &graph_path, &prefixes)?;
    write_graph(&ontology_graph(&registry), &ontology_path, &prefixes)?;
    write_graph(&void_graph(&built.graph, &registry, &policy, &default_link_targets()), &void_path, &prefixes)?;
    let warnings = built.report.warnings();
    let file = File::create(&report_path).map_err(|e| io_failure(&report_path, e))?;
    write_report(&warnings, BufWriter::new(file)).map_err(|e| io_failure(&report_path, e))?;

    let inputs: Vec<PathBuf> = discover_dumps(&input).map_err(|e| Failure::Io(e.to_string()))?.into_values().collect();
    let config = json!({ "input": input, "output": out, "uri": { "base": policy.base(), "ontology_namespace": registry.namespace() }, "prefixes": prefixes });
    record(&out, "build", config, &inputs, &[graph_path.clone(), ontology_path, void_path, report_path])?;

    let r = &built.report;
    println!("built {} triples from {} records ({} files)", triples, r.records, r.files.len());
    for f in &r.files {
        println!("  {}: {} objects, {} records, {} skipped, {} warnings", f.file, f.objects, f.records, f.skipped, f.warnings.len());
    }
    println!("  code links: {} joined, {} dangling", r.join.joined, r.join.dangling.len());
    println!("graph written to {}", graph_path.display());
    Ok(())
}

// link ------------------------------------------------------------------------

enum CatalogChoice {
    Fixture(PathBuf),
    Remote(String),
}

fn choose_catalog(args: &LinkArgs, cfg: &RunConfig) -> Result<CatalogChoice, Failure> {
    match (&args.catalog_fixture, &args.catalog_url) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --catalog-fixture or --catalog-url".into())),
        (Some(p), None) => return Ok(CatalogChoice::Fixture(p.clone())),
        (None, Some(u)) => return Ok(CatalogChoice::Remote(u.clone())),
        (None, None) => {}
    }
    if let Ok(url) = std::env::var("KGFORGE_CATALOG_URL") {
        if !url.is_empty() {
            return Ok(CatalogChoice::Remote(url));
        }
    }
    match (&cfg.catalog.fixture, &cfg.catalog.url) {
        (Some(_), Some(_)) => Err(Failure::Usage("catalog: set either fixture or url".into())),
        (Some(p), None) => Ok(CatalogChoice::Fixture(p.clone())),
        (None, Some(u)) => Ok(CatalogChoice::Remote(u.clone())),
        (None, None) => Err(Failure::Usage(
            "no catalog: pass --catalog-fixture or --catalog-url, or set KGFORGE_CATALOG_URL".into(),
        )),
    }
}

pub fn link(args: LinkArgs, cfg: &RunConfig) -> Outcome {
    let out = required(args.out.clone(), cfg.output.as_ref(), "--out")?;
    let graph_path = graph_or_default(args.graph.clone(), &out);
    let choice = choose_catalog(&args, cfg)?;
    let mut linker = cfg.linker.clone();
    if let Some(m) = args.min_sim {
        linker.min_sim = m;
    }
    linker.case_sensitive |= args.case_sensitive;
    linker.fold_diacritics |= args.fold_diacritics;
    linker.local_authors |= args.local_authors;
    if !(0.0..=1.0).contains(&linker.min_sim) {
        return Err(Failure::Usage(format!("min_sim {} is outside [0, 1]", linker.min_sim)));
    }
    let (registry, policy) = schema(cfg, args.base.as_deref())?;
    let prefixes = prefixes(cfg, &registry);
    ensure_dir(&out)?;
    let mut graph = read_graph(&graph_path)?;

    let mut inputs = vec![graph_path.clone()];
    let mut outputs = Vec::new();
    let catalog: Box<dyn CatalogClient> = match &choice {
        CatalogChoice::Fixture(path) => {
            inputs.push(path.clone());
            Box::new(FixtureCatalog::load(path).map_err(|e| Failure::Io(e.to_string()))?)
        }
        CatalogChoice::Remote(url) => {
            let cache_dir = args
                .cache_dir
                .clone()
                .or_else(|| std::env::var_os("KGFORGE_CACHE_DIR").map(PathBuf::from))
                .or_else(|| cfg.catalog.cache_dir.clone())
                .unwrap_or_else(|| out.clone());
            ensure_dir(&cache_dir)?;
            let cache_path = cache_dir.join("catalog-cache.jsonl");
            outputs.push(cache_path.clone());
            let mut remote = RemoteConfig { scholarly_endpoint: url.clone(), cache_path: Some(cache_path), ..RemoteConfig::default() };
            if let Some(e) = &cfg.catalog.conference_endpoint {
                remote.conference_endpoint = e.clone();
            }
            if let Some(e) = &cfg.catalog.dataset_endpoint {
                remote.dataset_endpoint = e.clone();
            }
            remote.timeout = Duration::from_secs(30);
            Box::new(RemoteCatalog::new(remote).map_err(|e| Failure::Io(e.to_string()))?)
        }
    };

    let outcome = link_graph(&mut graph, catalog.as_ref(), &registry, &policy, &linker)
        .map_err(|e| Failure::Invalid(e.to_string()))?;

    let linked_path = out.join("lpwc.nt");
    let void_path = out.join("void.ttl");
    let report_path = out.join("link-report.json");
    write_graph(&graph, &linked_path, &prefixes)?;
    write_graph(&void_graph(&graph, &registry, &policy, &default_link_targets()), &void_path, &prefixes)?;
    write_json(&report_path, &outcome.report)?;
    outputs.splice(0..0, [linked_path.clone(), void_path, report_path]);

    let catalog_desc = match &choice {
        CatalogChoice::Fixture(p) => json!({ "fixture": p }),
        CatalogChoice::Remote(u) => json!({ "url": u }),
    };
    record(&out, "link", json!({ "graph": graph_path, "output": out, "catalog": catalog_desc, "linker": linker }), &inputs, &outputs)?;

    let a = &outcome.report.authors;
    println!(
        "authors: {} names, {} linked (step 1: {}, step 2: {}), {} no match, {} ambiguous, {} catalog errors",
        a.total,
        a.linked(),
        a.linked_step1,
        a.linked_step2,
        a.no_match,
        a.ambiguous,
        a.catalog_errors
    );
    let mut catalog_errors = a.catalog_errors;
    for s in &outcome.report.sameas {
        println!("sameAs {}: {}/{} linked (ratio {:.2})", s.kind, s.linked, s.total, s.ratio);
        catalog_errors += s.catalog_errors;
    }
    println!("linked graph written to {}", linked_path.display());
    if catalog_errors > 0 {
        return Err(Failure::Io(format!("{catalog_errors} catalog lookups failed; see {}", out.join("link-report.json").display())));
    }
    Ok(())
}

// stats -----------------------------------------------------------------------

pub fn stats(args: StatsArgs, cfg: &RunConfig) -> Outcome {
    let out = required(args.out, cfg.output.as_ref(), "--out")?;
    let graph_path = graph_or_default(args.graph, &out);
    let conferences = args.conferences.unwrap_or_else(|| cfg.stats.conferences.clone());
    let format = args.format.unwrap_or_else(|| cfg.stats.format.clone());
    if format != "csv" && format != "json" {
        return Err(Failure::Usage(format!("unknown format {format:?} (csv or json)")));
    }
    let (registry, _) = schema(cfg, None)?;
    ensure_dir(&out)?;
    let graph = read_graph(&graph_path)?;
    let stats = count_entities(&graph, &registry, &default_link_targets());
    let histograms = metric_distribution(&graph, &registry, &conferences);

    let outputs = if format == "csv" {
        let entities = out.join("stats-entities.csv");
        let metrics = out.join("stats-metrics.csv");
        let f = File::create(&entities).map_err(|e| io_failure(&entities, e))?;
        write_entities_csv(&stats, &registry, f).map_err(|e| io_failure(&entities, e))?;
        let f = File::create(&metrics).map_err(|e| io_failure(&metrics, e))?;
        write_metrics_csv(&histograms, f).map_err(|e| io_failure(&metrics, e))?;
        vec![entities, metrics]
    } else {
        let path = out.join("stats.json");
        write_json(&path, &json!({ "entities": stats, "metrics": histograms }))?;
        vec![path]
    };
    record(&out, "stats", json!({ "graph": graph_path, "conferences": conferences, "format": format }), &[graph_path.clone()], &outputs)?;

    println!("{} triples", stats.triples);
    for (class, n) in &stats.classes {
        println!("  {class}: {n}");
    }
    println!("  papers with evaluations: {}", stats.papers_with_evaluations);
    for h in &histograms {
        if !h.known {
            println!("conference {:?}: unknown", h.conference);
            log::warn!("unknown conference {:?}", h.conference);
            continue;
        }
        let bins: Vec<String> = h.bins.iter().map(|(m, n)| format!("{m}={n}")).collect();
        println!("conference {}: {}", h.conference, bins.join(", "));
    }
    Ok(())
}

// embed -----------------------------------------------------------------------

fn train_config(args: &EmbedArgs, cfg: &RunConfig) -> Result<TrainConfig, Failure> {
    let mut t = cfg.embed.clone();
    if let Some(name) = &args.technique {
        t.technique = name.parse::<Technique>().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    macro_rules! take {
        ($($field:ident <- $arg:ident),*) => { $(if let Some(v) = args.$arg { t.$field = v; })* };
    }
    take!(dim <- dim, seed <- seed, max_epochs <- epochs, eval_interval <- eval_interval, learning_rate <- lr,
          margin <- margin, negatives <- negatives, batch_size <- batch_size);
    t.parallel |= args.parallel;
    t.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(t)
}

pub fn embed(args: EmbedArgs, cfg: &RunConfig) -> Outcome {
    let out = required(args.out.clone(), cfg.output.as_ref(), "--out")?;
    let graph_path = graph_or_default(args.graph.clone(), &out);
    let tc = train_config(&args, cfg)?;
    ensure_dir(&out)?;
    let graph = read_graph(&graph_path)?;
    let (dicts, triples) = index_graph(&graph);
    log::info!("{} entities, {} relations, {} triples", dicts.entities.len(), dicts.relations.len(), triples.len());

    let embed_failure = |e: EmbedError| match e {
        EmbedError::SinkWrite(io) => Failure::Io(io.to_string()),
        EmbedError::BadConfig(m) => Failure::Usage(m),
        other => Failure::Invalid(other.to_string()),
    };
    let split = build_split(&triples, &tc).map_err(embed_failure)?;
    let trained = train(&split, dicts.entities.len(), dicts.relations.len(), &tc).map_err(embed_failure)?;

    let entities = out.join("entities.tsv");
    let relations = out.join("relations.tsv");
    let report = out.join("eval-report.json");
    let log_path = out.join("train-log.csv");
    for (path, target) in [(&entities, ExportTarget::Entities), (&relations, ExportTarget::Relations)] {
        let f = File::create(path).map_err(|e| io_failure(path, e))?;
        export_table(&trained.model, &dicts, target, tc.seed, &mut BufWriter::new(f)).map_err(embed_failure)?;
    }
    write_json(&report, &trained.report)?;
    let mut w = BufWriter::new(File::create(&log_path).map_err(|e| io_failure(&log_path, e))?);
    let mut write_log = || -> std::io::Result<()> {
        writeln!(w, "epoch,loss,valid_mean_rank")?;
        for e in &trained.log {
            let mr = e.valid_mean_rank.map(|m| m.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{}", e.epoch, e.loss, mr)?;
        }
        w.flush()
    };
    write_log().map_err(|e| io_failure(&log_path, e))?;
    record(&out, "embed", json!({ "graph": graph_path, "output": out, "train": tc }), &[graph_path.clone()], &[entities, relations, report, log_path])?;

    let r = &trained.report;
    println!(
        "{}: {} entities, {} relations; split {}/{}/{}",
        tc.technique, r.entities, r.relations, r.train_triples, r.valid_triples, r.test_triples
    );
    for c in &r.checkpoints {
        println!("  epoch {}: validation mean rank {:.3}", c.epoch, c.valid_mean_rank);
    }
    if r.stopped_early {
        println!("  stopped early; kept epoch {}", r.selected_epoch);
    }
    let f = &r.test.filtered;
    println!(
        "test (filtered): MR {:.3}, MRR {:.4}, hits@1 {:.4}, hits@3 {:.4}, hits@10 {:.4}",
        f.mean_rank, f.mrr, f.hits_at_1, f.hits_at_3, f.hits_at_10
    );
    if tc.parallel {
        println!("  parallel mode: results are not bitwise reproducible");
    }
    Ok(())
}

// validate --------------------------------------------------------------------

pub fn validate(args: ValidateArgs, cfg: &RunConfig) -> Outcome {
    let (registry, policy) = schema(cfg, args.base.as_deref())?;
    let graph = read_graph(&args.graph)?;
    let violations = validate_graph(&graph, &registry, &policy);
    let dir = args
        .out
        .clone()
        .or_else(|| args.graph.parent().map(Path::to_path_buf))
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    record(&dir, "validate", json!({ "graph": args.graph, "base": policy.base(), "violations": violations.len() }), &[args.graph.clone()], &[])?;

    println!("{} triples, {} violations", graph.len(), violations.len());
    for v in violations.iter().take(50) {
        println!("  {}: {}", v.subject, v.message);
    }
    if violations.len() > 50 {
        println!("  ... {} more", violations.len() - 50);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{} ontology violations in {}", violations.len(), args.graph.display())))
    }
}
