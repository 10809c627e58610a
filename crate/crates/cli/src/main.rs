mod commands;
mod config;
mod logging;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Papers-With-Code dumps to an RDF knowledge graph: build, link, stats,
/// embeddings and validation.
#[derive(Debug, Parser)]
#[command(name = "kgforge", version)]
struct Cli {
    /// Configuration file (default: ./kgforge.toml when present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// error, warn, info, debug or trace. Logs go to stderr as JSON lines.
    #[arg(long, global = true)]
    log_level: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest the dumps in a directory and write the graph, ontology and VoID.
    Build(BuildArgs),
    /// Link authors, papers, conferences and datasets to external catalogs.
    Link(LinkArgs),
    /// Per-class counts and per-conference metric histograms.
    Stats(StatsArgs),
    /// Train and evaluate knowledge-graph embeddings.
    Embed(EmbedArgs),
    /// Check a serialized graph against the ontology.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Directory holding the JSON dumps (plain or gzipped).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base namespace for minted entity IRIs.
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    /// Graph to link (default: <out>/lpwc.nt).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Offline catalog JSON file.
    #[arg(long)]
    pub catalog_fixture: Option<PathBuf>,
    /// SPARQL endpoint for authors and works (also read from KGFORGE_CATALOG_URL).
    #[arg(long)]
    pub catalog_url: Option<String>,
    /// Directory for catalog-cache.jsonl (also KGFORGE_CACHE_DIR; default: --out).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub min_sim: Option<f64>,
    #[arg(long)]
    pub case_sensitive: bool,
    #[arg(long)]
    pub fold_diacritics: bool,
    /// Mint local Author entities with owl:sameAs to the external IRI.
    #[arg(long)]
    pub local_authors: bool,
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated conference names or acronyms.
    #[arg(long, value_delimiter = ',')]
    pub conferences: Option<Vec<String>>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// transe, distmult, complex or rotate.
    #[arg(long)]
    pub technique: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub eval_interval: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Unsynchronised parallel updates (fast, not bitwise reproducible).
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Where to write manifest.json (default: the graph's directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub base: Option<String>,
}

/// How a run ended; the exit code follows from it.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or configuration.
    Usage(String),
    /// Input or output failed validation.
    Invalid(String),
    /// File system or catalog trouble.
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match config::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("kgforge: {e}");
            return ExitCode::from(2);
        }
    };
    let level = cli.log_level.as_deref().or(cfg.log_level.as_deref()).unwrap_or("info");
    let Some(level) = logging::parse_level(level) else {
        eprintln!("kgforge: unknown log level {level:?}");
        return ExitCode::from(2);
    };
    logging::init(level);

    let result = match cli.command {
        Command::Build(a) => commands::build(a, &cfg),
        Command::Link(a) => commands::link(a, &cfg),
        Command::Stats(a) => commands::stats(a, &cfg),
        Command::Embed(a) => commands::embed(a, &cfg),
        Command::Validate(a) => commands::validate(a, &cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::error!("{}", f.message());
            eprintln!("kgforge: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
