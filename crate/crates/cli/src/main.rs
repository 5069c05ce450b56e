mod render;
mod repl;

use chrono::{NaiveDate, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use soograph_core::config::ConfigError;
use soograph_core::corpus::{parse_date, parse_library_file, CorpusStore, IngestReport};
use soograph_core::engine::{NetworkKind, QueryError};
use soograph_core::netviz::{export, Format};
use soograph_core::synth::{generate, SynthParams};
use soograph_core::{Config, Engine};
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "soograph",
    version,
    about = "Second order search over a citation and readership corpus"
)]
struct Cli {
    /// Store directory (docs.jsonl, reads.jsonl, libraries/).
    #[arg(long, global = true, env = "SOOGRAPH_DATA_DIR", default_value = "soograph-data")]
    data_dir: PathBuf,
    /// Reference date for every NOW-relative computation (YYYY-MM-DD).
    #[arg(long, global = true, value_parser = date_arg)]
    now: Option<NaiveDate>,
    /// Rows shown by table and ids output; JSON is never truncated.
    #[arg(long, global = true, default_value_t = 20)]
    limit: usize,
    /// key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Ids,
}

#[derive(Subcommand)]
enum Command {
    /// Load documents (and optionally read events) into the store.
    Ingest {
        docs: PathBuf,
        #[arg(long)]
        reads: Option<PathBuf>,
    },
    /// Evaluate one query.
    Query {
        query: String,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Interactive query loop.
    Repl {
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Build, cluster and export the network of a query's results.
    Network {
        query: String,
        /// dot, graphml or json
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// paper or author
        #[arg(long, default_value = "paper")]
        kind: String,
    },
    /// Write a synthetic corpus and read log.
    Synth(SynthArgs),
    /// Manage saved document lists.
    #[command(subcommand)]
    Library(LibraryCommand),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Directory of static files served for non-API paths.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "synth-docs.jsonl")]
    docs_out: PathBuf,
    #[arg(long, default_value = "synth-reads.jsonl")]
    reads_out: PathBuf,
    #[arg(long)]
    n_docs: Option<usize>,
    #[arg(long)]
    n_topics: Option<usize>,
    #[arg(long)]
    refs_mean: Option<f64>,
    #[arg(long)]
    pa_exponent: Option<f64>,
    #[arg(long)]
    n_readers: Option<usize>,
    #[arg(long)]
    reads_mean: Option<f64>,
    #[arg(long)]
    year_from: Option<i32>,
    #[arg(long)]
    year_to: Option<i32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = date_arg)]
    reads_until: Option<NaiveDate>,
}

#[derive(Subcommand)]
enum LibraryCommand {
    /// List saved libraries.
    List,
    /// Print the ids of a library.
    Show { name: String },
    /// Save the results of a query, or the ids in a file, as a library.
    Save {
        name: String,
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        query: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

fn date_arg(s: &str) -> Result<NaiveDate, String> {
    parse_date(s).ok_or_else(|| format!("expected YYYY-MM-DD, got {s:?}"))
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Usage(String),
    Eval(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Eval(_) => 3,
        }
    }

    pub fn message_text(&self) -> &str {
        self.message()
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Eval(m) => m,
        }
    }
}

/// Maps a query failure onto an exit class, with a caret under parse errors.
pub fn query_failure(query: &str, e: QueryError) -> Failure {
    match e {
        QueryError::Parse(p) => {
            let col = query[..p.offset.min(query.len())].chars().count();
            Failure::Usage(format!("{p}\n  {query}\n  {}^", " ".repeat(col)))
        }
        QueryError::Eval(e) => Failure::Eval(e.to_string()),
    }
}

struct Ctx {
    data_dir: PathBuf,
    now: NaiveDate,
    limit: usize,
    config: Option<PathBuf>,
}

impl Ctx {
    fn config(&self) -> Result<Config, Failure> {
        match &self.config {
            None => Ok(Config::default()),
            Some(p) => Config::load(p).map_err(|e| match e {
                ConfigError::Io { .. } => Failure::Io(format!("config: {e}")),
                e => Failure::Usage(format!("config {}: {e}", p.display())),
            }),
        }
    }

    fn engine(&self) -> Result<Engine, Failure> {
        let config = self.config()?;
        Engine::load(&self.data_dir, config).map_err(|e| Failure::Io(e.to_string()))
    }
}

fn out() -> io::StdoutLock<'static> {
    io::stdout().lock()
}

fn write_out(text: &str) -> Result<(), Failure> {
    let mut o = out();
    o.write_all(text.as_bytes())
        .and_then(|_| o.flush())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn report_json(r: &IngestReport) -> serde_json::Value {
    serde_json::json!({
        "accepted": r.accepted,
        "skipped": r.skipped,
        "duplicates": r.duplicates,
        "warnings": r.warnings,
    })
}

fn ingest(ctx: &Ctx, docs: &Path, reads: Option<&Path>) -> Result<(), Failure> {
    let mut store = CorpusStore::open(&ctx.data_dir).map_err(|e| Failure::Io(e.to_string()))?;
    let d = store
        .ingest_documents(open(docs)?)
        .map_err(|e| Failure::Io(format!("{}: {e}", docs.display())))?;
    for w in &d.warnings {
        eprintln!("warning: {}:{}: {}", docs.display(), w.line, w.message);
    }
    let r = match reads {
        Some(p) => {
            let r = store
                .ingest_read_events(open(p)?)
                .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            for w in &r.warnings {
                eprintln!("warning: {}:{}: {}", p.display(), w.line, w.message);
            }
            Some(r)
        }
        None => None,
    };
    store.save(&ctx.data_dir).map_err(|e| Failure::Io(e.to_string()))?;
    let mut body = serde_json::to_value(store.stats()).expect("stats serialize");
    body["docs"] = report_json(&d);
    if let Some(r) = &r {
        body["reads"] = report_json(r);
    }
    write_out(&format!("{body}\n"))
}

fn query(ctx: &Ctx, q: &str, format: OutputFormat) -> Result<(), Failure> {
    let engine = ctx.engine()?;
    let outcome = engine.query(q, ctx.now).map_err(|e| query_failure(q, e))?;
    write_out(&render::render(&engine, &outcome, format, ctx.limit))
}

fn network(ctx: &Ctx, q: &str, format: &str, max_nodes: Option<usize>, seed: u64, kind: &str) -> Result<(), Failure> {
    let format: Format = format.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
    let kind: NetworkKind = kind.parse().map_err(Failure::Usage)?;
    let engine = ctx.engine()?;
    let outcome = engine.query(q, ctx.now).map_err(|e| query_failure(q, e))?;
    let net = engine.network(&outcome.list, kind, max_nodes, seed);
    let mut text = export(&net, format);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    write_out(&text)
}

fn synth(a: &SynthArgs) -> Result<(), Failure> {
    let mut p = SynthParams::default();
    p.n_docs = a.n_docs.unwrap_or(p.n_docs);
    p.n_topics = a.n_topics.unwrap_or(p.n_topics);
    p.refs_mean = a.refs_mean.unwrap_or(p.refs_mean);
    p.pa_exponent = a.pa_exponent.unwrap_or(p.pa_exponent);
    p.n_readers = a.n_readers.unwrap_or(p.n_readers);
    p.reads_mean = a.reads_mean.unwrap_or(p.reads_mean);
    p.year_span = (a.year_from.unwrap_or(p.year_span.0), a.year_to.unwrap_or(p.year_span.1));
    p.seed = a.seed.unwrap_or(p.seed);
    p.reads_until = a.reads_until.unwrap_or(p.reads_until);
    p.validate().map_err(Failure::Usage)?;
    let c = generate(&p);
    let write = |path: &Path, body: String| {
        std::fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    };
    write(&a.docs_out, c.documents_jsonl())?;
    write(&a.reads_out, c.events_jsonl())?;
    write_out(&format!(
        "{}\n",
        serde_json::json!({"n_docs": c.documents.len(), "n_read_events": c.events.len(),
            "docs": a.docs_out, "reads": a.reads_out})
    ))
}

fn library(ctx: &Ctx, cmd: &LibraryCommand) -> Result<(), Failure> {
    let engine = ctx.engine()?;
    let libs = engine.libraries();
    let lib_err = |e: soograph_core::corpus::LibraryError| match e {
        soograph_core::corpus::LibraryError::Io { .. } => Failure::Io(e.to_string()),
        soograph_core::corpus::LibraryError::NotFound(_) => Failure::Eval(e.to_string()),
        e => Failure::Usage(e.to_string()),
    };
    match cmd {
        LibraryCommand::List => {
            let text: String = libs.list().map_err(lib_err)?.into_iter().map(|n| n + "\n").collect();
            write_out(&text)
        }
        LibraryCommand::Show { name } => {
            let lib = libs.load(name).map_err(lib_err)?;
            write_out(&lib.doc_ids.iter().map(|i| format!("{i}\n")).collect::<String>())
        }
        LibraryCommand::Save { name, query, file } => {
            let ids = match (query, file) {
                (Some(q), _) => engine
                    .query(q, ctx.now)
                    .map_err(|e| query_failure(q, e))?
                    .list
                    .ids(engine.store()),
                (None, Some(f)) => {
                    let text = std::fs::read_to_string(f).map_err(|e| Failure::Io(format!("{}: {e}", f.display())))?;
                    parse_library_file(&text)
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let lib = libs.save(name, &ids).map_err(lib_err)?;
            write_out(&format!(
                "{}\n",
                serde_json::json!({"name": lib.name, "n_docs": lib.doc_ids.len()})
            ))
        }
    }
}

fn serve(ctx: &Ctx, port: u16, bind: &str, static_dir: Option<PathBuf>, now: Option<NaiveDate>) -> Result<(), Failure> {
    let engine = ctx.engine()?;
    let n = engine.store().len();
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(format!("runtime: {e}")))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind((bind, port))
            .await
            .map_err(|e| Failure::Io(format!("bind {bind}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| Failure::Io(e.to_string()))?;
        log::info!("serving {n} documents on http://{addr}");
        let state = std::sync::Arc::new(soograph_http::AppState::new(engine, now));
        let app = soograph_http::router(state, static_dir);
        soograph_http::serve(listener, app, soograph_http::shutdown_signal())
            .await
            .map_err(|e| Failure::Io(e.to_string()))?;
        log::info!("shut down");
        Ok(())
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Ctx {
        data_dir: cli.data_dir,
        now: cli.now.unwrap_or_else(|| Utc::now().date_naive()),
        limit: cli.limit,
        config: cli.config,
    };
    match &cli.command {
        Command::Ingest { docs, reads } => ingest(&ctx, docs, reads.as_deref()),
        Command::Query { query: q, format } => query(&ctx, q, *format),
        Command::Repl { format } => {
            let engine = ctx.engine()?;
            repl::run(&engine, ctx.now, *format, ctx.limit, io::stdin().lock(), &mut out())
                .map_err(|e| Failure::Io(format!("repl: {e}")))
        }
        Command::Network {
            query: q,
            format,
            max_nodes,
            seed,
            kind,
        } => network(&ctx, q, format, *max_nodes, *seed, kind),
        Command::Synth(a) => synth(a),
        Command::Library(cmd) => library(&ctx, cmd),
        Command::Serve { port, bind, static_dir } => serve(&ctx, *port, bind, static_dir.clone(), cli.now),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or("warn,soograph=info,soograph_http=info"),
    )
    .format_timestamp_millis()
    .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
