//! An immutable, queryable snapshot of a corpus.

use crate::config::Config;
use crate::corpus::{CorpusStore, LibraryStore, StoreError};
use crate::graph::CitationGraph;
use crate::netviz::{self, Network};
use crate::query::{self, EvalError, ParseError, QueryAst};
use crate::readership::ReadLog;
use crate::soo::{OpContext, RankedList};
use crate::text::{MetadataIndex, TextIndex, Tokenizer};
use chrono::NaiveDate;
use std::path::Path;

pub struct Engine {
    store: CorpusStore,
    index: TextIndex,
    meta: MetadataIndex,
    graph: CitationGraph,
    log: ReadLog,
    libraries: LibraryStore,
    config: Config,
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NetworkKind {
    /// Documents linked by bibliographic coupling.
    #[default]
    Paper,
    /// Authors linked by shared documents.
    Author,
}

impl std::str::FromStr for NetworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(NetworkKind::Paper),
            "author" => Ok(NetworkKind::Author),
            _ => Err(format!("unknown network kind {s:?} (expected paper or author)")),
        }
    }
}

/// A parsed and evaluated query.
#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub ast: QueryAst,
    pub canonical: String,
    pub list: RankedList,
}

impl Engine {
    pub fn new(store: CorpusStore, libraries: LibraryStore, config: Config) -> Self {
        let tokenizer = Tokenizer::new(config.synonyms.clone());
        let index = TextIndex::build(&store, tokenizer, config.bm25);
        let meta = MetadataIndex::build(&store);
        let graph = CitationGraph::build(&store);
        let log = ReadLog::build(&store);
        Engine {
            store,
            index,
            meta,
            graph,
            log,
            libraries,
            config,
        }
    }

    /// Opens the store and libraries kept under `data_dir`.
    pub fn load(data_dir: &Path, config: Config) -> Result<Self, StoreError> {
        let store = CorpusStore::open(data_dir)?;
        Ok(Engine::new(store, LibraryStore::in_dir(data_dir), config))
    }

    pub fn store(&self) -> &CorpusStore {
        &self.store
    }

    pub fn index(&self) -> &TextIndex {
        &self.index
    }

    pub fn metadata(&self) -> &MetadataIndex {
        &self.meta
    }

    pub fn graph(&self) -> &CitationGraph {
        &self.graph
    }

    pub fn read_log(&self) -> &ReadLog {
        &self.log
    }

    pub fn libraries(&self) -> &LibraryStore {
        &self.libraries
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    /// Read events per document in the recency window ending at `now`.
    pub fn recent_reads(&self, now: NaiveDate) -> Vec<u32> {
        self.log.read_counts(now, self.config.readers.window_days)
    }

    pub fn context<'a>(&'a self, now: NaiveDate, reads: &'a [u32]) -> OpContext<'a> {
        OpContext {
            store: &self.store,
            index: &self.index,
            graph: &self.graph,
            log: &self.log,
            reads,
            now,
            params: self.config.soo,
            readers: self.config.readers,
        }
    }

    pub fn evaluate(&self, ast: &QueryAst, now: NaiveDate) -> Result<RankedList, EvalError> {
        query::evaluate(self, ast, now)
    }

    /// Clustered, labelled network over the head of `list`. `max_nodes`
    /// overrides the configured size.
    pub fn network(&self, list: &RankedList, kind: NetworkKind, max_nodes: Option<usize>, seed: u64) -> Network {
        let mut params = self.config.netviz;
        if let Some(n) = max_nodes {
            params.max_nodes = n;
        }
        let tok = self.index.tokenizer();
        match kind {
            NetworkKind::Paper => netviz::paper_network(list, &self.store, &self.graph, tok, &params, seed),
            NetworkKind::Author => netviz::author_network(list, &self.store, tok, &params, seed),
        }
    }

    pub fn query(&self, text: &str, now: NaiveDate) -> Result<QueryOutcome, QueryError> {
        let ast = query::parse(text)?;
        let list = self.evaluate(&ast, now)?;
        Ok(QueryOutcome {
            canonical: query::to_canonical_string(&ast),
            ast,
            list,
        })
    }
}
