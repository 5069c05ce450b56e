//! Serialized views of query results shared by the CLI and the HTTP API.

use crate::corpus::{CorpusStore, Document};
use crate::engine::Engine;
use crate::query::{to_canonical_string, FieldName, OpKind, QueryAst};
use crate::soo::RankedList;
use crate::text::ScoreComponents;
use chrono::NaiveDate;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryView {
    pub id: String,
    pub score: f64,
    pub components: ScoreComponents,
    pub title: String,
    pub year: i32,
    pub first_author: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryReport {
    pub query: String,
    pub n_total: usize,
    pub entries: Vec<EntryView>,
}

pub fn entry_views(list: &RankedList, store: &CorpusStore, rows: usize) -> Vec<EntryView> {
    list.entries
        .iter()
        .take(rows)
        .map(|e| {
            let d = store.doc(e.doc);
            EntryView {
                id: d.id.clone(),
                score: e.score.total,
                components: e.score.components,
                title: d.title.clone(),
                year: d.year,
                first_author: d.first_author().map(String::from),
            }
        })
        .collect()
}

impl QueryReport {
    /// Report over the first `rows` entries; `n_total` counts all of them.
    pub fn new(canonical: String, list: &RankedList, store: &CorpusStore, rows: usize) -> Self {
        QueryReport {
            query: canonical,
            n_total: list.len(),
            entries: entry_views(list, store, rows),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// The four pivot queries offered for one document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocLinks {
    pub references: String,
    pub citations: String,
    pub trending: String,
    pub similar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocReport {
    pub document: Document,
    pub citation_count: u32,
    /// Read events in the recency window ending at the reference date.
    pub reads90: u32,
    /// Query strings, one per pivot.
    pub queries: DocLinks,
}

pub fn pivot_query(kind: OpKind, id: &str) -> String {
    to_canonical_string(&QueryAst::op(kind, QueryAst::field(FieldName::Bibcode, id)))
}

impl DocReport {
    pub fn build(engine: &Engine, id: &str, now: NaiveDate) -> Option<Self> {
        let idx = engine.store().index_of(id)?;
        let reads = engine.read_log().read_counts(now, engine.config().readers.window_days);
        Some(DocReport {
            document: engine.store().doc(idx).clone(),
            citation_count: engine.graph().citation_count(idx),
            reads90: reads[idx as usize],
            queries: DocLinks {
                references: pivot_query(OpKind::References, id),
                citations: pivot_query(OpKind::Citations, id),
                trending: pivot_query(OpKind::Trending, id),
                similar: pivot_query(OpKind::Similar, id),
            },
        })
    }
}
