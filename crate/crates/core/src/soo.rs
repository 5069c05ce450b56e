//! Ranked lists and the list operators: `useful`, `reviews`, `trending`,
//! `similar`, `topn`, `references` and `citations`.

use crate::corpus::CorpusStore;
use crate::graph::CitationGraph;
use crate::query::{Direction, OpKind, SortKey, SortSpec, TOPN_MAX};
use crate::readership::{ReadLog, ReaderFilterConfig};
use crate::text::{score, Score, TextIndex};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Search,
    Useful,
    Reviews,
    Trending,
    Similar,
    Topn,
    References,
    Citations,
    Docs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub doc: u32,
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub origin: Origin,
    pub entries: Vec<Entry>,
}

impl RankedList {
    pub fn new(origin: Origin, entries: Vec<Entry>) -> Self {
        RankedList { origin, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn docs(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.doc).collect()
    }

    pub fn ids(&self, store: &CorpusStore) -> Vec<String> {
        self.entries.iter().map(|e| store.doc(e.doc).id.clone()).collect()
    }

    pub fn retain(&mut self, f: impl Fn(u32) -> bool) {
        self.entries.retain(|e| f(e.doc));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SooParams {
    /// Inner list size limit for the second-order operators.
    pub cap: usize,
    /// Query terms drawn from the pseudo-document by `similar`.
    pub similar_terms: usize,
}

impl Default for SooParams {
    fn default() -> Self {
        SooParams {
            cap: 200,
            similar_terms: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SooError {
    #[error("similar needs nonempty input text")]
    EmptyText,
    #[error("topn count must be in 1..=1000, got {0}")]
    TopNRange(u32),
}

/// Read-only state an operator needs, fixed to one reference date.
#[derive(Clone, Copy)]
pub struct OpContext<'a> {
    pub store: &'a CorpusStore,
    pub index: &'a TextIndex,
    pub graph: &'a CitationGraph,
    pub log: &'a ReadLog,
    /// Read events per document inside the recency window.
    pub reads: &'a [u32],
    pub now: NaiveDate,
    pub params: SooParams,
    pub readers: ReaderFilterConfig,
}

impl<'a> OpContext<'a> {
    pub fn tie_break(&self, a: u32, b: u32) -> Ordering {
        self.graph
            .citation_count(b)
            .cmp(&self.graph.citation_count(a))
            .then_with(|| self.store.doc(a).id.cmp(&self.store.doc(b).id))
    }

    pub fn cmp_standard(&self, a: &Entry, b: &Entry) -> Ordering {
        b.score
            .total
            .total_cmp(&a.score.total)
            .then_with(|| self.tie_break(a.doc, b.doc))
    }

    pub fn cmp_by(&self, spec: SortSpec, a: &Entry, b: &Entry) -> Ordering {
        let key = match spec.key {
            SortKey::Score => a.score.total.total_cmp(&b.score.total),
            SortKey::CitationCount => self.graph.citation_count(a.doc).cmp(&self.graph.citation_count(b.doc)),
            SortKey::ReadCount => self.reads[a.doc as usize].cmp(&self.reads[b.doc as usize]),
            SortKey::Date => self.graph.pub_key(a.doc).cmp(&self.graph.pub_key(b.doc)),
            SortKey::FirstAuthor => self.graph.author_key(a.doc).cmp(self.graph.author_key(b.doc)),
        };
        let key = match spec.direction {
            Direction::Asc => key,
            Direction::Desc => key.reverse(),
        };
        key.then_with(|| self.tie_break(a.doc, b.doc))
    }

    pub fn sort_standard(&self, entries: &mut [Entry]) {
        entries.sort_by(|a, b| self.cmp_standard(a, b));
    }

    pub fn queryless(&self, doc: u32) -> Score {
        score::queryless(self.graph.citation_count(doc), self.reads[doc as usize])
    }

    /// Queryless scores for `docs`, in standard order.
    pub fn queryless_list(&self, origin: Origin, docs: impl IntoIterator<Item = u32>) -> RankedList {
        let mut entries: Vec<Entry> = docs
            .into_iter()
            .map(|doc| Entry {
                doc,
                score: self.queryless(doc),
            })
            .collect();
        self.sort_standard(&mut entries);
        RankedList::new(origin, entries)
    }

    fn collated(&self, origin: Origin, counts: HashMap<u32, u32>) -> RankedList {
        let mut entries: Vec<Entry> = counts
            .into_iter()
            .map(|(doc, n)| Entry {
                doc,
                score: score::collation(n as f64),
            })
            .collect();
        self.sort_standard(&mut entries);
        RankedList::new(origin, entries)
    }
}

pub fn default_inner_sort(kind: OpKind) -> SortSpec {
    match kind {
        OpKind::Reviews => SortSpec::CITATIONS_DESC,
        _ => SortSpec::SCORE_DESC,
    }
}

/// Lists above the cap are re-sorted by the operator's default sort and
/// truncated; shorter lists pass through untouched.
pub fn inner_truncate(mut list: RankedList, kind: OpKind, ctx: &OpContext) -> RankedList {
    if list.len() <= ctx.params.cap {
        return list;
    }
    let spec = default_inner_sort(kind);
    list.entries.sort_by(|a, b| ctx.cmp_by(spec, a, b));
    list.entries.truncate(ctx.params.cap);
    list
}

/// Papers cited by the inner set, ranked by how many inner papers cite them.
pub fn op_useful(inner: &RankedList, ctx: &OpContext) -> RankedList {
    let mut counts = HashMap::new();
    for d in unique_docs(inner) {
        for &r in ctx.graph.references(d) {
            *counts.entry(r).or_insert(0) += 1;
        }
    }
    ctx.collated(Origin::Useful, counts)
}

/// Papers citing the inner set, ranked by how many inner papers they cite.
pub fn op_reviews(inner: &RankedList, ctx: &OpContext) -> RankedList {
    let mut counts = HashMap::new();
    for d in unique_docs(inner) {
        for &c in ctx.graph.citers(d) {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    ctx.collated(Origin::Reviews, counts)
}

/// Papers read by recent active readers of the inner set, ranked by reader count.
pub fn op_trending(inner: &RankedList, ctx: &OpContext) -> RankedList {
    let counts = ctx.log.co_read_counts(&inner.docs(), ctx.now, &ctx.readers);
    ctx.collated(Origin::Trending, counts)
}

fn unique_docs(list: &RankedList) -> Vec<u32> {
    let mut seen = HashSet::new();
    list.entries.iter().map(|e| e.doc).filter(|d| seen.insert(*d)).collect()
}

/// The `k` highest tf·idf terms of a pseudo-document; ties by term.
/// Terms absent from the corpus are never chosen.
pub fn pseudo_document_terms<'t>(texts: impl IntoIterator<Item = &'t str>, index: &TextIndex, k: usize) -> Vec<String> {
    let mut tf: HashMap<String, u32> = HashMap::new();
    for text in texts {
        for t in index.tokenizer().terms(text) {
            *tf.entry(t).or_insert(0) += 1;
        }
    }
    let mut weighted: Vec<(f64, String)> = tf
        .into_iter()
        .filter(|(t, _)| index.df(t) > 0)
        .map(|(t, n)| (n as f64 * index.idf(&t), t))
        .collect();
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    weighted.into_iter().take(k).map(|(_, t)| t).collect()
}

fn similar_to_terms(terms: &[String], exclude: &HashSet<u32>, ctx: &OpContext) -> RankedList {
    let mut entries: Vec<Entry> = ctx
        .index
        .bm25_all(terms, None)
        .into_iter()
        .filter(|(d, bm)| *bm > 0.0 && !exclude.contains(d))
        .map(|(doc, bm)| Entry {
            doc,
            score: Score {
                total: bm,
                components: score::ScoreComponents {
                    bm25: bm,
                    ..Default::default()
                },
            },
        })
        .collect();
    ctx.sort_standard(&mut entries);
    RankedList::new(Origin::Similar, entries)
}

/// Documents textually similar to the inner set's abstracts, inner set removed.
pub fn op_similar(inner: &RankedList, ctx: &OpContext) -> RankedList {
    let docs = unique_docs(inner);
    let texts = docs.iter().map(|&d| ctx.store.doc(d).abstract_text.as_str());
    let terms = pseudo_document_terms(texts, ctx.index, ctx.params.similar_terms);
    similar_to_terms(&terms, &docs.into_iter().collect(), ctx)
}

/// Documents textually similar to free text; nothing is removed.
pub fn op_similar_text(text: &str, ctx: &OpContext) -> Result<RankedList, SooError> {
    if text.trim().is_empty() {
        return Err(SooError::EmptyText);
    }
    let terms = pseudo_document_terms([text], ctx.index, ctx.params.similar_terms);
    Ok(similar_to_terms(&terms, &HashSet::new(), ctx))
}

pub fn op_topn(n: u32, mut list: RankedList, sort: SortSpec, ctx: &OpContext) -> Result<RankedList, SooError> {
    if !(1..=TOPN_MAX).contains(&n) {
        return Err(SooError::TopNRange(n));
    }
    list.entries.sort_by(|a, b| ctx.cmp_by(sort, a, b));
    list.entries.truncate(n as usize);
    list.origin = Origin::Topn;
    Ok(list)
}

pub fn op_references(inner: &RankedList, ctx: &OpContext) -> RankedList {
    let docs = ctx.graph.references_of(&unique_docs(inner), ctx.store);
    listed(Origin::References, docs, ctx)
}

pub fn op_citations(inner: &RankedList, ctx: &OpContext) -> RankedList {
    let docs = ctx.graph.citations_of(&unique_docs(inner), ctx.store);
    listed(Origin::Citations, docs, ctx)
}

/// Queryless scores in the given (non-score) order.
fn listed(origin: Origin, docs: Vec<u32>, ctx: &OpContext) -> RankedList {
    let entries = docs
        .into_iter()
        .map(|doc| Entry {
            doc,
            score: ctx.queryless(doc),
        })
        .collect();
    RankedList::new(origin, entries)
}
