//! Bottom-up evaluation of query trees to ranked lists.

use super::ast::{OpArg, OpKind, QueryAst};
use crate::corpus::LibraryError;
use crate::engine::Engine;
use crate::graph::resolve_ids;
use crate::soo::{self, Entry, OpContext, Origin, RankedList, SooError};
use crate::text::{normalize_by_max, positive_terms, FieldSearch, SearchError};
use chrono::NaiveDate;
use fixedbitset::FixedBitSet;
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("library not found: {0}")]
    LibraryNotFound(String),
    #[error(transparent)]
    Library(LibraryError),
    #[error("invalid argument: {0}")]
    InvalidArgument(#[from] SooError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub fn evaluate(engine: &Engine, ast: &QueryAst, now: NaiveDate) -> Result<RankedList, EvalError> {
    let reads = engine.recent_reads(now);
    let ev = Evaluator {
        engine,
        ctx: engine.context(now, &reads),
    };
    ev.eval(ast)
}

struct Evaluator<'a> {
    engine: &'a Engine,
    ctx: OpContext<'a>,
}

impl<'a> Evaluator<'a> {
    fn search(&self) -> FieldSearch<'a> {
        FieldSearch {
            store: self.engine.store(),
            index: self.engine.index(),
            meta: self.engine.metadata(),
            now: self.ctx.now,
        }
    }

    fn eval(&self, node: &QueryAst) -> Result<RankedList, EvalError> {
        if !node.is_list() {
            return self.pure(node);
        }
        let ctx = &self.ctx;
        match node {
            QueryAst::OpCall { kind, arg } => match arg {
                OpArg::RawText(text) => Ok(soo::op_similar_text(text, ctx)?),
                OpArg::Query(child) => {
                    let mut inner = self.eval(child)?;
                    if kind.is_second_order() {
                        inner = soo::inner_truncate(inner, *kind, ctx);
                    }
                    Ok(match kind {
                        OpKind::Useful => soo::op_useful(&inner, ctx),
                        OpKind::Reviews => soo::op_reviews(&inner, ctx),
                        OpKind::Trending => soo::op_trending(&inner, ctx),
                        OpKind::Similar => soo::op_similar(&inner, ctx),
                        OpKind::References => soo::op_references(&inner, ctx),
                        OpKind::Citations => soo::op_citations(&inner, ctx),
                    })
                }
            },
            QueryAst::TopN { n, child, sort } => Ok(soo::op_topn(*n, self.eval(child)?, *sort, ctx)?),
            QueryAst::Docs(name) => {
                let lib = self.engine.libraries().load(name).map_err(|e| match e {
                    LibraryError::NotFound(n) => EvalError::LibraryNotFound(n),
                    e => EvalError::Library(e),
                })?;
                Ok(ctx.queryless_list(Origin::Docs, resolve_ids(ctx.store, &lib.doc_ids)))
            }
            QueryAst::And(children) => self.and(children),
            QueryAst::Or(children) => self.or(children),
            QueryAst::Not(child) => {
                let excluded = self.doc_set(&self.eval(child)?);
                let rest = (0..ctx.store.len() as u32).filter(|d| !excluded.contains(*d as usize));
                Ok(ctx.queryless_list(Origin::Search, rest))
            }
            _ => unreachable!("leaf nodes are pure"),
        }
    }

    fn doc_set(&self, list: &RankedList) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.ctx.store.len());
        for e in &list.entries {
            set.insert(e.doc as usize);
        }
        set
    }

    /// Plain fielded search: exact set, then composite score.
    fn pure(&self, node: &QueryAst) -> Result<RankedList, EvalError> {
        let set = self.search().run(node)?;
        let terms = positive_terms(node, self.engine.index());
        let ctx = &self.ctx;
        if terms.is_empty() {
            return Ok(ctx.queryless_list(Origin::Search, set.ones().map(|d| d as u32)));
        }
        let bm = self.normalized_bm25(&terms, &set);
        let params = self.engine.config().score;
        let mut entries: Vec<Entry> = set
            .ones()
            .map(|d| {
                let doc = d as u32;
                let b = bm.get(&doc).copied().unwrap_or(0.0);
                Entry {
                    doc,
                    score: params.search(b, ctx.graph.citation_count(doc), ctx.reads[d]),
                }
            })
            .collect();
        ctx.sort_standard(&mut entries);
        Ok(RankedList::new(Origin::Search, entries))
    }

    fn normalized_bm25(&self, terms: &[String], set: &FixedBitSet) -> HashMap<u32, f64> {
        let raw = self.engine.index().bm25_all(terms, Some(set));
        let mut values: Vec<f64> = raw.iter().map(|(_, s)| *s).collect();
        normalize_by_max(&mut values);
        raw.iter().map(|(d, _)| *d).zip(values).collect()
    }

    /// Conjunction involving operator output. The first positive list child
    /// supplies order and scores; other lists and pure children filter it,
    /// and query text among the pure children re-ranks it.
    fn and(&self, children: &[QueryAst]) -> Result<RankedList, EvalError> {
        let mut lists = Vec::new();
        let mut negated = Vec::new();
        let mut pure = Vec::new();
        for c in children {
            match c {
                QueryAst::Not(inner) if inner.is_list() => negated.push(&**inner),
                c if c.is_list() => lists.push(c),
                c => pure.push(c.clone()),
            }
        }
        let pure = match pure.len() {
            0 => None,
            1 => pure.pop(),
            _ => Some(QueryAst::And(pure)),
        };
        let ctx = &self.ctx;
        let mut terms = Vec::new();
        let mut primary = match lists.split_first() {
            None => match &pure {
                Some(p) => self.pure(p)?,
                None => ctx.queryless_list(Origin::Search, 0..ctx.store.len() as u32),
            },
            Some((first, others)) => {
                let mut primary = self.eval(first)?;
                let mut keep: Option<FixedBitSet> = None;
                let mut narrow = |set: FixedBitSet| match &mut keep {
                    Some(k) => k.intersect_with(&set),
                    None => keep = Some(set),
                };
                for other in others {
                    narrow(self.doc_set(&self.eval(other)?));
                }
                if let Some(p) = &pure {
                    narrow(self.search().run(p)?);
                    terms = positive_terms(p, self.engine.index());
                }
                if let Some(k) = keep {
                    primary.retain(|d| k.contains(d as usize));
                }
                primary
            }
        };
        for n in negated {
            let excluded = self.doc_set(&self.eval(n)?);
            primary.retain(|d| !excluded.contains(d as usize));
        }
        if !terms.is_empty() {
            self.blend(&mut primary, &terms);
        }
        Ok(primary)
    }

    fn blend(&self, list: &mut RankedList, terms: &[String]) {
        let mut set = FixedBitSet::with_capacity(self.ctx.store.len());
        for e in &list.entries {
            set.insert(e.doc as usize);
        }
        let bm = self.normalized_bm25(terms, &set);
        let mut freq: Vec<f64> = list.entries.iter().map(|e| e.score.total).collect();
        normalize_by_max(&mut freq);
        let params = self.engine.config().score;
        for (e, f) in list.entries.iter_mut().zip(freq) {
            e.score = params.blended(f, bm.get(&e.doc).copied().unwrap_or(0.0));
        }
        self.ctx.sort_standard(&mut list.entries);
    }

    /// Union keeping each document's best score.
    fn or(&self, children: &[QueryAst]) -> Result<RankedList, EvalError> {
        let mut best: HashMap<u32, Entry> = HashMap::new();
        let mut origin = None;
        for c in children {
            let list = self.eval(c)?;
            origin.get_or_insert(list.origin);
            for e in list.entries {
                best.entry(e.doc)
                    .and_modify(|b| {
                        if e.score.total > b.score.total {
                            *b = e;
                        }
                    })
                    .or_insert(e);
            }
        }
        let mut entries: Vec<Entry> = best.into_values().collect();
        self.ctx.sort_standard(&mut entries);
        Ok(RankedList::new(origin.unwrap_or(Origin::Search), entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::corpus::{CorpusStore, LibraryStore};
    use crate::fixtures::{self, D1, D2, D3, D4, D5};
    use crate::query::parse;

    fn engine(store: CorpusStore) -> Engine {
        let mut cfg = Config::default();
        cfg.readers.min_docs = 2;
        Engine::new(store, LibraryStore::in_memory(), cfg)
    }

    fn ids(e: &Engine, q: &str) -> Vec<String> {
        let list = e.evaluate(&parse(q).unwrap(), fixtures::r3_now()).unwrap();
        list.ids(e.store())
    }

    #[test]
    fn fixture_queries() {
        let e = engine(fixtures::c5_r3_store());
        assert_eq!(ids(&e, "useful(year:2015-2020)"), [D3, D1, D2]);
        assert_eq!(ids(&e, &format!("reviews(references(bibcode:{D5}))")), [D5, D3, D4]);
        assert_eq!(ids(&e, &format!("citations(bibcode:{D1})")), [D4, D3, D2]);
        assert_eq!(ids(&e, &format!("trending(bibcode:{D1})")), [D1, D2, D3]);
        assert_eq!(
            ids(&e, &format!("reviews(bibcode:{D1} bibcode:{D2})")),
            [D3, D2, D4, D5]
        );
    }

    #[test]
    fn pure_useful_scores_are_frequencies() {
        let e = engine(fixtures::c5_r3_store());
        let list = e
            .evaluate(&parse("useful(year:2015-2020)").unwrap(), fixtures::r3_now())
            .unwrap();
        let totals: Vec<f64> = list.entries.iter().map(|x| x.score.total).collect();
        assert_eq!(totals, [2.0, 1.0, 1.0]);
    }

    #[test]
    fn negated_operator_is_set_difference() {
        let e = engine(fixtures::c5_r3_store());
        let q = format!("useful(year:2015-2020) -references(bibcode:{D3})");
        assert_eq!(ids(&e, &q), [D3]);
        assert_eq!(ids(&e, &format!("-citations(bibcode:{D1})")), [D1, D5]);
    }

    #[test]
    fn operator_output_filtered_by_fields() {
        let e = engine(fixtures::c5_r3_store());
        assert_eq!(ids(&e, "useful(year:2015-2020) year:2000-2005"), [D1, D2]);
        assert_eq!(
            ids(&e, &format!("useful(year:2015-2020) citations(bibcode:{D1})")),
            [D3, D2]
        );
    }

    #[test]
    fn blended_rerank_with_text() {
        let mut store = CorpusStore::new();
        let doc = |id: &str, text: &str, refs: &[&str]| {
            let mut d = crate::corpus::Document::new(id, 2020);
            d.abstract_text = text.into();
            d.references = refs.iter().map(|r| r.to_string()).collect();
            d
        };
        store.add_document(doc("Q1", "lensing lensing", &[])).unwrap();
        store
            .add_document(doc("Q2", "lensing survey of galaxy maps", &[]))
            .unwrap();
        store.add_document(doc("Q3", "unrelated", &[])).unwrap();
        for (id, refs) in [
            ("X", &["Q1", "Q2", "Q3"][..]),
            ("Y", &["Q1", "Q2", "Q3"]),
            ("Z", &["Q2", "Q3"]),
        ] {
            store.add_document(doc(id, "", refs)).unwrap();
        }
        let e = engine(store);
        let list = e
            .evaluate(
                &parse("useful(bibcode:X bibcode:Y bibcode:Z) lensing").unwrap(),
                fixtures::r3_now(),
            )
            .unwrap();
        assert_eq!(list.ids(e.store()), ["Q1", "Q2"]);
        for x in &list.entries {
            let c = x.score.components;
            assert!((x.score.total - (0.5 * c.freq + 0.5 * c.bm25)).abs() < 1e-12);
        }
        let q2 = &list.entries[1].score.components;
        assert!((q2.freq - 1.0).abs() < 1e-12);
        assert!((list.entries[0].score.components.bm25 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn libraries() {
        let e = engine(fixtures::c5_r3_store());
        e.libraries()
            .save("mine", &[D4.into(), "ghost".into(), D5.into()])
            .unwrap();
        assert_eq!(ids(&e, "useful(docs(library/mine))"), [D3, D1, D2]);
        let err = e.evaluate(&parse("docs(library/none)").unwrap(), fixtures::r3_now());
        assert!(matches!(err, Err(EvalError::LibraryNotFound(_))));
    }

    #[test]
    fn similar_modes() {
        let e = engine(fixtures::t3_store());
        assert_eq!(ids(&e, "similar(bibcode:A)"), ["B", "C"]);
        assert_eq!(ids(&e, r#"similar("weak lensing survey",input)"#)[0], "A");
    }

    #[test]
    fn or_of_lists_is_a_union() {
        let e = engine(fixtures::c5_r3_store());
        let mut got = ids(&e, &format!("citations(bibcode:{D3}) OR references(bibcode:{D3})"));
        got.sort();
        assert_eq!(got, [D1, D2, D4, D5]);
    }
}
