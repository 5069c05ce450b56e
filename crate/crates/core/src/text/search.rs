//! Exact set semantics for fielded boolean queries.

use super::index::{FieldMask, TextIndex};
use super::tokenize::Field;
use crate::corpus::CorpusStore;
use crate::query::{FieldName, QueryAst};
use chrono::NaiveDate;
use fixedbitset::FixedBitSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("operator node is not a document filter")]
    NotAFilter,
}

/// Case-folded copies of the metadata fields searched by value.
#[derive(Debug, Clone, Default)]
pub struct MetadataIndex {
    authors: Vec<Vec<String>>,
    affiliations: Vec<Vec<String>>,
    bibstem: Vec<String>,
    properties: Vec<Vec<String>>,
}

/// Lowercase with all whitespace removed, so `"fortney,j"` and
/// `"Fortney, J."` share a prefix.
pub fn fold_name(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Folds an author query; `"donahue.m"` (no comma) reads as `"donahue,m"`.
pub fn fold_author_query(s: &str) -> String {
    let q = fold_name(s);
    if q.contains(',') {
        q
    } else {
        q.replacen('.', ",", 1)
    }
}

impl MetadataIndex {
    pub fn build(store: &CorpusStore) -> Self {
        let docs = store.documents();
        MetadataIndex {
            authors: docs
                .iter()
                .map(|d| d.authors.iter().map(|a| fold_name(a)).collect())
                .collect(),
            affiliations: docs
                .iter()
                .map(|d| d.affiliations.iter().map(|a| a.to_lowercase()).collect())
                .collect(),
            bibstem: docs.iter().map(|d| d.bibstem.to_lowercase()).collect(),
            properties: docs
                .iter()
                .map(|d| d.properties.iter().map(|p| p.to_lowercase()).collect())
                .collect(),
        }
    }
}

/// Evaluates filter-only query trees to document sets.
pub struct FieldSearch<'a> {
    pub store: &'a CorpusStore,
    pub index: &'a TextIndex,
    pub meta: &'a MetadataIndex,
    pub now: NaiveDate,
}

impl<'a> FieldSearch<'a> {
    fn n(&self) -> usize {
        self.store.len()
    }

    fn scan(&self, pred: impl Fn(usize) -> bool) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n());
        for i in 0..self.n() {
            if pred(i) {
                set.insert(i);
            }
        }
        set
    }

    pub fn all(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n());
        set.insert_range(..);
        set
    }

    pub fn run(&self, node: &QueryAst) -> Result<FixedBitSet, SearchError> {
        Ok(match node {
            QueryAst::Term(t) => {
                let mut set = self.text(t, FieldMask::ALL);
                if let Some(i) = self.store.index_of(t) {
                    set.insert(i as usize);
                }
                set
            }
            QueryAst::Phrase(p) => self.text(p, FieldMask::ALL),
            QueryAst::Field { name, value, anchored } => self.field(*name, value, *anchored),
            QueryAst::YearRange(lo, hi) => {
                let docs = self.store.documents();
                self.scan(|i| (*lo..=*hi).contains(&docs[i].year))
            }
            QueryAst::DateRange(lo, hi) => {
                let lo = lo.resolve(self.now);
                let hi = hi.resolve(self.now);
                let docs = self.store.documents();
                self.scan(|i| {
                    docs[i]
                        .entry_date
                        .is_some_and(|d| lo.is_none_or(|lo| d >= lo) && hi.is_none_or(|hi| d <= hi))
                })
            }
            QueryAst::And(children) => {
                let mut acc = self.all();
                for c in children {
                    match c {
                        QueryAst::Not(inner) => acc.difference_with(&self.run(inner)?),
                        _ => acc.intersect_with(&self.run(c)?),
                    }
                }
                acc
            }
            QueryAst::Or(children) => {
                let mut acc = FixedBitSet::with_capacity(self.n());
                for c in children {
                    acc.union_with(&self.run(c)?);
                }
                acc
            }
            QueryAst::Not(inner) => {
                let mut acc = self.all();
                acc.difference_with(&self.run(inner)?);
                acc
            }
            QueryAst::OpCall { .. } | QueryAst::TopN { .. } | QueryAst::Docs(_) => return Err(SearchError::NotAFilter),
        })
    }

    fn text(&self, text: &str, fields: FieldMask) -> FixedBitSet {
        let terms = self.index.tokenizer().terms(text);
        self.index.phrase_docs(&terms, fields)
    }

    fn field(&self, name: FieldName, value: &str, anchored: bool) -> FixedBitSet {
        let meta = self.meta;
        match name {
            FieldName::Full => self.text(value, FieldMask::ALL),
            FieldName::Abs => self.text(value, FieldMask::only(Field::Abstract)),
            FieldName::Title => self.text(value, FieldMask::only(Field::Title)),
            FieldName::Keyword => self.text(value, FieldMask::only(Field::Keyword)),
            FieldName::Author => {
                let q = fold_author_query(value);
                self.scan(|i| {
                    let authors = &meta.authors[i];
                    if anchored {
                        authors.first().is_some_and(|a| a.starts_with(&q))
                    } else {
                        authors.iter().any(|a| a.starts_with(&q))
                    }
                })
            }
            FieldName::Inst => {
                let q = value.to_lowercase();
                self.scan(|i| {
                    let affs = &meta.affiliations[i];
                    if anchored {
                        affs.first().is_some_and(|a| a.contains(&q))
                    } else {
                        affs.iter().any(|a| a.contains(&q))
                    }
                })
            }
            FieldName::Bibcode => {
                let mut set = FixedBitSet::with_capacity(self.n());
                if let Some(i) = self.store.index_of(value) {
                    set.insert(i as usize);
                }
                set
            }
            FieldName::Bibstem => {
                let q = value.to_lowercase();
                self.scan(|i| meta.bibstem[i] == q)
            }
            FieldName::Property => {
                let q = value.to_lowercase();
                self.scan(|i| meta.properties[i].contains(&q))
            }
            FieldName::Collection => {
                let q = value.to_lowercase();
                let docs = self.store.documents();
                self.scan(|i| docs[i].collections.iter().any(|c| c.as_str() == q))
            }
            FieldName::Orcid => {
                let docs = self.store.documents();
                self.scan(|i| docs[i].orcids.iter().any(|o| o == value))
            }
        }
    }
}

/// Query text that contributes to relevance: bare terms, phrases and text
/// fields outside any negation.
pub fn positive_terms(node: &QueryAst, index: &TextIndex) -> Vec<String> {
    let mut out = Vec::new();
    collect_terms(node, index, &mut out);
    out
}

fn collect_terms(node: &QueryAst, index: &TextIndex, out: &mut Vec<String>) {
    match node {
        QueryAst::Term(t) | QueryAst::Phrase(t) => push_unique(out, index.tokenizer().terms(t)),
        QueryAst::Field { name, value, .. } if name.is_text() => push_unique(out, index.tokenizer().terms(value)),
        QueryAst::And(c) | QueryAst::Or(c) => c.iter().for_each(|c| collect_terms(c, index, out)),
        _ => {}
    }
}

fn push_unique(out: &mut Vec<String>, terms: Vec<String>) {
    for t in terms {
        if !out.contains(&t) {
            out.push(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, D1, D4, D5};
    use crate::query::parse;
    use crate::text::{Bm25Params, Tokenizer};

    struct Setup {
        store: CorpusStore,
        index: TextIndex,
        meta: MetadataIndex,
    }

    impl Setup {
        fn new(store: CorpusStore) -> Self {
            let index = TextIndex::build(&store, Tokenizer::default(), Bm25Params::default());
            let meta = MetadataIndex::build(&store);
            Setup { store, index, meta }
        }

        fn ids(&self, q: &str) -> Vec<&str> {
            let fs = FieldSearch {
                store: &self.store,
                index: &self.index,
                meta: &self.meta,
                now: fixtures::r3_now(),
            };
            let set = fs.run(&parse(q).unwrap()).unwrap();
            set.ones().map(|i| self.store.doc(i as u32).id.as_str()).collect()
        }
    }

    #[test]
    fn c5_examples() {
        let s = Setup::new(fixtures::c5_store());
        assert_eq!(s.ids("year:2015-2020"), [D4, D5]);
        assert_eq!(s.ids(r#"author:"^adams""#), [D1]);
        assert_eq!(s.ids(r#"year:2015-2020 -author:"evans, e""#), [D4]);
        assert_eq!(s.ids(r#"author:"evans,e" OR bibcode:2000A......1....1A"#), [D1, D5]);
        assert_eq!(s.ids("2015D......1....1D"), [D4]);
        assert_eq!(s.ids("-year:2001-2020"), [D1]);
    }

    fn rich_store() -> CorpusStore {
        let mut store = CorpusStore::new();
        let rows = [
            (
                "P1",
                "Globular clusters in M31",
                "We study the globular cluster system.",
                vec!["fortney, jonathan", "linsky, j"],
                vec!["Harvard University", "CU Boulder"],
                "ApJ",
                "2020-06-15",
            ),
            (
                "P2",
                "Ammonia in exoplanet atmospheres",
                "NH3 features; weak lensing is unrelated.",
                vec!["rimmer, paul b.", "fortney, j"],
                vec!["Cambridge", "Harvard University"],
                "arXiv",
                "2020-06-20",
            ),
            (
                "P3",
                "Cluster dynamics",
                "open cluster globular stars",
                vec!["smith, a"],
                vec!["MIT"],
                "MNRAS",
                "2019-01-01",
            ),
        ];
        for (id, title, abs, authors, affs, stem, entry) in rows {
            let mut d = crate::corpus::Document::new(id, 2020);
            d.title = title.into();
            d.abstract_text = abs.into();
            d.authors = authors.into_iter().map(String::from).collect();
            d.affiliations = affs.into_iter().map(String::from).collect();
            d.bibstem = stem.into();
            d.entry_date = crate::corpus::parse_date(entry);
            d.properties = vec!["refereed".into()];
            d.collections = vec![crate::corpus::Collection::Astronomy];
            d.keywords = vec!["stars: abundances".into()];
            d.orcids = vec!["0000-0002-8035-4778".into()];
            store.add_document(d).unwrap();
        }
        store
    }

    #[test]
    fn fielded_matches() {
        let s = Setup::new(rich_store());
        assert_eq!(s.ids(r#""globular cluster""#), ["P1"]);
        assert_eq!(s.ids("globular"), ["P1", "P3"]);
        assert_eq!(s.ids(r#"author:"fortney,j""#), ["P1", "P2"]);
        assert_eq!(s.ids(r#"author:"^fortney,j""#), ["P1"]);
        assert_eq!(s.ids(r#"inst:"harvard u""#), ["P1", "P2"]);
        assert_eq!(s.ids(r#"inst:"^harvard u""#), ["P1"]);
        assert_eq!(s.ids(r#"bibstem:"arXiv""#), ["P2"]);
        assert_eq!(s.ids("title:cluster"), ["P3"]);
        assert_eq!(s.ids("abs:cluster"), ["P1", "P3"]);
        assert_eq!(s.ids("keyword:abundances"), ["P1", "P2", "P3"]);
        assert_eq!(s.ids("full:NH3"), ["P2"]);
        assert_eq!(s.ids("property:refereed collection:astronomy"), ["P1", "P2", "P3"]);
        assert_eq!(s.ids("orcid:0000-0002-8035-4778 -P3"), ["P1", "P2"]);
        assert_eq!(s.ids("entdate:[NOW-7DAYS TO *]"), ["P1", "P2"]);
        assert_eq!(s.ids("-entdate:[NOW-3DAYS TO *]"), ["P1", "P3"]);
        assert_eq!(s.ids("entdate:[2019-01-01 TO 2019-12-31]"), ["P3"]);
        assert_eq!(s.ids("mass-radius"), Vec::<&str>::new());
    }

    #[test]
    fn author_query_folding() {
        assert_eq!(fold_author_query("donahue.m"), "donahue,m");
        assert_eq!(fold_author_query("Thorstensen, J.R."), "thorstensen,j.r.");
        assert!(fold_name("Donahue, M.").starts_with(&fold_author_query("donahue.m")));
    }

    #[test]
    fn rejects_operator_nodes() {
        let s = Setup::new(fixtures::c5_store());
        let fs = FieldSearch {
            store: &s.store,
            index: &s.index,
            meta: &s.meta,
            now: fixtures::r3_now(),
        };
        assert_eq!(
            fs.run(&parse("useful(year:2000)").unwrap()),
            Err(SearchError::NotAFilter)
        );
    }

    #[test]
    fn positive_terms_skip_negations() {
        let s = Setup::new(fixtures::t3_store());
        let q = parse(r#""weak lensing" -survey full:NH3 year:2020 author:x"#).unwrap();
        assert_eq!(positive_terms(&q, &s.index), ["weak", "lensing", "nh3"]);
    }
}
