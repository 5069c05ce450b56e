use super::tokenize::{Field, Tokenizer};
use crate::corpus::{CorpusStore, Document};
use fixedbitset::FixedBitSet;
use std::collections::HashMap;

const FIELD_SHIFT: u32 = 30;
const POS_MASK: u32 = (1 << FIELD_SHIFT) - 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    /// Multiplier applied to title term frequencies.
    pub title_weight: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params {
            k1: 1.2,
            b: 0.75,
            title_weight: 2.0,
        }
    }
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`
pub fn idf(n_docs: usize, df: usize) -> f64 {
    let n = n_docs as f64;
    let df = df as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// Set of fields a term or phrase may match in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldMask(u8);

impl FieldMask {
    pub const ALL: FieldMask = FieldMask(0b111);

    pub fn only(field: Field) -> Self {
        FieldMask(1 << field.slot())
    }

    pub fn contains(self, field: Field) -> bool {
        self.0 & (1 << field.slot()) != 0
    }

    fn contains_slot(self, slot: u32) -> bool {
        self.0 & (1 << slot) != 0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PostingEntry<'a> {
    pub doc: u32,
    /// Term frequency per field, indexed by [`Field::slot`].
    pub tf: [u32; 3],
    positions: &'a [u32],
}

impl<'a> PostingEntry<'a> {
    pub fn positions(&self) -> impl Iterator<Item = (Field, u32)> + 'a {
        self.positions
            .iter()
            .map(|&p| (Field::ALL[(p >> FIELD_SHIFT) as usize], p & POS_MASK))
    }
}

/// Postings for one term, sorted by document index.
#[derive(Debug, Clone, Default)]
pub struct PostingList {
    docs: Vec<u32>,
    tf: Vec<[u32; 3]>,
    offsets: Vec<u32>,
    positions: Vec<u32>,
}

impl PostingList {
    fn push(&mut self, doc: u32, tf: [u32; 3], positions: &[u32]) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        self.docs.push(doc);
        self.tf.push(tf);
        self.positions.extend_from_slice(positions);
        self.offsets.push(self.positions.len() as u32);
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn docs(&self) -> &[u32] {
        &self.docs
    }

    pub fn entry(&self, i: usize) -> PostingEntry<'_> {
        let (a, b) = (self.offsets[i] as usize, self.offsets[i + 1] as usize);
        PostingEntry {
            doc: self.docs[i],
            tf: self.tf[i],
            positions: &self.positions[a..b],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = PostingEntry<'_>> {
        (0..self.docs.len()).map(|i| self.entry(i))
    }

    pub fn find(&self, doc: u32) -> Option<PostingEntry<'_>> {
        self.docs.binary_search(&doc).ok().map(|i| self.entry(i))
    }

    fn raw_positions(&self, i: usize) -> &[u32] {
        &self.positions[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

/// Inverted index over title, abstract and keywords.
#[derive(Debug, Clone)]
pub struct TextIndex {
    tokenizer: Tokenizer,
    params: Bm25Params,
    terms: HashMap<String, PostingList>,
    doc_len: Vec<u32>,
    total_len: u64,
}

#[derive(Default)]
struct DocTerm {
    tf: [u32; 3],
    positions: Vec<u32>,
}

impl TextIndex {
    pub fn build(store: &CorpusStore, tokenizer: Tokenizer, params: Bm25Params) -> Self {
        let mut index = TextIndex {
            tokenizer,
            params,
            terms: HashMap::new(),
            doc_len: Vec::with_capacity(store.len()),
            total_len: 0,
        };
        let mut scratch: HashMap<String, DocTerm> = HashMap::new();
        let mut order: Vec<String> = Vec::new();
        for (i, doc) in store.documents().iter().enumerate() {
            let len = index.collect_doc(doc, &mut scratch, &mut order);
            for term in order.drain(..) {
                let dt = scratch.remove(&term).expect("term collected");
                index
                    .terms
                    .entry(term)
                    .or_default()
                    .push(i as u32, dt.tf, &dt.positions);
            }
            index.doc_len.push(len);
            index.total_len += len as u64;
        }
        index
    }

    fn collect_doc(&self, doc: &Document, scratch: &mut HashMap<String, DocTerm>, order: &mut Vec<String>) -> u32 {
        let mut len = 0u32;
        let mut add = |field: Field, pos: u32, term: String| {
            let entry = scratch.entry(term).or_insert_with_key(|k| {
                order.push(k.clone());
                DocTerm::default()
            });
            entry.tf[field.slot()] += 1;
            entry
                .positions
                .push(((field.slot() as u32) << FIELD_SHIFT) | (pos & POS_MASK));
            len += 1;
        };
        for (pos, term) in self.tokenizer.terms(&doc.title).into_iter().enumerate() {
            add(Field::Title, pos as u32, term);
        }
        for (pos, term) in self.tokenizer.terms(&doc.abstract_text).into_iter().enumerate() {
            add(Field::Abstract, pos as u32, term);
        }
        // Keywords share one field; a gap keeps phrases from spanning two keywords.
        let mut pos = 0u32;
        for kw in &doc.keywords {
            for term in self.tokenizer.terms(kw) {
                add(Field::Keyword, pos, term);
                pos += 1;
            }
            pos += 1;
        }
        len
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn n_docs(&self) -> usize {
        self.doc_len.len()
    }

    pub fn df(&self, term: &str) -> usize {
        self.terms.get(term).map_or(0, PostingList::len)
    }

    pub fn idf(&self, term: &str) -> f64 {
        idf(self.n_docs(), self.df(term))
    }

    pub fn postings(&self, term: &str) -> Option<&PostingList> {
        self.terms.get(term)
    }

    pub fn doc_len(&self, doc: u32) -> u32 {
        self.doc_len[doc as usize]
    }

    pub fn avg_len(&self) -> f64 {
        if self.doc_len.is_empty() {
            0.0
        } else {
            self.total_len as f64 / self.doc_len.len() as f64
        }
    }

    fn term_weight(&self, idf: f64, tf: [u32; 3], len: u32, avg: f64) -> f64 {
        let Bm25Params { k1, b, title_weight } = self.params;
        let tf = title_weight * tf[0] as f64 + tf[1] as f64 + tf[2] as f64;
        if tf <= 0.0 {
            return 0.0;
        }
        let norm = if avg > 0.0 { len as f64 / avg } else { 0.0 };
        idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * norm))
    }

    /// Okapi BM25 of one document against `terms` (duplicates count once).
    /// `None` when `doc` is not indexed.
    pub fn bm25(&self, terms: &[String], doc: u32) -> Option<f64> {
        if doc as usize >= self.n_docs() {
            return None;
        }
        let avg = self.avg_len();
        let len = self.doc_len(doc);
        let mut seen = Vec::with_capacity(terms.len());
        let mut score = 0.0;
        for term in terms {
            if seen.contains(&term) {
                continue;
            }
            seen.push(term);
            let Some(list) = self.terms.get(term) else { continue };
            if let Some(e) = list.find(doc) {
                score += self.term_weight(idf(self.n_docs(), list.len()), e.tf, len, avg);
            }
        }
        Some(score)
    }

    /// BM25 for every document matching at least one term, restricted to
    /// `filter` when given. Returned in document order, scores > 0.
    pub fn bm25_all(&self, terms: &[String], filter: Option<&FixedBitSet>) -> Vec<(u32, f64)> {
        let n = self.n_docs();
        if n == 0 {
            return Vec::new();
        }
        let avg = self.avg_len();
        let mut dense = vec![0.0f64; n];
        let mut touched = FixedBitSet::with_capacity(n);
        let mut seen: Vec<&String> = Vec::with_capacity(terms.len());
        for term in terms {
            if seen.contains(&term) {
                continue;
            }
            seen.push(term);
            let Some(list) = self.terms.get(term) else { continue };
            let w = idf(n, list.len());
            for (i, &doc) in list.docs.iter().enumerate() {
                if filter.is_some_and(|f| !f.contains(doc as usize)) {
                    continue;
                }
                dense[doc as usize] += self.term_weight(w, list.tf[i], self.doc_len[doc as usize], avg);
                touched.insert(doc as usize);
            }
        }
        touched
            .ones()
            .filter(|&d| dense[d] > 0.0)
            .map(|d| (d as u32, dense[d]))
            .collect()
    }

    /// Documents containing `term` in any field of `fields`.
    pub fn term_docs(&self, term: &str, fields: FieldMask) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n_docs());
        if let Some(list) = self.terms.get(term) {
            for (i, &doc) in list.docs.iter().enumerate() {
                let tf = list.tf[i];
                if Field::ALL.iter().any(|&f| fields.contains(f) && tf[f.slot()] > 0) {
                    set.insert(doc as usize);
                }
            }
        }
        set
    }

    /// Documents containing `terms` at consecutive positions of one field.
    pub fn phrase_docs(&self, terms: &[String], fields: FieldMask) -> FixedBitSet {
        match terms {
            [] => FixedBitSet::with_capacity(self.n_docs()),
            [one] => self.term_docs(one, fields),
            _ => {
                let mut set = FixedBitSet::with_capacity(self.n_docs());
                let Some(lists) = terms.iter().map(|t| self.terms.get(t)).collect::<Option<Vec<_>>>() else {
                    return set;
                };
                let (rarest, _) = lists.iter().enumerate().min_by_key(|(_, l)| l.len()).expect("nonempty");
                'docs: for &doc in lists[rarest].docs() {
                    let mut idx = Vec::with_capacity(lists.len());
                    for l in &lists {
                        match l.docs.binary_search(&doc) {
                            Ok(i) => idx.push(i),
                            Err(_) => continue 'docs,
                        }
                    }
                    let first = lists[0].raw_positions(idx[0]);
                    let hit = first.iter().any(|&p| {
                        fields.contains_slot(p >> FIELD_SHIFT)
                            && (1..lists.len()).all(|k| {
                                let want = p + k as u32;
                                (want & POS_MASK) >= (p & POS_MASK)
                                    && lists[k].raw_positions(idx[k]).binary_search(&want).is_ok()
                            })
                    });
                    if hit {
                        set.insert(doc as usize);
                    }
                }
                set
            }
        }
    }
}
