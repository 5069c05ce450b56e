//! Citation graph over the known documents of a corpus.

use crate::corpus::CorpusStore;
use std::cmp::Ordering;
use std::collections::HashSet;

/// Forward (references) and inverse (citations) adjacency by document index.
/// References to ids outside the corpus are dropped here.
#[derive(Debug, Clone, Default)]
pub struct CitationGraph {
    forward: Vec<Vec<u32>>,
    forward_sorted: Vec<Vec<u32>>,
    inverse: Vec<Vec<u32>>,
    author_keys: Vec<String>,
    pub_keys: Vec<(i32, u32)>,
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

impl CitationGraph {
    pub fn build(store: &CorpusStore) -> Self {
        let n = store.len();
        let mut forward = Vec::with_capacity(n);
        let mut inverse = vec![Vec::new(); n];
        for (i, doc) in store.documents().iter().enumerate() {
            let refs: Vec<u32> = doc.references.iter().filter_map(|r| store.index_of(r)).collect();
            for &r in &refs {
                inverse[r as usize].push(i as u32);
            }
            forward.push(refs);
        }
        let forward_sorted = forward
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.sort_unstable();
                r
            })
            .collect();
        CitationGraph {
            forward,
            forward_sorted,
            inverse,
            author_keys: store
                .documents()
                .iter()
                .map(|d| d.first_author().unwrap_or("").to_lowercase())
                .collect(),
            pub_keys: store.documents().iter().map(|d| d.pub_key()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Known references of `doc`, in reference-list order.
    pub fn references(&self, doc: u32) -> &[u32] {
        &self.forward[doc as usize]
    }

    /// Documents citing `doc`, ascending by index.
    pub fn citers(&self, doc: u32) -> &[u32] {
        &self.inverse[doc as usize]
    }

    pub fn citation_count(&self, doc: u32) -> u32 {
        self.inverse[doc as usize].len() as u32
    }

    /// Case-folded first author, the sort key of `references_of`.
    pub fn author_key(&self, doc: u32) -> &str {
        &self.author_keys[doc as usize]
    }

    pub fn pub_key(&self, doc: u32) -> (i32, u32) {
        self.pub_keys[doc as usize]
    }

    pub fn coupling_strength(&self, a: u32, b: u32) -> usize {
        intersection_len(&self.forward_sorted[a as usize], &self.forward_sorted[b as usize])
    }

    pub fn cocitation_strength(&self, a: u32, b: u32) -> usize {
        intersection_len(&self.inverse[a as usize], &self.inverse[b as usize])
    }

    /// Union of the inputs' references, sorted by first author then id.
    pub fn references_of(&self, docs: &[u32], store: &CorpusStore) -> Vec<u32> {
        let mut out = self.union(docs.iter().flat_map(|&d| self.references(d)));
        out.sort_by(|&a, &b| {
            self.author_key(a)
                .cmp(self.author_key(b))
                .then_with(|| store.doc(a).id.cmp(&store.doc(b).id))
        });
        out
    }

    /// Union of the inputs' citers, newest publication date first, then id.
    pub fn citations_of(&self, docs: &[u32], store: &CorpusStore) -> Vec<u32> {
        let mut out = self.union(docs.iter().flat_map(|&d| self.citers(d)));
        out.sort_by(|&a, &b| {
            self.pub_key(b)
                .cmp(&self.pub_key(a))
                .then_with(|| store.doc(a).id.cmp(&store.doc(b).id))
        });
        out
    }

    fn union<'a>(&self, it: impl Iterator<Item = &'a u32>) -> Vec<u32> {
        let mut seen = HashSet::new();
        it.copied().filter(|d| seen.insert(*d)).collect()
    }
}

/// Maps ids to indices, skipping (and logging) ids unknown to the store.
pub fn resolve_ids<S: AsRef<str>>(store: &CorpusStore, ids: &[S]) -> Vec<u32> {
    ids.iter()
        .filter_map(|id| {
            let id = id.as_ref();
            let idx = store.index_of(id);
            if idx.is_none() {
                log::warn!("unknown document id skipped: {id}");
            }
            idx
        })
        .collect()
}
