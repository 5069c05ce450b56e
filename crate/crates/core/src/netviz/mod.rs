//! Paper and author networks: construction, clustering, labels, export.

mod export;
mod labels;
mod louvain;

pub use export::{export, from_json, ExportError, Format};
pub use labels::{count_tokens, label_communities, statistic, top_tokens, Counts, LabelStatistic};
pub use louvain::{louvain, modularity, Partition, WeightedGraph};

use crate::corpus::CorpusStore;
use crate::graph::CitationGraph;
use crate::soo::RankedList;
use crate::text::Tokenizer;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetvizParams {
    pub max_nodes: usize,
    /// Smallest edge weight kept.
    pub min_weight: u32,
    pub label_words: usize,
    pub label_statistic: LabelStatistic,
}

impl Default for NetvizParams {
    fn default() -> Self {
        NetvizParams {
            max_nodes: 100,
            min_weight: 1,
            label_words: 5,
            label_statistic: LabelStatistic::LogLikelihood,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub w: u32,
}

/// A clustered network. Edges have `a < b` by node index and are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    /// Community of each node.
    pub communities: Vec<u32>,
    pub modularity: f64,
    /// Label words of each community.
    pub labels: Vec<Vec<String>>,
}

impl Network {
    /// An unclustered network: every node in its own community, no labels.
    pub fn unclustered(nodes: Vec<String>, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.a, e.b));
        let n = nodes.len();
        let mut net = Network {
            nodes,
            edges,
            communities: (0..n as u32).collect(),
            modularity: 0.0,
            labels: vec![Vec::new(); n],
        };
        net.modularity = modularity(&net.weighted_graph(), &net.communities, 1.0);
        net
    }

    pub fn weighted_graph(&self) -> WeightedGraph {
        let e: Vec<_> = self.edges.iter().map(|e| (e.a, e.b, e.w as f64)).collect();
        WeightedGraph::from_edges(self.nodes.len(), &e)
    }

    pub fn n_communities(&self) -> usize {
        self.communities.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Runs Louvain and stores the partition; labels are reset.
    pub fn cluster(&mut self, seed: u64) {
        let p = louvain(&self.weighted_graph(), seed, 1.0);
        self.modularity = p.modularity;
        self.labels = vec![Vec::new(); p.n_communities()];
        self.communities = p.assignment;
    }

    /// Labels communities from per-node token counts.
    pub fn label(&mut self, node_counts: &[Counts], background: impl FnOnce() -> Counts, params: &NetvizParams) {
        self.labels = label_communities(
            &self.communities,
            node_counts,
            background,
            params.label_statistic,
            params.label_words,
        );
    }
}

/// Coupling network over the first `max_nodes` entries; isolated nodes kept.
pub fn build_paper_network(
    list: &RankedList,
    store: &CorpusStore,
    graph: &CitationGraph,
    params: &NetvizParams,
) -> Network {
    let docs: Vec<u32> = list.entries.iter().take(params.max_nodes).map(|e| e.doc).collect();
    let mut edges = Vec::new();
    for i in 0..docs.len() {
        for j in i + 1..docs.len() {
            let w = graph.coupling_strength(docs[i], docs[j]) as u32;
            if w >= params.min_weight {
                edges.push(Edge {
                    a: i as u32,
                    b: j as u32,
                    w,
                });
            }
        }
    }
    let nodes = docs.iter().map(|&d| store.doc(d).id.clone()).collect();
    Network::unclustered(nodes, edges)
}

/// Co-authorship network over the authors of the first `max_nodes` entries;
/// an edge's weight is the number of listed documents both authors share.
pub fn build_author_network(list: &RankedList, store: &CorpusStore, params: &NetvizParams) -> Network {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut nodes: Vec<String> = Vec::new();
    let mut pairs: HashMap<(u32, u32), u32> = HashMap::new();
    for e in list.entries.iter().take(params.max_nodes) {
        let mut ids: Vec<u32> = store
            .doc(e.doc)
            .authors
            .iter()
            .map(|a| {
                *index.entry(a.as_str()).or_insert_with(|| {
                    nodes.push(a.clone());
                    (nodes.len() - 1) as u32
                })
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                *pairs.entry((ids[i], ids[j])).or_insert(0) += 1;
            }
        }
    }
    let edges = pairs
        .into_iter()
        .filter(|&(_, w)| w >= params.min_weight)
        .map(|((a, b), w)| Edge { a, b, w })
        .collect();
    Network::unclustered(nodes, edges)
}

pub fn doc_token_counts(store: &CorpusStore, tokenizer: &Tokenizer, doc: u32) -> Counts {
    let d = store.doc(doc);
    let mut c = Counts::new();
    count_tokens(tokenizer.terms(&d.title), &mut c);
    count_tokens(tokenizer.terms(&d.abstract_text), &mut c);
    c
}

/// Title and abstract token counts over the whole corpus.
pub fn corpus_token_counts(store: &CorpusStore, tokenizer: &Tokenizer) -> Counts {
    let mut c = Counts::new();
    for d in 0..store.len() as u32 {
        for (t, n) in doc_token_counts(store, tokenizer, d) {
            *c.entry(t).or_insert(0) += n;
        }
    }
    c
}

/// Build, cluster and label a paper network.
pub fn paper_network(
    list: &RankedList,
    store: &CorpusStore,
    graph: &CitationGraph,
    tokenizer: &Tokenizer,
    params: &NetvizParams,
    seed: u64,
) -> Network {
    let mut net = build_paper_network(list, store, graph, params);
    net.cluster(seed);
    let counts: Vec<Counts> = list
        .entries
        .iter()
        .take(net.nodes.len())
        .map(|e| doc_token_counts(store, tokenizer, e.doc))
        .collect();
    net.label(&counts, || corpus_token_counts(store, tokenizer), params);
    net
}

/// Build, cluster and label an author network; an author's tokens come from
/// the listed documents they appear on.
pub fn author_network(
    list: &RankedList,
    store: &CorpusStore,
    tokenizer: &Tokenizer,
    params: &NetvizParams,
    seed: u64,
) -> Network {
    let mut net = build_author_network(list, store, params);
    net.cluster(seed);
    let index: HashMap<&str, usize> = net.nodes.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let mut counts = vec![Counts::new(); net.nodes.len()];
    for e in list.entries.iter().take(params.max_nodes) {
        let doc = doc_token_counts(store, tokenizer, e.doc);
        for a in &store.doc(e.doc).authors {
            for (t, n) in &doc {
                *counts[index[a.as_str()]].entry(t.clone()).or_insert(0) += n;
            }
        }
    }
    net.label(&counts, || corpus_token_counts(store, tokenizer), params);
    net
}
