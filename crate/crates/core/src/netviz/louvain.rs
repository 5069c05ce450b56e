//! Louvain modularity maximization: local moving plus aggregation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

const MIN_GAIN: f64 = 1e-9;

/// Undirected weighted graph. Self-loop weights are stored as the matrix
/// diagonal `A[i][i]`, which aggregation uses for intra-community weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<Vec<(u32, f64)>>,
    self_loops: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Community of each node, dense ids numbered by first appearance.
    pub assignment: Vec<u32>,
    pub modularity: f64,
}

impl Partition {
    pub fn n_communities(&self) -> usize {
        self.assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }
}

impl WeightedGraph {
    /// Builds from undirected edges; parallel edges add up, `a == b` edges
    /// become self-loops.
    pub fn from_edges(n: usize, edges: &[(u32, u32, f64)]) -> Self {
        let mut maps: Vec<HashMap<u32, f64>> = vec![HashMap::new(); n];
        let mut self_loops = vec![0.0; n];
        for &(a, b, w) in edges {
            if a == b {
                self_loops[a as usize] += 2.0 * w;
            } else {
                *maps[a as usize].entry(b).or_insert(0.0) += w;
                *maps[b as usize].entry(a).or_insert(0.0) += w;
            }
        }
        let adj = maps
            .into_iter()
            .map(|m| {
                let mut v: Vec<(u32, f64)> = m.into_iter().collect();
                v.sort_by_key(|&(j, _)| j);
                v
            })
            .collect();
        WeightedGraph { adj, self_loops }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    fn degree(&self, i: usize) -> f64 {
        self.self_loops[i] + self.adj[i].iter().map(|&(_, w)| w).sum::<f64>()
    }

    /// `2m`, the sum of all degrees.
    fn two_m(&self) -> f64 {
        (0..self.len()).map(|i| self.degree(i)).sum()
    }
}

/// Newman modularity with resolution `gamma`; 0 for a graph without edges.
pub fn modularity(g: &WeightedGraph, assignment: &[u32], gamma: f64) -> f64 {
    let two_m = g.two_m();
    if two_m <= 0.0 {
        return 0.0;
    }
    let k = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for i in 0..g.len() {
        let ci = assignment[i] as usize;
        total[ci] += g.degree(i);
        internal[ci] += g.self_loops[i];
        for &(j, w) in &g.adj[i] {
            if assignment[j as usize] as usize == ci {
                internal[ci] += w;
            }
        }
    }
    (0..k)
        .map(|c| internal[c] / two_m - gamma * (total[c] / two_m).powi(2))
        .sum()
}

fn renumber(assignment: &mut [u32]) {
    let mut map = HashMap::new();
    for c in assignment.iter_mut() {
        let next = map.len() as u32;
        *c = *map.entry(*c).or_insert(next);
    }
}

/// Local moving from the assignment in `comm` (ids `< n`); a node may also
/// leave for an empty community. Returns whether any node moved.
fn local_moving(g: &WeightedGraph, comm: &mut [u32], gamma: f64, greedy: bool, rng: &mut ChaCha8Rng) -> bool {
    let n = g.len();
    let two_m = g.two_m();
    if two_m <= 0.0 {
        return false;
    }
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let mut tot = vec![0.0; n];
    let mut size = vec![0usize; n];
    for i in 0..n {
        tot[comm[i] as usize] += degree[i];
        size[comm[i] as usize] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut moved_any = false;
    let mut links: HashMap<u32, f64> = HashMap::new();
    for _ in 0..1000 {
        order.shuffle(rng);
        let mut moved = false;
        for &i in &order {
            let ci = comm[i];
            links.clear();
            for &(j, w) in &g.adj[i] {
                *links.entry(comm[j as usize]).or_insert(0.0) += w;
            }
            tot[ci as usize] -= degree[i];
            size[ci as usize] -= 1;
            let gain = |c: u32, links: &HashMap<u32, f64>| {
                links.get(&c).copied().unwrap_or(0.0) - gamma * tot[c as usize] * degree[i] / two_m
            };
            let stay = gain(ci, &links);
            let mut best = (stay, ci);
            let mut candidates: Vec<u32> = links.keys().copied().collect();
            candidates.sort_unstable();
            if greedy {
                for c in candidates {
                    let g = gain(c, &links);
                    if g > best.0 + MIN_GAIN {
                        best = (g, c);
                    }
                }
            } else {
                // any improving move, chosen uniformly
                candidates.retain(|&c| gain(c, &links) > stay + MIN_GAIN);
                if !candidates.is_empty() {
                    let c = candidates[rng.random_range(0..candidates.len())];
                    best = (gain(c, &links), c);
                }
            }
            if size[ci as usize] > 0 && best.0 < -MIN_GAIN {
                let empty = size
                    .iter()
                    .position(|&s| s == 0)
                    .expect("n nodes, at most n-1 communities") as u32;
                best = (0.0, empty);
            }
            tot[best.1 as usize] += degree[i];
            size[best.1 as usize] += 1;
            if best.1 != ci {
                comm[i] = best.1;
                moved = true;
                moved_any = true;
            }
        }
        if !moved {
            break;
        }
    }
    moved_any
}

fn aggregate(g: &WeightedGraph, comm: &[u32]) -> WeightedGraph {
    let k = comm.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut edges = Vec::new();
    let mut loops = vec![0.0; k];
    for i in 0..g.len() {
        let ci = comm[i];
        loops[ci as usize] += g.self_loops[i];
        for &(j, w) in &g.adj[i] {
            let cj = comm[j as usize];
            if ci == cj {
                loops[ci as usize] += w;
            } else if (i as u32) < j {
                edges.push((ci, cj, w));
            }
        }
    }
    let mut agg = WeightedGraph::from_edges(k, &edges);
    agg.self_loops = loops;
    agg
}

/// Independent runs per call; the best partition wins.
const RESTARTS: usize = 16;

/// Deterministic for a given `seed`: node visiting order is shuffled by a
/// seeded generator. The first run moves each node to its best community;
/// greedy moves can lock small graphs into poor partitions, so further runs
/// pick uniformly among improving moves. The highest modularity (earliest
/// on ties) is kept.
pub fn louvain(g: &WeightedGraph, seed: u64, gamma: f64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = louvain_run(g, gamma, true, &mut rng);
    for _ in 1..RESTARTS {
        let p = louvain_run(g, gamma, false, &mut rng);
        if p.modularity > best.modularity + MIN_GAIN {
            best = p;
        }
    }
    best
}

fn louvain_run(g: &WeightedGraph, gamma: f64, greedy: bool, rng: &mut ChaCha8Rng) -> Partition {
    let mut assignment: Vec<u32> = (0..g.len() as u32).collect();
    let mut best_q = modularity(g, &assignment, gamma);
    loop {
        let level = aggregate(g, &assignment);
        let mut comm: Vec<u32> = (0..level.len() as u32).collect();
        local_moving(&level, &mut comm, gamma, greedy, rng);
        let mut candidate: Vec<u32> = assignment.iter().map(|&c| comm[c as usize]).collect();
        // node-level refinement of the coarse moves
        local_moving(g, &mut candidate, gamma, greedy, rng);
        renumber(&mut candidate);
        let q = modularity(g, &candidate, gamma);
        if q - best_q <= MIN_GAIN {
            break;
        }
        best_q = q;
        assignment = candidate;
    }
    renumber(&mut assignment);
    let modularity = modularity(g, &assignment, gamma);
    Partition { assignment, modularity }
}
