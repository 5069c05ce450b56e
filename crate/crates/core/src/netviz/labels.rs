//! Cluster naming by over-represented tokens.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelStatistic {
    /// Dunning's log-likelihood ratio, G².
    #[default]
    LogLikelihood,
    /// Pearson's chi-squared on the same 2×2 table.
    ChiSquared,
}

fn xlogx_ratio(o: f64, e: f64) -> f64 {
    if o > 0.0 && e > 0.0 {
        o * (o / e).ln()
    } else {
        0.0
    }
}

/// Association of a token with the target given counts `a` (token in
/// target), `b` (other tokens in target), `c` (token in background) and
/// `d` (other tokens in background).
pub fn statistic(kind: LabelStatistic, a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    if n <= 0.0 {
        return 0.0;
    }
    let cells = [
        (a, (a + b) * (a + c) / n),
        (b, (a + b) * (b + d) / n),
        (c, (c + d) * (a + c) / n),
        (d, (c + d) * (b + d) / n),
    ];
    match kind {
        LabelStatistic::LogLikelihood => 2.0 * cells.iter().map(|&(o, e)| xlogx_ratio(o, e)).sum::<f64>(),
        LabelStatistic::ChiSquared => cells
            .iter()
            .filter(|&&(_, e)| e > 0.0)
            .map(|&(o, e)| (o - e).powi(2) / e)
            .sum(),
    }
}

pub type Counts = HashMap<String, u64>;

pub fn count_tokens<I: IntoIterator<Item = String>>(tokens: I, into: &mut Counts) {
    for t in tokens {
        *into.entry(t).or_insert(0) += 1;
    }
}

/// The `k` tokens most over-represented in `target` relative to
/// `background`, strongest first, ties by token. With an empty background
/// tokens rank by raw frequency.
pub fn top_tokens(target: &Counts, background: &Counts, kind: LabelStatistic, k: usize) -> Vec<String> {
    let t_total: u64 = target.values().sum();
    let b_total: u64 = background.values().sum();
    let mut scored: Vec<(f64, &str)> = target
        .iter()
        .filter_map(|(tok, &a)| {
            if b_total == 0 {
                return Some((a as f64, tok.as_str()));
            }
            let c = background.get(tok).copied().unwrap_or(0);
            // over-represented only: a / t_total > c / b_total
            if (a as u128) * (b_total as u128) <= (c as u128) * (t_total as u128) {
                return None;
            }
            let s = statistic(kind, a as f64, (t_total - a) as f64, c as f64, (b_total - c) as f64);
            Some((s, tok.as_str()))
        })
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(y.1)));
    scored.into_iter().take(k).map(|(_, t)| t.to_string()).collect()
}

/// Labels each community of `assignment` from per-node token counts.
/// A single community is compared against `corpus_background` instead of
/// the (empty) rest of the network.
pub fn label_communities(
    assignment: &[u32],
    node_counts: &[Counts],
    corpus_background: impl FnOnce() -> Counts,
    kind: LabelStatistic,
    k: usize,
) -> Vec<Vec<String>> {
    let n_comm = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut per: Vec<Counts> = vec![Counts::new(); n_comm];
    let mut all = Counts::new();
    for (node, &c) in assignment.iter().enumerate() {
        for (t, &n) in &node_counts[node] {
            *per[c as usize].entry(t.clone()).or_insert(0) += n;
            *all.entry(t.clone()).or_insert(0) += n;
        }
    }
    if n_comm == 1 {
        let mut bg = corpus_background();
        for (t, n) in &per[0] {
            if let Some(v) = bg.get_mut(t) {
                *v = v.saturating_sub(*n);
            }
        }
        bg.retain(|_, v| *v > 0);
        return vec![top_tokens(&per[0], &bg, kind, k)];
    }
    per.iter()
        .map(|target| {
            let mut rest = all.clone();
            for (t, n) in target {
                let v = rest.get_mut(t).expect("subset of all");
                *v -= n;
            }
            rest.retain(|_, v| *v > 0);
            top_tokens(target, &rest, kind, k)
        })
        .collect()
}
