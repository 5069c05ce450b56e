//! Composite pseudo-relevance score.
//!
//! | situation                          | total                                   |
//! |------------------------------------|-----------------------------------------|
//! | plain search with query text       | `bm * (1 + a*ln(1+cites) + b*ln(1+reads))` |
//! | operator output filtered by terms  | `w*freq_norm + (1-w)*bm`                |
//! | document list without query text   | `ln(1+cites) + ln(1+reads)`             |
//! | pure operator output               | collation frequency                     |
//!
//! `bm` is BM25 divided by its maximum over the candidate set, `reads`
//! counts read events inside the recency window.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParams {
    pub cite_alpha: f64,
    pub read_beta: f64,
    /// Weight of the operator frequency when blending with text relevance.
    pub blend: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            cite_alpha: 0.1,
            read_beta: 0.1,
            blend: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreComponents {
    pub bm25: f64,
    pub freq: f64,
    pub cite_boost: f64,
    pub read_boost: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub total: f64,
    pub components: ScoreComponents,
}

fn log1p_count(n: u32) -> f64 {
    (n as f64).ln_1p()
}

impl ScoreParams {
    /// Plain search; `bm` already normalized to `[0, 1]`.
    pub fn search(&self, bm: f64, citations: u32, reads: u32) -> Score {
        let cite_boost = self.cite_alpha * log1p_count(citations);
        let read_boost = self.read_beta * log1p_count(reads);
        Score {
            total: bm * (1.0 + cite_boost + read_boost),
            components: ScoreComponents {
                bm25: bm,
                freq: 0.0,
                cite_boost,
                read_boost,
            },
        }
    }

    /// Operator output re-ranked by additional query text.
    pub fn blended(&self, freq_norm: f64, bm: f64) -> Score {
        Score {
            total: self.blend * freq_norm + (1.0 - self.blend) * bm,
            components: ScoreComponents {
                bm25: bm,
                freq: freq_norm,
                ..ScoreComponents::default()
            },
        }
    }
}

/// Document list with no query text.
pub fn queryless(citations: u32, reads: u32) -> Score {
    let cite_boost = log1p_count(citations);
    let read_boost = log1p_count(reads);
    Score {
        total: cite_boost + read_boost,
        components: ScoreComponents {
            cite_boost,
            read_boost,
            ..ScoreComponents::default()
        },
    }
}

/// Pure operator output: the score is the collation frequency itself.
pub fn collation(freq: f64) -> Score {
    Score {
        total: freq,
        components: ScoreComponents {
            freq,
            ..ScoreComponents::default()
        },
    }
}

/// Divides by the maximum; an all-zero input stays zero.
pub fn normalize_by_max(values: &mut [f64]) {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    if max > 0.0 {
        values.iter_mut().for_each(|v| *v /= max);
    }
}
