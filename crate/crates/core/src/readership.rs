//! Active-reader filtering and co-read collation.

use crate::corpus::CorpusStore;
use chrono::{Days, NaiveDate};
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReaderFilterConfig {
    pub window_days: u32,
    pub min_docs: usize,
    pub max_docs: usize,
}

impl Default for ReaderFilterConfig {
    fn default() -> Self {
        ReaderFilterConfig {
            window_days: 90,
            min_docs: 5,
            max_docs: 500,
        }
    }
}

impl ReaderFilterConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.window_days < 1 {
            return Err("trending.window_days must be at least 1".into());
        }
        if self.min_docs < 1 || self.min_docs > self.max_docs {
            return Err("trending.min_docs must be in 1..=trending.max_docs".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReaderProfile {
    pub reader_id: String,
    /// Distinct documents read inside the window, ascending by index.
    pub docs: Vec<u32>,
    pub n_events: usize,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    date: NaiveDate,
    reader: u32,
    doc: u32,
}

/// Read events on known documents, sorted by date for window slicing.
#[derive(Debug, Clone, Default)]
pub struct ReadLog {
    readers: Vec<String>,
    events: Vec<Event>,
    n_docs: usize,
}

impl ReadLog {
    pub fn build(store: &CorpusStore) -> Self {
        let mut reader_ix: HashMap<&str, u32> = HashMap::new();
        let mut readers = Vec::new();
        let mut events = Vec::new();
        for ev in store.events() {
            let Some(doc) = store.index_of(&ev.doc_id) else {
                continue;
            };
            let reader = *reader_ix.entry(ev.reader_id.as_str()).or_insert_with(|| {
                readers.push(ev.reader_id.clone());
                (readers.len() - 1) as u32
            });
            events.push(Event {
                date: ev.date,
                reader,
                doc,
            });
        }
        events.sort_by_key(|e| (e.date, e.reader, e.doc));
        ReadLog {
            readers,
            events,
            n_docs: store.len(),
        }
    }

    pub fn n_events(&self) -> usize {
        self.events.len()
    }

    /// Events with `now - window_days < date <= now`.
    fn window(&self, now: NaiveDate, window_days: u32) -> &[Event] {
        let lo = now.checked_sub_days(Days::new(window_days as u64));
        let start = match lo {
            Some(lo) => self.events.partition_point(|e| e.date <= lo),
            None => 0,
        };
        let end = self.events.partition_point(|e| e.date <= now);
        &self.events[start..end.max(start)]
    }

    /// Per-document count of read events inside the window.
    pub fn read_counts(&self, now: NaiveDate, window_days: u32) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_docs];
        for e in self.window(now, window_days) {
            counts[e.doc as usize] += 1;
        }
        counts
    }

    pub fn active_readers(&self, now: NaiveDate, cfg: &ReaderFilterConfig) -> Vec<ReaderProfile> {
        let mut per_reader: HashMap<u32, (BTreeSet<u32>, usize)> = HashMap::new();
        for e in self.window(now, cfg.window_days) {
            let p = per_reader.entry(e.reader).or_default();
            p.0.insert(e.doc);
            p.1 += 1;
        }
        let mut out: Vec<ReaderProfile> = per_reader
            .into_iter()
            .filter(|(_, (docs, _))| (cfg.min_docs..=cfg.max_docs).contains(&docs.len()))
            .map(|(r, (docs, n_events))| ReaderProfile {
                reader_id: self.readers[r as usize].clone(),
                docs: docs.into_iter().collect(),
                n_events,
            })
            .collect();
        out.sort_by(|a, b| a.reader_id.cmp(&b.reader_id));
        out
    }

    /// For each document, the number of active readers who read it and at
    /// least one of `docs`.
    pub fn co_read_counts(&self, docs: &[u32], now: NaiveDate, cfg: &ReaderFilterConfig) -> HashMap<u32, u32> {
        let input: std::collections::HashSet<u32> = docs.iter().copied().collect();
        let mut counts = HashMap::new();
        if input.is_empty() {
            return counts;
        }
        for profile in self.active_readers(now, cfg) {
            if profile.docs.iter().any(|d| input.contains(d)) {
                for d in profile.docs {
                    *counts.entry(d).or_insert(0) += 1;
                }
            }
        }
        counts
    }
}
