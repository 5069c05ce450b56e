//! Small hand-checkable corpora shared by unit tests, integration tests and
//! the acceptance suite.
//!
//! * C5: five documents with a short citation chain.
//! * R3: read events over C5, pinned to [`r3_now`].
//! * T3: three abstract-only documents for BM25 checks.

use crate::corpus::{CorpusStore, Document, ReadEvent};
use chrono::NaiveDate;

pub const D1: &str = "2000A......1....1A";
pub const D2: &str = "2005B......1....1B";
pub const D3: &str = "2010C......1....1C";
pub const D4: &str = "2015D......1....1D";
pub const D5: &str = "2020E......1....1E";

pub fn c5_documents() -> Vec<Document> {
    let spec: [(&str, &str, i32, &[&str]); 5] = [
        (D1, "adams, a", 2000, &[]),
        (D2, "brown, b", 2005, &[D1]),
        (D3, "clark, c", 2010, &[D1, D2]),
        (D4, "davis, d", 2015, &[D1, D3]),
        (D5, "evans, e", 2020, &[D2, D3]),
    ];
    spec.iter()
        .map(|&(id, author, year, refs)| {
            let mut d = Document::new(id, year);
            d.authors = vec![author.to_string()];
            d.affiliations = vec![String::new()];
            d.pubdate = format!("{year}-01");
            d.references = refs.iter().map(|r| r.to_string()).collect();
            d
        })
        .collect()
}

pub fn c5_jsonl() -> String {
    lines(c5_documents().iter().map(Document::to_json_line))
}

pub fn c5_store() -> CorpusStore {
    let mut store = CorpusStore::new();
    store.ingest_documents(c5_jsonl().as_bytes()).expect("fixture ingests");
    store
}

pub fn r3_now() -> NaiveDate {
    date(2020, 6, 22)
}

pub fn r3_events() -> Vec<ReadEvent> {
    vec![
        ReadEvent::new("r1", D1, date(2020, 6, 1)),
        ReadEvent::new("r1", D2, date(2020, 6, 2)),
        ReadEvent::new("r2", D1, date(2020, 5, 15)),
        ReadEvent::new("r2", D3, date(2020, 6, 10)),
        ReadEvent::new("r3", D2, date(2020, 6, 5)),
        ReadEvent::new("r4", D1, date(2020, 1, 1)),
    ]
}

pub fn r3_jsonl() -> String {
    lines(r3_events().iter().map(ReadEvent::to_json_line))
}

/// C5 with R3 loaded.
pub fn c5_r3_store() -> CorpusStore {
    let mut store = c5_store();
    store
        .ingest_read_events(r3_jsonl().as_bytes())
        .expect("fixture ingests");
    store
}

pub fn t3_documents() -> Vec<Document> {
    [
        ("A", "weak lensing survey"),
        ("B", "weak decay"),
        ("C", "galaxy survey"),
    ]
    .iter()
    .map(|&(id, text)| {
        let mut d = Document::new(id, 2020);
        d.abstract_text = text.to_string();
        d
    })
    .collect()
}

pub fn t3_store() -> CorpusStore {
    let mut store = CorpusStore::new();
    for d in t3_documents() {
        store.add_document(d).expect("fixture is valid");
    }
    store
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid fixture date")
}

fn lines(it: impl Iterator<Item = String>) -> String {
    let mut out = String::new();
    for l in it {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
