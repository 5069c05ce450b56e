use super::{parse_document_line, parse_read_event_line, Document, ReadEvent, RecordError};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const DOCS_FILE: &str = "docs.jsonl";
pub const READS_FILE: &str = "reads.jsonl";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_docs: usize,
    pub n_reference_edges: usize,
    pub n_dangling_refs: usize,
    pub n_read_events: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    pub line: usize,
    pub message: String,
}

/// Outcome of one ingestion call. `stats` describe the whole store afterwards.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestReport {
    pub stats: CorpusStats,
    pub accepted: usize,
    pub skipped: usize,
    pub duplicates: usize,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("document not found: {0}")]
    NotFound(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("read error: {0}")]
    Stream(#[from] io::Error),
    #[error("{path}:{line}: corrupt store record: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        #[source]
        source: RecordError,
    },
}

/// In-memory working set of documents and read events, optionally backed by
/// a data directory.
#[derive(Debug, Default, Clone)]
pub struct CorpusStore {
    docs: Vec<Document>,
    by_id: HashMap<String, u32>,
    events: Vec<ReadEvent>,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads `docs.jsonl` and `reads.jsonl` from `dir`; absent files mean an
    /// empty store.
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        let mut store = CorpusStore::new();
        let docs_path = dir.join(DOCS_FILE);
        if docs_path.exists() {
            for (line, text) in read_lines(&docs_path)? {
                let doc = parse_document_line(&text).map_err(|source| StoreError::Corrupt {
                    path: docs_path.clone(),
                    line,
                    source,
                })?;
                store.insert(doc);
            }
        }
        let reads_path = dir.join(READS_FILE);
        if reads_path.exists() {
            for (line, text) in read_lines(&reads_path)? {
                let ev = parse_read_event_line(&text).map_err(|source| StoreError::Corrupt {
                    path: reads_path.clone(),
                    line,
                    source,
                })?;
                store.events.push(ev);
            }
        }
        Ok(store)
    }

    /// Writes the working set to `dir`, replacing the previous contents.
    pub fn save(&self, dir: &Path) -> Result<(), StoreError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| StoreError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let docs_path = dir.join(DOCS_FILE);
        write_lines(&docs_path, self.docs.iter().map(Document::to_json_line)).map_err(io_err(&docs_path))?;
        let reads_path = dir.join(READS_FILE);
        write_lines(&reads_path, self.events.iter().map(ReadEvent::to_json_line)).map_err(io_err(&reads_path))?;
        Ok(())
    }

    fn insert(&mut self, doc: Document) -> bool {
        match self.by_id.get(&doc.id) {
            Some(&idx) => {
                self.docs[idx as usize] = doc;
                true
            }
            None => {
                self.by_id.insert(doc.id.clone(), self.docs.len() as u32);
                self.docs.push(doc);
                false
            }
        }
    }

    /// Ingests line-delimited document records. Malformed lines are skipped
    /// with a warning; an id seen before replaces the earlier record.
    pub fn ingest_documents<R: BufRead>(&mut self, reader: R) -> Result<IngestReport, StoreError> {
        let mut report = IngestReport::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match parse_document_line(&line) {
                Ok(doc) => {
                    report.accepted += 1;
                    if self.insert(doc) {
                        report.duplicates += 1;
                    }
                }
                Err(e) => {
                    log::warn!("document line {}: {e}", i + 1);
                    report.skipped += 1;
                    report.warnings.push(IngestWarning {
                        line: i + 1,
                        message: e.to_string(),
                    });
                }
            }
        }
        report.stats = self.stats();
        Ok(report)
    }

    /// Appends read events. Events for unknown documents are kept.
    pub fn ingest_read_events<R: BufRead>(&mut self, reader: R) -> Result<IngestReport, StoreError> {
        let mut report = IngestReport::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match parse_read_event_line(&line) {
                Ok(ev) => {
                    report.accepted += 1;
                    self.events.push(ev);
                }
                Err(e) => {
                    log::warn!("read event line {}: {e}", i + 1);
                    report.skipped += 1;
                    report.warnings.push(IngestWarning {
                        line: i + 1,
                        message: e.to_string(),
                    });
                }
            }
        }
        report.stats = self.stats();
        Ok(report)
    }

    pub fn add_document(&mut self, mut doc: Document) -> Result<(), RecordError> {
        doc.validate()?;
        doc.normalize();
        self.insert(doc);
        Ok(())
    }

    pub fn add_read_event(&mut self, ev: ReadEvent) {
        self.events.push(ev);
    }

    pub fn get_document(&self, id: &str) -> Result<&Document, StoreError> {
        self.index_of(id)
            .map(|i| &self.docs[i as usize])
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.by_id.get(id).copied()
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn doc(&self, idx: u32) -> &Document {
        &self.docs[idx as usize]
    }

    pub fn events(&self) -> &[ReadEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn stats(&self) -> CorpusStats {
        let mut stats = CorpusStats {
            n_docs: self.docs.len(),
            n_read_events: self.events.len(),
            ..CorpusStats::default()
        };
        for r in self.docs.iter().flat_map(|d| &d.references) {
            if self.by_id.contains_key(r) {
                stats.n_reference_edges += 1;
            } else {
                stats.n_dangling_refs += 1;
            }
        }
        stats
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, StoreError> {
    let file = File::open(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        for line in lines {
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn c5_stats() {
        let mut store = CorpusStore::new();
        let report = store.ingest_documents(fixtures::c5_jsonl().as_bytes()).unwrap();
        assert_eq!(
            report.stats,
            CorpusStats {
                n_docs: 5,
                n_reference_edges: 7,
                n_dangling_refs: 0,
                n_read_events: 0
            }
        );
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn empty_stream() {
        let mut store = CorpusStore::new();
        let report = store.ingest_documents(&b""[..]).unwrap();
        assert_eq!(report.stats, CorpusStats::default());
        let report = store.ingest_read_events(&b""[..]).unwrap();
        assert_eq!(report.stats.n_read_events, 0);
    }

    #[test]
    fn dangling_reference_counted() {
        let mut store = CorpusStore::new();
        let mut input = fixtures::c5_jsonl();
        input.push_str(r#"{"id":"X6","year":2021,"references":["2000A......1....1A","1999X"]}"#);
        input.push('\n');
        let report = store.ingest_documents(input.as_bytes()).unwrap();
        assert_eq!(report.stats.n_docs, 6);
        assert_eq!(report.stats.n_reference_edges, 8);
        assert_eq!(report.stats.n_dangling_refs, 1);
    }

    #[test]
    fn malformed_lines_are_skipped_with_line_numbers() {
        let mut store = CorpusStore::new();
        let input = "{\"id\":\"A\",\"year\":2000}\n{oops\n\n{\"id\":\"B\",\"year\":99}\n{\"id\":\"C\",\"year\":2001}\n";
        let report = store.ingest_documents(input.as_bytes()).unwrap();
        assert_eq!(report.stats.n_docs, 2);
        assert_eq!(report.skipped, 2);
        let lines: Vec<_> = report.warnings.iter().map(|w| w.line).collect();
        assert_eq!(lines, [2, 4]);
    }

    #[test]
    fn duplicate_ids_last_wins() {
        let mut store = CorpusStore::new();
        let input = "{\"id\":\"A\",\"year\":2000,\"title\":\"old\"}\n{\"id\":\"A\",\"year\":2001,\"title\":\"new\"}\n";
        let report = store.ingest_documents(input.as_bytes()).unwrap();
        assert_eq!(report.duplicates, 1);
        assert_eq!(report.stats.n_docs, 1);
        assert_eq!(store.get_document("A").unwrap().title, "new");
    }

    #[test]
    fn ingestion_is_idempotent() {
        let mut once = CorpusStore::new();
        let first = once.ingest_documents(fixtures::c5_jsonl().as_bytes()).unwrap();
        let mut twice = once.clone();
        let second = twice.ingest_documents(fixtures::c5_jsonl().as_bytes()).unwrap();
        assert_eq!(first.stats, second.stats);
        assert_eq!(second.duplicates, 5);
        assert_eq!(once.documents(), twice.documents());
    }

    #[test]
    fn get_document_lookup() {
        let store = fixtures::c5_store();
        let d3 = store.get_document(fixtures::D3).unwrap();
        assert_eq!(d3.references, [fixtures::D1, fixtures::D2]);
        assert!(store.get_document(fixtures::D1).unwrap().references.is_empty());
        match store.get_document("ZZZ") {
            Err(StoreError::NotFound(id)) => assert_eq!(id, "ZZZ"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn read_events_r3() {
        let mut store = fixtures::c5_store();
        let report = store.ingest_read_events(fixtures::r3_jsonl().as_bytes()).unwrap();
        assert_eq!(report.stats.n_read_events, 6);
        let report = store
            .ingest_read_events(&b"{\"reader\":\"r9\",\"doc\":\"nope\",\"date\":\"2020-01-01\"}\n{\"reader\":\"r9\",\"doc\":\"x\",\"date\":\"bad\"}\n"[..])
            .unwrap();
        assert_eq!(report.stats.n_read_events, 7);
        assert_eq!(report.skipped, 1);
    }

    #[test]
    fn save_and_open_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = fixtures::c5_store();
        store.ingest_read_events(fixtures::r3_jsonl().as_bytes()).unwrap();
        store.save(dir.path()).unwrap();
        let back = CorpusStore::open(dir.path()).unwrap();
        assert_eq!(back.documents(), store.documents());
        assert_eq!(back.events(), store.events());
        for d in store.documents() {
            assert_eq!(back.get_document(&d.id).unwrap(), d);
        }
    }

    #[test]
    fn unreadable_source_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join(DOCS_FILE)).unwrap();
        assert!(CorpusStore::open(dir.path()).is_err());
    }
}
