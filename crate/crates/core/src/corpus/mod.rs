//! Bibliographic records, read events and saved libraries.
//!
//! Documents and read events arrive as line-delimited JSON. Every line is
//! decoded and validated on its own so one bad record never poisons the rest
//! of a stream.

mod library;
mod store;

pub use library::{is_valid_name as is_valid_library_name, parse_library_file, Library, LibraryError, LibraryStore};
pub use store::{CorpusStats, CorpusStore, IngestReport, IngestWarning, StoreError};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const MIN_YEAR: i32 = 1500;
pub const MAX_YEAR: i32 = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Collection {
    Astronomy,
    Physics,
    General,
}

impl Collection {
    pub fn as_str(self) -> &'static str {
        match self {
            Collection::Astronomy => "astronomy",
            Collection::Physics => "physics",
            Collection::General => "general",
        }
    }
}

/// One bibliographic record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    /// `"last, first"` strings; position 0 is the first author.
    #[serde(default)]
    pub authors: Vec<String>,
    /// Parallel to `authors`.
    #[serde(default)]
    pub affiliations: Vec<String>,
    #[serde(default)]
    pub orcids: Vec<String>,
    pub year: i32,
    /// `YYYY-MM`, month `00` when unknown. Empty when the source omits it.
    #[serde(default)]
    pub pubdate: String,
    #[serde(default, with = "opt_date")]
    pub entry_date: Option<NaiveDate>,
    #[serde(default)]
    pub bibstem: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub collections: Vec<Collection>,
    #[serde(default)]
    pub properties: Vec<String>,
    /// Referenced document ids, possibly including ids unknown to the corpus.
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("empty document id")]
    EmptyId,
    #[error("year {0} outside [{MIN_YEAR}, {MAX_YEAR}]")]
    YearOutOfRange(i32),
    #[error("pubdate {0:?} is not YYYY-MM")]
    BadPubdate(String),
    #[error("date {0:?} is not YYYY-MM-DD")]
    BadDate(String),
    #[error("empty reader id")]
    EmptyReader,
    #[error("empty document id in read event")]
    EmptyEventDoc,
}

impl Document {
    /// Minimal record, used by fixtures and the generator.
    pub fn new(id: impl Into<String>, year: i32) -> Self {
        Document {
            id: id.into(),
            title: String::new(),
            abstract_text: String::new(),
            authors: Vec::new(),
            affiliations: Vec::new(),
            orcids: Vec::new(),
            year,
            pubdate: String::new(),
            entry_date: None,
            bibstem: String::new(),
            keywords: Vec::new(),
            collections: Vec::new(),
            properties: Vec::new(),
            references: Vec::new(),
        }
    }

    /// Applies ingestion normalization: reference dedup (first occurrence
    /// wins) and affiliation padding/truncation to the author count.
    pub fn normalize(&mut self) {
        let mut seen = HashSet::with_capacity(self.references.len());
        self.references.retain(|r| seen.insert(r.clone()));
        self.affiliations.resize(self.authors.len(), String::new());
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.id.trim().is_empty() {
            return Err(RecordError::EmptyId);
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&self.year) {
            return Err(RecordError::YearOutOfRange(self.year));
        }
        if !self.pubdate.is_empty() && parse_pubdate(&self.pubdate).is_none() {
            return Err(RecordError::BadPubdate(self.pubdate.clone()));
        }
        Ok(())
    }

    pub fn first_author(&self) -> Option<&str> {
        self.authors.first().map(String::as_str)
    }

    /// Sort key for publication date; falls back to the year with month 0.
    pub fn pub_key(&self) -> (i32, u32) {
        parse_pubdate(&self.pubdate).unwrap_or((self.year, 0))
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }
}

fn parse_pubdate(s: &str) -> Option<(i32, u32)> {
    let (y, m) = s.split_once('-')?;
    if y.len() != 4 || m.len() != 2 {
        return None;
    }
    let year: i32 = y.parse().ok()?;
    let month: u32 = m.parse().ok()?;
    (month <= 12 && y.bytes().all(|b| b.is_ascii_digit()) && m.bytes().all(|b| b.is_ascii_digit()))
        .then_some((year, month))
}

/// Decodes and validates one line of the document ingestion format.
pub fn parse_document_line(line: &str) -> Result<Document, RecordError> {
    let mut doc: Document = serde_json::from_str(line)?;
    doc.validate()?;
    doc.normalize();
    Ok(doc)
}

/// An anonymous `(reader, document, date)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReadEvent {
    #[serde(rename = "reader")]
    pub reader_id: String,
    #[serde(rename = "doc")]
    pub doc_id: String,
    #[serde(with = "date")]
    pub date: NaiveDate,
}

impl ReadEvent {
    pub fn new(reader: impl Into<String>, doc: impl Into<String>, date: NaiveDate) -> Self {
        ReadEvent {
            reader_id: reader.into(),
            doc_id: doc.into(),
            date,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }
}

#[derive(Deserialize)]
struct RawReadEvent {
    reader: String,
    doc: String,
    date: String,
}

/// Decodes one line of the read-event format.
pub fn parse_read_event_line(line: &str) -> Result<ReadEvent, RecordError> {
    let raw: RawReadEvent = serde_json::from_str(line)?;
    if raw.reader.is_empty() {
        return Err(RecordError::EmptyReader);
    }
    if raw.doc.is_empty() {
        return Err(RecordError::EmptyEventDoc);
    }
    let date = parse_date(&raw.date).ok_or(RecordError::BadDate(raw.date))?;
    Ok(ReadEvent {
        reader_id: raw.reader,
        doc_id: raw.doc,
        date,
    })
}

/// Strict `YYYY-MM-DD`.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    if s.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

mod date {
    use chrono::NaiveDate;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &NaiveDate, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&d.format("%Y-%m-%d"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_date(&s).ok_or_else(|| de::Error::custom(format!("bad date {s:?}")))
    }
}

mod opt_date {
    use chrono::NaiveDate;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Option<NaiveDate>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.collect_str(&d.format("%Y-%m-%d")),
            None => s.serialize_str(""),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<NaiveDate>, D::Error> {
        let s = Option::<String>::deserialize(d)?.unwrap_or_default();
        if s.is_empty() {
            return Ok(None);
        }
        super::parse_date(&s)
            .map(Some)
            .ok_or_else(|| de::Error::custom(format!("bad entry_date {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_optional_keys_default_to_empty() {
        let doc = parse_document_line(r#"{"id":"X","year":2001}"#).unwrap();
        assert_eq!(doc.title, "");
        assert!(doc.references.is_empty());
        assert_eq!(doc.entry_date, None);
        assert_eq!(doc.pub_key(), (2001, 0));
    }

    #[test]
    fn normalization_dedups_references_and_pads_affiliations() {
        let doc = parse_document_line(
            r#"{"id":"X","year":2001,"authors":["a, a","b, b"],"affiliations":["cfa"],"references":["R2","R1","R2","R3","R1"]}"#,
        )
        .unwrap();
        assert_eq!(doc.references, ["R2", "R1", "R3"]);
        assert_eq!(doc.affiliations, ["cfa", ""]);
    }

    #[test]
    fn rejects_invalid_records() {
        assert!(matches!(
            parse_document_line(r#"{"id":"","year":2001}"#),
            Err(RecordError::EmptyId)
        ));
        assert!(matches!(
            parse_document_line(r#"{"id":"X","year":1400}"#),
            Err(RecordError::YearOutOfRange(1400))
        ));
        assert!(matches!(
            parse_document_line(r#"{"id":"X","year":2000,"pubdate":"2000-13"}"#),
            Err(RecordError::BadPubdate(_))
        ));
        assert!(matches!(
            parse_document_line(r#"{"id":"X","year":2000,"collections":["biology"]}"#),
            Err(RecordError::Json(_))
        ));
        assert!(parse_document_line("not json").is_err());
    }

    #[test]
    fn entry_date_round_trips() {
        let doc = parse_document_line(r#"{"id":"X","year":2020,"entry_date":"2020-06-19"}"#).unwrap();
        assert_eq!(doc.entry_date, NaiveDate::from_ymd_opt(2020, 6, 19));
        let back = parse_document_line(&doc.to_json_line()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn read_event_lines() {
        let ev = parse_read_event_line(r#"{"reader":"r1","doc":"D1","date":"2020-06-01"}"#).unwrap();
        assert_eq!(ev.date, NaiveDate::from_ymd_opt(2020, 6, 1).unwrap());
        assert_eq!(parse_read_event_line(&ev.to_json_line()).unwrap(), ev);
        assert!(matches!(
            parse_read_event_line(r#"{"reader":"r1","doc":"D1","date":"2020-6-1"}"#),
            Err(RecordError::BadDate(_))
        ));
        assert!(parse_read_event_line(r#"{"reader":"r1","doc":"D1"}"#).is_err());
    }
}
