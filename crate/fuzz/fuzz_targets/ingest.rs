#![no_main]

use libfuzzer_sys::fuzz_target;
use soograph_core::corpus::CorpusStore;

// Whole-stream ingest: documents first, then the same bytes as read events.
fuzz_target!(|data: &[u8]| {
    let mut store = CorpusStore::new();
    let docs = store.ingest_documents(data).expect("in-memory reader");
    assert_eq!(docs.accepted - docs.duplicates, store.len());
    let _ = store.ingest_read_events(data);
    let _ = store.stats();
});
