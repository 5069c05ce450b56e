#![no_main]

use libfuzzer_sys::fuzz_target;
use soograph_core::corpus::parse_document_line;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_document_line(line) {
        // accepted records survive their own serialization
        let back = parse_document_line(&doc.to_json_line()).expect("round trip");
        assert_eq!(back, doc);
    }
});
