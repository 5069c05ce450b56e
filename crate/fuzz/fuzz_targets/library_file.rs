#![no_main]

use libfuzzer_sys::fuzz_target;
use soograph_core::corpus::parse_library_file;
use std::collections::HashSet;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let ids = parse_library_file(&text);
    let unique: HashSet<&String> = ids.iter().collect();
    assert_eq!(unique.len(), ids.len());
    assert!(ids.iter().all(|i| !i.is_empty() && i.trim() == i));
    assert_eq!(parse_library_file(&ids.join("\n")), ids);
});
