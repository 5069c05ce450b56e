#![no_main]

use libfuzzer_sys::fuzz_target;
use soograph_core::corpus::parse_read_event_line;

fuzz_target!(|data: &[u8]| {
    if let Ok(line) = std::str::from_utf8(data) {
        if let Ok(ev) = parse_read_event_line(line) {
            assert_eq!(parse_read_event_line(&ev.to_json_line()).unwrap(), ev);
        }
    }
});
