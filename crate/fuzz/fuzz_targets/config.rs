#![no_main]

use libfuzzer_sys::fuzz_target;
use soograph_core::Config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = Config::parse(text) {
            cfg.validate().expect("parsed configs are valid");
        }
    }
});
