#![no_main]

use libfuzzer_sys::fuzz_target;
use soograph_core::netviz::{export, from_json, Format};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = from_json(text) {
        let again = from_json(&export(&net, Format::Json)).expect("exported graph reads back");
        assert_eq!(again, net);
        let _ = export(&net, Format::Dot);
        let _ = export(&net, Format::GraphMl);
    }
});
