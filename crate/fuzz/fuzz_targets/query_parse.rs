#![no_main]

use libfuzzer_sys::{fuzz_target, Corpus};
use soograph_core::query::{parse, to_canonical_string};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    match parse(text) {
        Ok(ast) => {
            let canon = to_canonical_string(&ast);
            let again = parse(&canon).expect("canonical form parses");
            assert_eq!(to_canonical_string(&again), canon);
        }
        Err(e) => assert!(text.is_char_boundary(e.offset.min(text.len()))),
    }
    Corpus::Keep
});
