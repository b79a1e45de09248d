#![no_main]

use libfuzzer_sys::fuzz_target;
use mapcone::format::{emit_morphism, parse_morphism};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(chi) = parse_morphism(text) {
        let out = emit_morphism(&chi);
        let again = parse_morphism(&out).expect("emitted morphism reparses");
        assert_eq!(emit_morphism(&again), out);
    }
});
