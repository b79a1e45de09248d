#![no_main]

use libfuzzer_sys::fuzz_target;
use mapcone::format::{emit_artin, parse_artin};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = parse_artin(text) {
        let out = emit_artin(&a);
        let again = parse_artin(&out).expect("emitted algebra reparses");
        assert_eq!(again.nil_index(), a.nil_index());
        assert_eq!(emit_artin(&again), out);
    }
});
