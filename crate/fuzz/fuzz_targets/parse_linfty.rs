#![no_main]

use libfuzzer_sys::fuzz_target;
use mapcone::format::{emit_linfty, parse_linfty};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_linfty(text) {
        let out = emit_linfty(&s);
        let again = parse_linfty(&out).expect("emitted structure reparses");
        assert_eq!(emit_linfty(&again), out);
    }
});
