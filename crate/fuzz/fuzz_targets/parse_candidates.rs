#![no_main]

use libfuzzer_sys::fuzz_target;
use mapcone::algebra::ArtinAlgebra;
use mapcone::fixtures;
use mapcone::format::{emit_candidates, parse_candidates};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let chi = fixtures::gl11_borel();
    let art = ArtinAlgebra::truncated("e", 3).unwrap();
    if let Ok(c) = parse_candidates(text, &chi, &art) {
        let out = emit_candidates(&c, &chi, &art);
        let again = parse_candidates(&out, &chi, &art).expect("emitted candidates reparse");
        assert_eq!(emit_candidates(&again, &chi, &art), out);
    }
});
