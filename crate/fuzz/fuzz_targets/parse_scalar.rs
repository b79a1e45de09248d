#![no_main]

use libfuzzer_sys::fuzz_target;
use mapcone::scalar::parse_scalar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(q) = parse_scalar(text) {
        assert_eq!(parse_scalar(&q.to_string()), Some(q));
    }
});
