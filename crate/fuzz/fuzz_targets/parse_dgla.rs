#![no_main]

use libfuzzer_sys::fuzz_target;
use mapcone::format::{emit_dgla, parse_dgla};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_dgla(text) {
        // whatever parses must survive a round trip
        let again = parse_dgla(&emit_dgla(&g)).expect("emitted DGLA reparses");
        assert_eq!(again, g);
    }
});
