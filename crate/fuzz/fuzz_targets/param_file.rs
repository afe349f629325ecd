#![no_main]

use libfuzzer_sys::fuzz_target;
use rbkit_cli::parse_params;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_params(s) {
        assert!(p.n >= 2 && p.a.len() == p.n - 1 && p.c.len() == p.n - 1);
    }
});
