#![no_main]

use libfuzzer_sys::fuzz_target;
use rbkit_core::LaurentPoly;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 512 {
        return;
    }
    if let Ok(p) = s.parse::<LaurentPoly>() {
        let text = p.to_string();
        assert_eq!(LaurentPoly::parse(&text, p.nvars()).unwrap(), p, "{text}");
    }
});
