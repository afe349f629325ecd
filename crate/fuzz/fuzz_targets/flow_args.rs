#![no_main]

use libfuzzer_sys::fuzz_target;
use rbkit_cli::commands::parse_point;
use rbkit_core::gamma::Generator;

// input: first byte picks n, then "<generator>\n<point>"
fuzz_target!(|data: &[u8]| {
    let Some((&first, rest)) = data.split_first() else { return };
    let n = 2 + (first % 5) as usize;
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let (gen, point) = s.split_once('\n').unwrap_or((s, ""));
    if let Ok(g) = gen.parse::<Generator>() {
        assert_eq!(g.to_string().parse::<Generator>().ok(), Some(g));
        let _ = g.field(n);
    }
    if let Ok(p) = parse_point(point, n) {
        assert_eq!(p.dim(), n);
        assert!(p.coords[n - 1] > 0.0);
    }
});
