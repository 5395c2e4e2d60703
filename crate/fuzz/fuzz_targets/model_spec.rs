#![no_main]

use libfuzzer_sys::fuzz_target;
use varextropy::parse::parse_model_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_model_spec(s) {
        // anything that parses must be a usable law
        let sup = m.support();
        assert!(sup.lower < sup.upper);
        for u in [0.1, 0.5, 0.9] {
            if let Ok(x) = m.quantile(u) {
                let f = m.pdf(x);
                assert!(!f.is_nan() && f >= 0.0);
            }
        }
    }
});
