#![no_main]

use libfuzzer_sys::fuzz_target;
use varextropy::parse::parse_bivariate_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(b) = parse_bivariate_spec(s) {
        let f = b.joint_pdf(0.5, 0.5);
        assert!(!f.is_nan() && f >= 0.0);
    }
});
