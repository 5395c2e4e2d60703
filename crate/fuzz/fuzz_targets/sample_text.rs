#![no_main]

use libfuzzer_sys::fuzz_target;
use varextropy::parse::parse_sample_text;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(sample) = parse_sample_text(s) {
        assert!(sample.values().iter().all(|v| v.is_finite()));
        assert_eq!(sample.values().len(), sample.n());
    }
});
