#![no_main]

use libfuzzer_sys::fuzz_target;
use varextropy::parse::parse_signature;
use varextropy::reliability::SignatureVector;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_signature(s) {
        if let Ok(sig) = SignatureVector::new(v) {
            assert!((sig.big_g(1.0) - 1.0).abs() < 1e-6);
        }
    }
});
