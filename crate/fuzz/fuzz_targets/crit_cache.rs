#![no_main]

use libfuzzer_sys::fuzz_target;
use varextropy::inference::CriticalValueCache;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cache) = CriticalValueCache::from_json_str(s) {
        let again = CriticalValueCache::from_json_str(&cache.to_json_string()).unwrap();
        assert_eq!(again.entries.len(), cache.entries.len());
    }
});
