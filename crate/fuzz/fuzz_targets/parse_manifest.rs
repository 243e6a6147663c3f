#![no_main]

use libfuzzer_sys::fuzz_target;
use pcnls::harness::parse_manifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = parse_manifest(text) {
            m.validate().expect("parsed manifests are valid");
        }
    }
});
