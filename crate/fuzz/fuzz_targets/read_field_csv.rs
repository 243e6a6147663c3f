#![no_main]

use libfuzzer_sys::fuzz_target;
use pcnls::radial_spectral::io::read_field_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = read_field_csv(data) {
        assert!(field.values().iter().all(|v| v.is_finite()));
    }
});
