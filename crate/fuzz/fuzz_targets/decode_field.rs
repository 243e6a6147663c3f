#![no_main]

use libfuzzer_sys::fuzz_target;
use pcnls::radial_spectral::io::{decode_field, encode_field, Endian};

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = decode_field(data) {
        // anything accepted must survive a round trip
        let again = decode_field(&encode_field(&field, Endian::Little)).expect("re-decode");
        assert_eq!(again, field);
    }
});
