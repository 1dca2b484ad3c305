#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = duval::text::parse_document(data);
    let _ = duval::text::parse_scheme(data);
});
