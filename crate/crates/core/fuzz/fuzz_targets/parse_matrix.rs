#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(lit) = duval::text::parse_matrix(data) {
        let f = duval::gf::build_field(5, 2).unwrap();
        let _ = duval::mat2::Mat2::from_lit(f, &lit);
    }
});
