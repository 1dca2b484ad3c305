#![no_main]
use duval_cli::entry::CatalogEntry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(blocks) = duval::text::parse_document(data) else { return };
    for b in blocks.iter().take(4) {
        if let Ok(e) = CatalogEntry::reproduce(b) {
            let text = e.to_text();
            let again = duval::text::parse_scheme(&text).expect("entry text parses");
            assert_eq!(CatalogEntry::reproduce(&again).unwrap(), e);
        }
    }
});
