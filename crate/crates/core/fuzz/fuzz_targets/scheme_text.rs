#![no_main]
use duval::grpscheme::SubgroupScheme;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(g) = SubgroupScheme::from_text(data) {
        // Canonical text must parse back to the same scheme.
        let again = SubgroupScheme::from_text(&g.to_text()).expect("canonical text parses");
        assert_eq!(again.to_text(), g.to_text());
        let _ = g.validate();
    }
});
