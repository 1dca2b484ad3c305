#![no_main]
use duval::intlat::{smith_normal_form, IntMat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(a) = data.parse::<IntMat>() else { return };
    if a.rows() > 6 || a.cols() > 6 {
        return;
    }
    if let Ok(s) = smith_normal_form(&a) {
        let uav = s.u.checked_mul(&a).and_then(|x| x.checked_mul(&s.v));
        if let Ok(uav) = uav {
            assert_eq!(uav, s.d);
        }
    }
});
