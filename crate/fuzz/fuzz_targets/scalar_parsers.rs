#![no_main]

use libfuzzer_sys::fuzz_target;
use qclock_cli::args::{
    parse_count, parse_dim, parse_initial, parse_model, parse_number, parse_number_list,
    parse_order, parse_seed,
};
use qclock_cli::config::preset;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_number(s) {
        assert!(v.is_finite());
    }
    if let Ok(list) = parse_number_list(s) {
        assert!(list.iter().all(|v| v.is_finite()));
    }
    let _ = parse_count(s);
    if let Ok(d) = parse_dim(s) {
        assert!(d >= 1);
    }
    let _ = parse_seed(s);
    let _ = parse_model(s);
    let _ = parse_initial(s);
    if let Ok(m) = parse_order(s) {
        assert!(m <= qclock_cli::args::MAX_ORDER);
    }
    let _ = preset(s);
});
