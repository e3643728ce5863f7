#![no_main]

use dynmix::io::PriorOverrides;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        for order in 1..=3 {
            let _ = PriorOverrides::parse(text, order);
        }
    }
});
