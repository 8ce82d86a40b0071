#![no_main]

use libfuzzer_sys::fuzz_target;
use quartic_cli::{parse_config, Options, RunConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = parse_config(text) {
            let _ = RunConfig::resolve(None, Options::default(), Some(file));
        }
    }
});
