#![no_main]

use libfuzzer_sys::fuzz_target;
use quartic_cli::Report;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = Report::from_json(text) {
        // writing is a fixed point after one read
        let once = report.to_json();
        let twice = Report::from_json(&once).expect("own output parses").to_json();
        assert_eq!(once, twice);
        let _ = report.to_csv();
    }
});
