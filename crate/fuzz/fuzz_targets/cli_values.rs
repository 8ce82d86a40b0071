#![no_main]

use libfuzzer_sys::fuzz_target;
use quartic_cli::values::{Family, FigureId, Format, Interval, LevelSetArg, ParityChoice, Range, SamplingChoice, Scales};
use quartic_cli::{resolve, Cli};
use clap::Parser;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = text.parse::<ParityChoice>();
    let _ = text.parse::<Format>();
    let _ = text.parse::<FigureId>();
    let _ = text.parse::<Interval>();
    let _ = text.parse::<LevelSetArg>();
    let _ = text.parse::<Family>();
    let _ = text.parse::<SamplingChoice>();
    let _ = text.parse::<Scales>();
    if let Ok(r) = text.parse::<Range>() {
        assert_eq!(r.values().len(), r.count);
    }
    // whole command lines, one argument per line; no file access
    let args = std::iter::once("quartic").chain(text.lines());
    if let Ok(cli) = Cli::try_parse_from(args) {
        if cli.config.is_none() {
            let _ = resolve(cli);
        }
    }
});
