#![no_main]

use clap::Parser;
use libfuzzer_sys::fuzz_target;
use qclock_cli::config::{layer, Overrides};
use qclock_cli::Cli;

// Arguments are NUL-separated so that values may contain spaces.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("qclock").chain(text.split('\0'));
    if let Ok(cli) = Cli::try_parse_from(argv) {
        let flags = Overrides::from_args(cli.command.args());
        let _ = layer(cli.command.kind(), None, flags);
    }
});
