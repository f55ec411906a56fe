#![no_main]

use libfuzzer_sys::fuzz_target;
use qclock_cli::args::CommandKind;
use qclock_cli::config::{layer, Overrides};

const COMMANDS: [CommandKind; 5] = [
    CommandKind::ClockPaths,
    CommandKind::Trajectory,
    CommandKind::Orbits,
    CommandKind::McVsExact,
    CommandKind::Bounds,
];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = Overrides::from_json_str(text) {
        for cmd in COMMANDS {
            let _ = layer(cmd, Some(file.clone()), Overrides::default());
        }
    }
});
