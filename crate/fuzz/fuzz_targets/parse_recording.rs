#![no_main]

use libfuzzer_sys::fuzz_target;
use smartgait::recording::parse_recording_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rec) = parse_recording_str(text) else { return };
    // anything accepted must survive a write and re-read unchanged
    let canonical = rec.to_canonical_string().expect("parsed recordings are writable");
    let again = parse_recording_str(&canonical).expect("canonical text parses");
    assert_eq!(again, rec);
    let _ = rec.repaired_and_synchronized();
});
