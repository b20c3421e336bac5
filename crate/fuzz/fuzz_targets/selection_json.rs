#![no_main]

use libfuzzer_sys::fuzz_target;
use smartgait::selection::SelectionResult;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(sel) = SelectionResult::from_json(text) else { return };
    let json = sel.to_json().unwrap();
    assert_eq!(SelectionResult::from_json(&json).unwrap(), sel);
});
