#![no_main]

use libfuzzer_sys::fuzz_target;
use smartgait::pipeline::{read_labels_csv, write_labels_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(labels) = read_labels_csv(data) else { return };
    let mut out = Vec::new();
    write_labels_csv(&labels, &mut out).unwrap();
    assert_eq!(read_labels_csv(&out[..]).unwrap(), labels);
});
