#![no_main]

use libfuzzer_sys::fuzz_target;
use smartgait::table::FeatureTable;

fuzz_target!(|data: &[u8]| {
    let Ok(table) = FeatureTable::read_csv(data) else { return };
    let mut out = Vec::new();
    table.write_csv(&mut out).expect("parsed tables are writable");
    let again = FeatureTable::read_csv(&out[..]).expect("written table parses");
    assert_eq!(again.names, table.names);
    assert_eq!(again.rows.len(), table.rows.len());
});
