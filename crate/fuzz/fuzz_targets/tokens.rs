#![no_main]

use libfuzzer_sys::fuzz_target;
use smartgait::models::harness::Combo;
use smartgait::models::{LearnerKind, Task};
use smartgait::recording::{mrc_numeric, Cohort, MrcGrade, Routine};
use smartgait::table::ModalitySubset;
use smartgait::whole_features::feature_origin;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = s.parse::<MrcGrade>() {
        assert_eq!(g.token(), s);
        assert_eq!(mrc_numeric(s).unwrap(), g.numeric());
    }
    if let Ok(r) = s.parse::<Routine>() {
        assert_eq!(r.token(), s);
    }
    let _ = s.parse::<Cohort>();
    let _ = s.parse::<Combo>();
    let _ = s.parse::<Task>();
    let _ = s.parse::<LearnerKind>();
    let _ = s.parse::<ModalitySubset>();
    let _ = feature_origin(s);
});
