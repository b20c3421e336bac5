#![no_main]

use libfuzzer_sys::fuzz_target;
use smartgait::models::harness::EvalReport;
use smartgait::models::Task;
use smartgait::report::{render_markdown, Artifacts};

fuzz_target!(|data: &[u8]| {
    let Ok(report) = serde_json::from_slice::<EvalReport>(data) else { return };
    let _ = report.write_predictions_csv(std::io::sink());
    let mut a = Artifacts::default();
    match report.task {
        Task::Classify => a.classify.push(report.clone()),
        Task::Regress => a.regress.push(report.clone()),
    }
    a.ablations.push(vec![report]);
    let _ = render_markdown(&a);
});
