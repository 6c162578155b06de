#![no_main]

use libfuzzer_sys::fuzz_target;
use metaplectic_cli::{run, Command, JobSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mut job) = JobSpec::parse(text) else { return };
    // quadrature is too slow for fuzzing
    if job.command == Command::Verify {
        return;
    }
    job.options.oracle = false;
    let report = run(&job);
    assert!(report.exit_code <= 3);
    let _ = report.to_json();
    let _ = report.to_human();
});
