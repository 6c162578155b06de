#![no_main]

use libfuzzer_sys::fuzz_target;
use metaplectic_cli::JobSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(job) = JobSpec::parse(text) {
        // accepted jobs are self-consistent and survive a round trip
        let n = job.dimension().unwrap();
        assert!((1..=metaplectic_cli::job::MAX_DIM).contains(&n));
        let again = serde_json::to_string(&job).unwrap();
        JobSpec::parse(&again).unwrap();
    }
});
