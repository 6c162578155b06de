#![no_main]

use libfuzzer_sys::fuzz_target;
use metaplectic::numkernel::CMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = serde_json::from_slice::<CMatrix>(data) {
        let again = serde_json::to_string(&m).unwrap();
        let back: CMatrix = serde_json::from_str(&again).unwrap();
        assert_eq!(back.rows(), m.rows());
        assert_eq!(back.cols(), m.cols());
    }
});
