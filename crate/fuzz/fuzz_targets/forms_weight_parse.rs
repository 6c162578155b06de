#![no_main]

use libfuzzer_sys::fuzz_target;
use metaplectic_cli::job::{FormJson, HoloJson, WeightJson};

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = serde_json::from_slice::<FormJson>(data) {
        let _ = f.to_form();
    }
    if let Ok(f) = serde_json::from_slice::<HoloJson>(data) {
        let _ = f.to_form();
    }
    if let Ok(w) = serde_json::from_slice::<WeightJson>(data) {
        if let Ok(weight) = w.to_weight() {
            let _ = WeightJson::from_weight(&weight);
        }
    }
});
