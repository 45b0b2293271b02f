//! Fuzzes the scenario-file parser: must never panic, and any document it
//! accepts must survive a serialize -> parse round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use scenario_cli::{parse_scenario, serialize_scenario};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = parse_scenario(text) {
        let serialized = serialize_scenario(&scenario);
        let reparsed = parse_scenario(&serialized)
            .expect("serialization of an accepted scenario must reparse");
        assert_eq!(reparsed, scenario, "round trip changed the scenario");
    }
});
