//! Fuzzes the matrix-expression evaluator: must never panic, and any matrix
//! it produces must be finite and at most 64x64.

#![no_main]

use std::collections::BTreeMap;

use libfuzzer_sys::fuzz_target;
use opalg::cmat::pauli_z;
use scenario_cli::eval_matrix_expr;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut env = BTreeMap::new();
    env.insert("h".to_string(), pauli_z());
    if let Ok(m) = eval_matrix_expr(text, &env) {
        assert!(m.nrows() <= 64 && m.ncols() <= 64);
        assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
});
