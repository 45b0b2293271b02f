//! Batch front door for the operator-algebra workbench: scenario files in a
//! small TOML dialect are parsed, executed against the library modules, and
//! reported in human- or machine-readable form.

pub mod expr;
pub mod runner;
pub mod scenario;

pub use expr::{eval_matrix_expr, ExprError};
pub use runner::{
    render_csv, render_records, render_text, run_scenario, ProfileTable, Report, Status,
    TaskRecord,
};
pub use scenario::{parse_scenario, serialize_scenario, Scenario, ScenarioError, Task};

/// Scenarios shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "minkowski_audit",
        include_str!("../scenarios/minkowski_audit.toml"),
    ),
    (
        "desitter_tangency",
        include_str!("../scenarios/desitter_tangency.toml"),
    ),
    (
        "classical_equivalence",
        include_str!("../scenarios/classical_equivalence.toml"),
    ),
    (
        "takesaki_fail",
        include_str!("../scenarios/takesaki_fail.toml"),
    ),
    ("tfd_2pi", include_str!("../scenarios/tfd_2pi.toml")),
    (
        "chain_convergence",
        include_str!("../scenarios/chain_convergence.toml"),
    ),
];

pub fn bundled_scenario(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_scenarios_parse() {
        for (name, text) in BUNDLED {
            let s = parse_scenario(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&s.name, name);
            assert!(!s.tasks.is_empty(), "{name} has no tasks");
        }
    }
}
