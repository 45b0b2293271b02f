//! Property test: parse -> serialize -> parse is the identity on scenarios.

use proptest::prelude::*;

use scenario_cli::scenario::{parse_scenario, serialize_scenario, MatrixDecl, Scenario, Task};

fn arb_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,8}".prop_map(|s| s)
}

fn arb_matrix_decl(name: String) -> impl Strategy<Value = MatrixDecl> {
    prop_oneof![
        (1usize..=4).prop_map({
            let name = name.clone();
            move |n| MatrixDecl {
                name: name.clone(),
                expr: Some(format!("identity({n})")),
                re: None,
                im: None,
            }
        }),
        proptest::collection::vec(-10.0f64..10.0, 4).prop_map(move |v| MatrixDecl {
            name: name.clone(),
            expr: None,
            re: Some(vec![vec![v[0], v[1]], vec![v[2], v[3]]]),
            im: None,
        }),
    ]
}

fn arb_task(matrix: String) -> impl Strategy<Value = Task> {
    prop_oneof![
        (proptest::collection::vec(0.0f64..0.1, 1..4), any::<bool>()).prop_map({
            let matrix = matrix.clone();
            move |(_, assert_feasible)| Task::Takesaki {
                state: matrix.clone(),
                sub_generators: vec![matrix.clone()],
                assert_feasible,
            }
        }),
        (2usize..=5, 0.1f64..10.0).prop_map(|(levels, beta)| Task::TfdDemo { levels, beta }),
        (2usize..=6).prop_map(|dim| Task::KillingAudit { dim }),
        (proptest::collection::vec(-3.0f64..3.0, 4)).prop_map(|point| Task::WedgeClassify {
            dim: 4,
            point,
        }),
        (10usize..=40, 1e-3f64..1.0, 0.5f64..2.0).prop_map(|(sites, mass, coupling)| {
            Task::ChainRun {
                sites,
                mass,
                coupling,
                profile: None,
            }
        }),
        (Just(matrix)).prop_map(|m| Task::GenerateAlgebra {
            generators: vec![m],
            expect_dim: None,
        }),
    ]
}

fn arb_scenario() -> impl Strategy<Value = Scenario> {
    // TOML integers are signed 64-bit, so representable seeds stop at
    // i64::MAX.
    (arb_name(), 0..=i64::MAX as u64, arb_name()).prop_flat_map(|(name, seed, mat_name)| {
        (
            arb_matrix_decl(mat_name.clone()),
            proptest::collection::vec(arb_task(mat_name), 0..5),
        )
            .prop_map(move |(decl, tasks)| Scenario {
                name: name.clone(),
                seed,
                tol: 1e-10,
                matrices: vec![decl],
                tasks,
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_serialize_parse_is_identity(scenario in arb_scenario()) {
        let text = serialize_scenario(&scenario);
        let parsed = parse_scenario(&text).expect("serialized scenario parses");
        prop_assert_eq!(&parsed, &scenario);
        let again = parse_scenario(&serialize_scenario(&parsed)).unwrap();
        prop_assert_eq!(again, parsed);
    }
}
