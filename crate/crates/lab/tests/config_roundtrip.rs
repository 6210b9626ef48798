use pbqc_core::analysis::WeightModel;
use pbqc_core::attacks::ModifiedStrategy;
use pbqc_core::state::SingleGate;
use pbqc_lab::config::{
    AnalysisSection, AttackKind, AttackSection, GeometrySection, GridSpec, Layout, OutputSection, ProgramSpec, ProtocolKind, ProtocolSection,
    ScenarioConfig,
};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, Just(0.0), Just(std::f64::consts::PI / 3.0), 1e-9f64..1e-3]
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [finite(), finite(), finite()]
}

fn word() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_./-]{0,12}"
}

fn gates() -> impl Strategy<Value = Vec<Vec<SingleGate>>> {
    let gate = prop_oneof![
        Just(SingleGate::H),
        Just(SingleGate::S),
        Just(SingleGate::Sdg),
        Just(SingleGate::T),
        Just(SingleGate::Tdg),
        Just(SingleGate::X),
        Just(SingleGate::Y),
        Just(SingleGate::Z)
    ];
    prop::collection::vec(prop::collection::vec(gate, 0..4), 1..4)
}

fn program() -> impl Strategy<Value = Option<ProgramSpec>> {
    prop::option::of(prop_oneof![
        (finite(), finite()).prop_map(|(theta, phi)| ProgramSpec::Angles { theta, phi }),
        "[01]{1,10}".prop_map(ProgramSpec::Bits),
        gates().prop_map(ProgramSpec::Gates),
    ])
}

fn protocol() -> impl Strategy<Value = ProtocolSection> {
    (
        prop_oneof![Just(ProtocolKind::A), Just(ProtocolKind::B), Just(ProtocolKind::Modified)],
        0usize..9,
        prop::option::of(any::<bool>()),
        prop::option::of(prop::collection::vec(any::<bool>(), 1..6)),
        prop::option::of(prop::collection::vec(any::<bool>(), 1..6)),
        prop::option::of(gates()),
        program(),
    )
        .prop_map(|(kind, n, u, shares, code, rotations, program)| ProtocolSection { kind, n, u, shares, code, rotations, program })
}

fn geometry() -> impl Strategy<Value = GeometrySection> {
    (
        prop_oneof![Just(Layout::Line), Just(Layout::Regular), Just(Layout::Custom)],
        finite(),
        finite(),
        finite(),
        finite(),
        prop::collection::vec(point(), 1..5),
        point(),
        prop::option::of(prop::collection::vec(point(), 1..5)),
    )
        .prop_map(|(layout, d, l, c, latency, verifiers, receiver, cheaters)| {
            let custom = layout == Layout::Custom;
            GeometrySection {
                layout,
                d: (!custom).then_some(d),
                l,
                c,
                latency,
                verifiers: custom.then_some(verifiers),
                receiver: custom.then_some(receiver),
                cheaters,
            }
        })
}

fn attack() -> impl Strategy<Value = Option<AttackSection>> {
    let strategy = prop::sample::select(ModifiedStrategy::ALL.to_vec());
    prop::option::of(prop_oneof![
        prop_oneof![Just(AttackKind::Teleport), Just(AttackKind::Qss), Just(AttackKind::Chain)]
            .prop_map(|kind| AttackSection { kind, strategy: None }),
        strategy.prop_map(|s| AttackSection { kind: AttackKind::Modified, strategy: Some(s) }),
    ])
}

fn analysis() -> impl Strategy<Value = AnalysisSection> {
    let grid = prop::option::of(prop_oneof![
        Just(GridSpec::PauliAxes),
        Just(GridSpec::PauliEigenstates),
        (prop::collection::vec(finite(), 0..4), 0usize..200).prop_map(|(extra_thetas, spiral)| GridSpec::Mixed { extra_thetas, spiral }),
        (0usize..50).prop_map(GridSpec::Equator),
        (finite(), finite()).prop_map(|(theta, phi)| GridSpec::Single { theta, phi }),
    ]);
    (
        0usize..1_000_000,
        prop::collection::vec(prop::sample::select(ModifiedStrategy::ALL.to_vec()), 1..5),
        0usize..50,
        0usize..500,
        0usize..100,
        0usize..500,
        prop::option::of(prop_oneof![Just(WeightModel::Uniform), Just(WeightModel::Free)]),
        grid,
    )
        .prop_map(|(samples, strategies, sweep, sweep_phi, restarts, steps, weights, grid)| AnalysisSection {
            samples,
            strategies,
            sweep,
            sweep_phi,
            restarts,
            steps,
            weights,
            grid,
        })
}

fn config() -> impl Strategy<Value = ScenarioConfig> {
    (word(), any::<u64>(), 0usize..10_000, protocol(), geometry(), attack(), analysis(), word(), word(), prop::collection::vec(word(), 0..4))
        .prop_map(|(name, seed, trials, protocol, geometry, attack, analysis, dir, report, tables)| ScenarioConfig {
            name,
            seed,
            trials,
            protocol,
            geometry,
            attack,
            analysis,
            output: OutputSection { dir, report, tables },
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_of_print_is_identity(c in config()) {
        let text = c.to_string();
        prop_assert_eq!(ScenarioConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn printing_is_a_fixed_point(c in config()) {
        let once = c.to_string();
        prop_assert_eq!(ScenarioConfig::parse(&once).unwrap().to_string(), once);
    }
}
