use ddanneal::ising::{brute_force_ground_states, IsingModel};
use ddanneal::problems::{
    build_cutting_stock, build_preset, cut6_spec, gauge_deviation, mot_constraints, mot5_spec,
    printed_fixture, FIXTURE_NAMES,
};

const PRINT_TOL: f64 = 0.005;

fn max_entry_deviation(a: &IsingModel, b: &IsingModel) -> f64 {
    let n = a.n_spins();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a.coupling(i, j) - b.coupling(i, j)).abs());
        }
    }
    worst
}

#[test]
fn mot5_chain_reproduces_printed_matrix() {
    let built = build_preset("mot5").unwrap();
    let fixture = printed_fixture("mot5").unwrap();
    let dev = max_entry_deviation(&built, &fixture);
    assert!(dev < PRINT_TOL, "deviation {dev}");
    assert_eq!(built.labels()[0], "ancilla");
}

#[test]
fn cut5_chain_reproduces_printed_matrix() {
    let built = build_preset("cut5").unwrap();
    let fixture = printed_fixture("cut5").unwrap();
    let dev = max_entry_deviation(&built, &fixture);
    assert!(dev < PRINT_TOL, "deviation {dev}");
}

#[test]
fn mot9_chain_reproduces_printed_matrix() {
    let built = build_preset("mot9").unwrap();
    let fixture = printed_fixture("mot9").unwrap();
    let dev = max_entry_deviation(&built, &fixture);
    assert!(dev < PRINT_TOL, "deviation {dev}");
}

/// The printed 6×6 matrix shows 1.67 where the chain gives 1/6 ≈ 0.167 for
/// the three piece–slack / slack–slack entries; everything else agrees.
#[test]
fn cut6_chain_matches_printed_matrix_except_decimal_shift() {
    let built = build_preset("cut6").unwrap();
    let fixture = printed_fixture("cut6").unwrap();
    let (_, mask) = gauge_deviation(&built, &fixture).unwrap();
    assert_eq!(mask, 0, "no sign convention change needed");
    let shifted = [(1, 3), (2, 3), (3, 4)];
    for i in 0..6 {
        for j in (i + 1)..6 {
            let b = built.coupling(i, j);
            let f = fixture.coupling(i, j);
            if shifted.contains(&(i, j)) {
                assert!((10.0 * b - f).abs() < 0.01, "({i},{j}): built {b}, printed {f}");
            } else {
                assert!((b - f).abs() < PRINT_TOL, "({i},{j}): built {b}, printed {f}");
            }
        }
    }
}

#[test]
#[ignore = "printed 6x6 cutting-stock matrix carries 1.67 where the encoding gives 0.167"]
fn cut6_chain_reproduces_printed_matrix() {
    let built = build_preset("cut6").unwrap();
    let fixture = printed_fixture("cut6").unwrap();
    let (dev, _) = gauge_deviation(&built, &fixture).unwrap();
    assert!(dev < PRINT_TOL, "deviation {dev}");
}

#[test]
fn fixture_ground_pairs_are_flip_symmetric() {
    for name in FIXTURE_NAMES {
        let model = printed_fixture(name).unwrap();
        let gs = brute_force_ground_states(&model).unwrap();
        assert_eq!(gs.degeneracy(), 2, "{name}");
        let n = model.n_spins();
        let mask = (1usize << n) - 1;
        assert_eq!(gs.indices[0] ^ gs.indices[1], mask, "{name}");
    }
}

#[test]
fn mot5_ground_state_is_valid_assignment() {
    let gs = brute_force_ground_states(&printed_fixture("mot5").unwrap()).unwrap();
    let constraints = mot_constraints(&mot5_spec()).unwrap();
    for state in gs.states() {
        let x = state.decode_with_ancilla(0);
        assert!(constraints.is_satisfied(&x), "{x:?}");
        assert_eq!(x, vec![1, 0, 0, 1]);
    }
}

#[test]
fn cut5_ground_states_are_feasible() {
    let gs = brute_force_ground_states(&printed_fixture("cut5").unwrap()).unwrap();
    let built = build_cutting_stock(&ddanneal::problems::cut5_spec()).unwrap();
    let c = built.qubo.constraints().unwrap();
    for state in gs.states() {
        let x = state.decode_with_ancilla(0);
        assert!(c.is_satisfied(&x), "{x:?}");
        assert_eq!(&x[..2], &[1, 1]);
    }
}

#[test]
fn cut6_builder_ground_states_are_feasible() {
    let gs = brute_force_ground_states(&build_preset("cut6").unwrap()).unwrap();
    let built = build_cutting_stock(&cut6_spec()).unwrap();
    let c = built.qubo.constraints().unwrap();
    assert_eq!(gs.degeneracy(), 2);
    for state in gs.states() {
        let x = state.decode_with_ancilla(0);
        assert!(c.is_satisfied(&x), "{x:?}");
        assert_eq!(&x[..2], &[1, 1]);
    }
}

/// With the printed 1.67 entries the slack equality no longer holds at the
/// ground state, which is why the builder-made model is the one annealed.
#[test]
#[ignore = "printed 6x6 cutting-stock matrix carries 1.67 where the encoding gives 0.167"]
fn cut6_fixture_ground_states_are_feasible() {
    let gs = brute_force_ground_states(&printed_fixture("cut6").unwrap()).unwrap();
    let built = build_cutting_stock(&cut6_spec()).unwrap();
    let c = built.qubo.constraints().unwrap();
    for state in gs.states() {
        let x = state.decode_with_ancilla(0);
        assert!(c.is_satisfied(&x), "{x:?}");
    }
}

#[test]
fn built_energies_match_direct_qubo_evaluation() {
    // couplings-only model energy (before normalization) equals the penalized
    // objective for the ancilla-up half of configuration space
    let spec = mot5_spec();
    let qubo = ddanneal::problems::build_mot(&spec).unwrap();
    let folded = ddanneal::ising::penalty_fold(&qubo).unwrap();
    let ising = ddanneal::ising::qubo_to_ising(&folded.matrix, folded.offset)
        .unwrap()
        .quadratize_with_ancilla();
    for idx in 0..16usize {
        let x: Vec<u8> = (0..4).map(|i| u8::from(idx >> i & 1 == 1)).collect();
        let mut spins = vec![1i8];
        spins.extend(x.iter().map(|&b| if b == 1 { 1 } else { -1 }));
        let s = ddanneal::ising::SpinConfiguration::new(spins).unwrap();
        let e = ising.energy(&s).unwrap();
        assert!((e - qubo.evaluate(&x)).abs() < 1e-9);
    }
}
