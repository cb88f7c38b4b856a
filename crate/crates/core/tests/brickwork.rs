use ftbqc::brickwork::*;
use ftbqc::simcore::{fidelity, Gate, GateKind, Octant, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

const SINGLE: [GateKind; 8] = [
    GateKind::I,
    GateKind::H,
    GateKind::X,
    GateKind::Z,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
];

fn direct(input: &StateVector, gates: &[Gate]) -> StateVector {
    let mut s = input.clone();
    for g in gates {
        s.apply(g).unwrap();
    }
    s
}

#[test]
fn single_qubit_patterns_in_either_brick_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in SINGLE {
        for row in 1..=2 {
            let mut layout = BrickworkLayout::identity(2, 1).unwrap();
            layout.set_row_pattern(1, row, single_row(kind).unwrap()).unwrap();
            for _ in 0..20 {
                let input = StateVector::random(2, &mut rng).unwrap();
                let (out, _) = run_mbqc_state(&layout, input.clone(), &mut rng).unwrap();
                let want = direct(&input, &[Gate::single(kind, row - 1)]);
                assert!(fidelity(&out, &want).unwrap() > 1.0 - TOL, "{kind} row {row}");
            }
        }
    }
}

#[test]
fn single_qubit_patterns_in_half_bricks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for kind in SINGLE {
        // Layer 1 leaves row 3 as a half-brick, layer 2 leaves row 1.
        for (layer, row) in [(1, 3), (2, 1)] {
            let mut layout = BrickworkLayout::identity(3, 2).unwrap();
            layout.set_row_pattern(layer, row, single_row(kind).unwrap()).unwrap();
            for _ in 0..20 {
                let input = StateVector::random(3, &mut rng).unwrap();
                let (out, _) = run_mbqc_state(&layout, input.clone(), &mut rng).unwrap();
                let want = direct(&input, &[Gate::single(kind, row - 1)]);
                assert!(fidelity(&out, &want).unwrap() > 1.0 - TOL, "{kind} layer {layer}");
            }
        }
    }
}

#[test]
fn cnot_patterns_both_orientations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for top in [true, false] {
        let mut layout = BrickworkLayout::identity(2, 1).unwrap();
        let p = cnot_pattern(top);
        layout.set_row_pattern(1, 1, p.rows[0]).unwrap();
        layout.set_row_pattern(1, 2, p.rows[1]).unwrap();
        let gate = if top { Gate::cnot(0, 1) } else { Gate::cnot(1, 0) };
        for _ in 0..20 {
            let input = StateVector::random(2, &mut rng).unwrap();
            let (out, _) = run_mbqc_state(&layout, input.clone(), &mut rng).unwrap();
            assert!(fidelity(&out, &direct(&input, &[gate])).unwrap() > 1.0 - TOL);
        }
    }
}

#[test]
fn cnot_truth_table() {
    let mut layout = BrickworkLayout::identity(2, 1).unwrap();
    let p = gate_pattern(GateKind::Cnot).unwrap();
    layout.set_row_pattern(1, 1, p.rows[0]).unwrap();
    layout.set_row_pattern(1, 2, p.rows[1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for b in 0..4usize {
        let (got, _) = run_mbqc_state(&layout, StateVector::basis(2, b).unwrap(), &mut rng).unwrap();
        let want = if b >= 2 { b ^ 1 } else { b };
        assert!(fidelity(&got, &StateVector::basis(2, want).unwrap()).unwrap() > 1.0 - TOL, "input {b:02b}");
    }
}

#[test]
fn identity_layout_on_plus_inputs() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (out, record) = run_mbqc(&layout, &[Octant::ZERO, Octant::ZERO], &mut rng).unwrap();
    let want = product_input(&[Octant::ZERO, Octant::ZERO]).unwrap();
    assert!(fidelity(&out, &want).unwrap() > 1.0 - TOL);
    assert_eq!(record.outcomes().len(), 8);
}

#[test]
fn gate_sequence_across_layers() {
    // H on row 1, CNOT, T on row 2 over three layers of a 2-row state.
    let mut layout = BrickworkLayout::identity(2, 3).unwrap();
    layout.set_row_pattern(1, 1, single_row(GateKind::H).unwrap()).unwrap();
    layout.set_row_pattern(3, 1, cnot_pattern(true).rows[0]).unwrap();
    layout.set_row_pattern(3, 2, cnot_pattern(true).rows[1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let input = StateVector::random(2, &mut rng).unwrap();
        let (out, _) = run_mbqc_state(&layout, input.clone(), &mut rng).unwrap();
        let want = direct(&input, &[Gate::single(GateKind::H, 0), Gate::cnot(0, 1)]);
        assert!(fidelity(&out, &want).unwrap() > 1.0 - TOL);
    }
}

#[test]
fn preparation_angles_are_absorbed() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut layout = BrickworkLayout::identity(2, 2).unwrap();
        for c in layout.measurement_order().collect::<Vec<_>>() {
            layout.set_phi(c, Octant::new(rng.random_range(0..8))).unwrap();
        }
        let input = StateVector::random(2, &mut rng).unwrap();
        let seed: u64 = rng.random();
        let (plain, _) = run_mbqc_state(&layout, input.clone(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();

        // Rotate every non-input qubit at creation and measure at φ' + θ.
        let mut prep = vec![vec![Octant::ZERO; 2]; layout.columns()];
        for col in prep.iter_mut().skip(1).take(layout.columns() - 2) {
            for t in col.iter_mut() {
                *t = Octant::new(rng.random_range(0..8));
            }
        }
        let mut engine = MbqcEngine::new(&layout, input, prep.clone()).unwrap();
        let mut record = MeasurementRecord::new(&layout);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        while let Some(c) = engine.next_coord() {
            let (sx, sz) = record.signals(&layout, c).unwrap();
            let delta = corrected_angle(layout.phi(c), sx, sz) + prep[c.x - 1][c.y - 1];
            let bit = engine.measure(delta, &mut r).unwrap();
            record.push(c, bit).unwrap();
        }
        let mut out = engine.into_output().unwrap();
        apply_corrections(&mut out, &output_corrections(&layout, &record).unwrap()).unwrap();
        assert!(fidelity(&out, &plain).unwrap() > 1.0 - TOL);
    }
}

#[test]
fn built_graph_state_matches_definition() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let s = build_brickwork_state(&layout, &[Octant::ZERO; 2], None).unwrap();
    let mut want = StateVector::new(10).unwrap();
    for w in 0..10 {
        want.apply(&Gate::single(GateKind::H, w)).unwrap();
    }
    // Horizontal edges row by row, then the two rungs at columns 3 and 5.
    for x in 0..4 {
        for y in 0..2 {
            want.apply(&Gate::cz(2 * x + y, 2 * (x + 1) + y)).unwrap();
        }
    }
    want.apply(&Gate::cz(4, 5)).unwrap();
    want.apply(&Gate::cz(8, 9)).unwrap();
    assert!(fidelity(&s, &want).unwrap() > 1.0 - 1e-12);

    let big = BrickworkLayout::identity(35, 612).unwrap();
    assert!(build_brickwork_state(&big, &[Octant::ZERO; 35], None).is_err());
    assert_eq!(big.num_qubits(), 85_715);
}

#[test]
fn corrected_angle_examples() {
    let q = Octant::QUARTER;
    assert_eq!(corrected_angle(q, false, false), q);
    assert_eq!(corrected_angle(q, true, false), Octant::new(7));
    assert_eq!(corrected_angle(q, true, true), Octant::new(3));
}

#[test]
fn unsupported_patterns() {
    assert!(gate_pattern(GateKind::Toffoli).is_err());
    assert!(gate_pattern(GateKind::Swap).is_err());
    assert_eq!(gate_pattern(GateKind::I).unwrap().rows, vec![[Octant::ZERO; 4]]);
}

#[test]
fn record_enforces_column_major_order() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let mut r = MeasurementRecord::new(&layout);
    assert!(r.push(Coord::new(1, 2), false).is_err());
    r.push(Coord::new(1, 1), true).unwrap();
    r.push(Coord::new(1, 2), false).unwrap();
    assert!(r.push(Coord::new(3, 1), false).is_err());
}
