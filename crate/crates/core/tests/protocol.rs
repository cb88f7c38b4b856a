use ftbqc::brickwork::{gate_pattern, vertical_pairs, BrickworkLayout, Coord};
use ftbqc::ledger::{estimate, Census, CostModel, CostVector, EstimateInput, Protocol};
use ftbqc::protocol::physical::{residual_logical, spot_check};
use ftbqc::protocol::*;
use ftbqc::simcore::{fidelity, Gate, GateKind, Octant, Pauli, StateVector};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// The brickwork computation as a plain circuit: for each measured column,
/// its vertical CZs and then `H·Rz(−φ)` on every row; finally the output
/// column's CZs. Independent of the MBQC engine and the protocol.
fn direct(layout: &BrickworkLayout, input: &StateVector) -> StateVector {
    let (n, m) = (layout.rows(), layout.layers());
    let mut s = input.clone();
    for x in 1..=4 * m {
        for (a, b) in vertical_pairs(n, m, x) {
            s.apply(&Gate::cz(a - 1, b - 1)).unwrap();
        }
        for y in 1..=n {
            s.apply(&Gate::single(GateKind::Rz(-layout.phi(Coord::new(x, y))), y - 1)).unwrap();
            s.apply(&Gate::single(GateKind::H, y - 1)).unwrap();
        }
    }
    for (a, b) in vertical_pairs(n, m, 4 * m + 1) {
        s.apply(&Gate::cz(a - 1, b - 1)).unwrap();
    }
    s
}

fn random_layout(rng: &mut ChaCha8Rng, rows: usize, layers: usize) -> BrickworkLayout {
    let mut l = BrickworkLayout::identity(rows, layers).unwrap();
    for x in 1..=4 * layers {
        for y in 1..=rows {
            l.set_phi(Coord::new(x, y), Octant::new(rng.random_range(0..8))).unwrap();
        }
    }
    l
}

fn plus(rows: usize) -> StateVector {
    let mut s = StateVector::equatorial(Octant::ZERO);
    for _ in 1..rows {
        s = s.tensor(&StateVector::equatorial(Octant::ZERO)).unwrap();
    }
    s
}

fn cnot_layout() -> BrickworkLayout {
    let mut layout = BrickworkLayout::identity(2, 1).unwrap();
    let p = gate_pattern(GateKind::Cnot).unwrap();
    layout.set_row_pattern(1, 1, p.rows[0]).unwrap();
    layout.set_row_pattern(1, 2, p.rows[1]).unwrap();
    layout
}

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn cv(t: Rational64, two: Rational64, one: Rational64, meas: Rational64) -> CostVector {
    CostVector::new(t, two, one, meas)
}

fn counts(c: &CostVector) -> [Rational64; 4] {
    c.components()
}

#[test]
fn oracle_agrees_with_the_engine_on_a_cnot() {
    let layout = cnot_layout();
    for b in 0..4usize {
        let want = if b >= 2 { b ^ 1 } else { b };
        let got = direct(&layout, &StateVector::basis(2, b).unwrap());
        assert!(fidelity(&got, &StateVector::basis(2, want).unwrap()).unwrap() > 1.0 - TOL);
    }
}

#[test]
fn bfk_matches_direct_simulation_on_random_small_layouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    for trial in 0..20 {
        let layers = 1 + trial % 2;
        let layout = random_layout(&mut rng, 2, layers);
        let input = StateVector::random(2, &mut rng).unwrap();
        let out = run_bfk_basic(&layout, Some(&input), &RunConfig::default(), trial as u64).unwrap();
        assert_eq!(out.status, RunStatus::Success);
        let f = fidelity(out.output.as_ref().unwrap(), &direct(&layout, &input)).unwrap();
        assert!(f > 1.0 - TOL, "trial {trial}: {f}");
        out.transcript.check_corrections(&layout).unwrap();
    }
}

#[test]
fn encoded_protocols_compute_the_same_thing() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for trial in 0..6u64 {
        let layout = random_layout(&mut rng, 2, 1 + trial as usize % 2);
        let want = direct(&layout, &plus(2));
        for variant in [Variant::BfkBasic, Variant::Protocol1, Variant::Protocol2] {
            let out = run_protocol(variant, &layout, None, &RunConfig::default(), trial).unwrap();
            let f = fidelity(out.output.as_ref().unwrap(), &want).unwrap();
            assert!(f > 1.0 - TOL, "{variant} trial {trial}: {f}");
        }
        let input = StateVector::random(2, &mut rng).unwrap();
        let out = run_protocol1(&layout, Some(&input), &RunConfig::default(), trial).unwrap();
        assert!(fidelity(out.output.as_ref().unwrap(), &direct(&layout, &input)).unwrap() > 1.0 - TOL);
    }
}

#[test]
fn identity_layout_returns_the_input() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    for seed in 0..5 {
        let input = StateVector::random(2, &mut rng).unwrap();
        let out = run_bfk_basic(&layout, Some(&input), &RunConfig::default(), seed).unwrap();
        assert!(fidelity(out.output.as_ref().unwrap(), &input).unwrap() > 1.0 - TOL);
    }
}

#[test]
fn cnot_truth_table_through_the_protocol() {
    let layout = cnot_layout();
    for b in 0..4usize {
        let input = StateVector::basis(2, b).unwrap();
        let want = StateVector::basis(2, if b >= 2 { b ^ 1 } else { b }).unwrap();
        let out = run_bfk_basic(&layout, Some(&input), &RunConfig::default(), 100 + b as u64).unwrap();
        assert!(fidelity(out.output.as_ref().unwrap(), &want).unwrap() > 1.0 - TOL, "input {b:02b}");
    }
}

#[test]
fn tally_ledgers_at_full_scale() {
    let layout = BrickworkLayout::identity(35, 612).unwrap();
    let census = Census::of_layout(&layout);
    let model = CostModel::steane();
    let tally = RunConfig::tally();

    let bfk = run_bfk_basic(&layout, None, &tally, 1).unwrap();
    let bob = bfk.ledger.expected_cost("bob").unwrap();
    assert_eq!(counts(bob), [q(42_840, 1), q(106_488, 1), q(149_940, 1), q(85_680, 1)]);
    assert_eq!(bfk.ledger.transmitted_physical_qubits, 85_715);

    let p1 = run_protocol1(&layout, None, &tally, 1).unwrap();
    let alice = p1.ledger.expected_cost("alice").unwrap();
    assert_eq!(counts(alice), counts(&cv(q(9_000_075, 10), q(20_485_885, 1), q(482_146_875, 100), q(30_428_825, 10))));
    let bob = p1.ledger.expected_cost("bob").unwrap();
    assert_eq!(counts(bob), [q(899_640, 1), q(15_568_056, 1), q(3_534_300, 1), q(2_441_880, 1)]);
    let est = estimate(&model, Protocol::Protocol1, EstimateInput::Census(&census)).unwrap();
    assert_eq!(p1.ledger.expected, est.parties);
    assert_eq!(p1.ledger.transmitted_physical_qubits, 7 * 85_715);
    // Realized costs follow the drawn angles, so they differ from the averages.
    assert_ne!(p1.ledger.realized_cost("alice"), p1.ledger.expected_cost("alice"));

    for (mode, high_water) in [(BufferMode::EightQubit, 8), (BufferMode::MeasureAndDiscard, 2)] {
        let p2 = run_protocol2_bsa(&layout, None, &tally, 1, mode).unwrap();
        let prep = p2.ledger.expected_cost("bob_prep").unwrap();
        assert_eq!(counts(prep), [q(7_200_060, 1), q(163_887_080, 1), q(38_571_750, 1), q(24_343_060, 1)]);
        // Every candidate is prepared, so the realized cost is the average exactly.
        assert_eq!(p2.ledger.realized_cost("bob_prep"), Some(prep));
        let est = estimate(&model, Protocol::Protocol2, EstimateInput::Census(&census)).unwrap();
        assert_eq!(p2.ledger.expected, est.parties);
        assert_eq!(p2.ledger.transmitted_physical_qubits, 63 * 85_715);
        assert_eq!(p2.ledger.buffer_high_water_blocks, high_water);
        assert_eq!(p2.ledger.discarded_blocks, 7 * 85_715);
    }
}

#[test]
fn identical_seeds_give_identical_transcripts() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let layout = random_layout(&mut rng, 2, 2);
    let cfg = RunConfig { channel: ChannelConfig { depolarizing: 0.05, classical_loss: 0.1, ..ChannelConfig::default() }, ..RunConfig::default() };
    for variant in [Variant::BfkBasic, Variant::Protocol1, Variant::Protocol2] {
        let a = run_protocol(variant, &layout, None, &cfg, 9).unwrap();
        let b = run_protocol(variant, &layout, None, &cfg, 9).unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.transcript.to_jsonl(View::Omniscient), b.transcript.to_jsonl(View::Omniscient));
        assert_eq!(a.digest, a.transcript.digest());
        let c = run_protocol(variant, &layout, None, &cfg, 10).unwrap();
        assert_ne!(a.digest, c.digest);
    }
}

#[test]
fn forcing_r_leaves_the_corrected_bits_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    let layout = random_layout(&mut rng, 2, 2);
    let input = StateVector::random(2, &mut rng).unwrap();
    for c in [Coord::new(1, 1), Coord::new(3, 2), Coord::new(8, 1)] {
        let runs: Vec<RunOutcome> = [false, true]
            .into_iter()
            .map(|bit| {
                let cfg = RunConfig { forced_r: vec![(c, bit)], ..RunConfig::default() };
                run_bfk_basic(&layout, Some(&input), &cfg, 5).unwrap()
            })
            .collect();
        assert_eq!(runs[0].results, runs[1].results, "at {c}");
        let deltas: Vec<_> = runs.iter().map(|r| r.transcript.deltas().into_iter().find(|d| d.0 == c).unwrap().1).collect();
        assert_eq!(deltas[1], deltas[0] + Octant::PI);
        let raw: Vec<bool> = runs
            .iter()
            .map(|r| {
                r.transcript
                    .messages()
                    .find_map(|e| match e.message {
                        ProtocolMessage::ResultAnnounce { x, y, bit } if Coord::new(x, y) == c => Some(bit),
                        _ => None,
                    })
                    .unwrap()
            })
            .collect();
        assert_ne!(raw[0], raw[1], "Bob's bit flips with r at {c}");
        assert!(fidelity(runs[0].output.as_ref().unwrap(), runs[1].output.as_ref().unwrap()).unwrap() > 1.0 - TOL);
    }
}

#[test]
fn delta_algebra_holds_under_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    let layout = random_layout(&mut rng, 3, 2);
    let cfg = RunConfig { channel: ChannelConfig { depolarizing: 0.1, ..ChannelConfig::default() }, ..RunConfig::default() };
    for variant in [Variant::BfkBasic, Variant::Protocol1, Variant::Protocol2] {
        for seed in 0..5 {
            let out = run_protocol(variant, &layout, None, &cfg, seed).unwrap();
            out.transcript.check_invariants().unwrap();
            out.transcript.check_corrections(&layout).unwrap();
            let mut n = 0;
            for rec in out.transcript.omniscient() {
                if let OmniscientRecord::Measurement { theta, r, phi_prime, delta, .. } = rec {
                    assert_eq!(*delta - *theta - Octant::new(4 * i64::from(*r)), *phi_prime);
                    n += 1;
                }
            }
            assert_eq!(n, layout.measured_qubits());
        }
    }
}

#[test]
fn protocol2_candidates_arrive_in_octant_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(76);
    let layout = random_layout(&mut rng, 2, 1);
    for seed in 0..10 {
        let out = run_protocol2_bsa(&layout, None, &RunConfig::tally(), seed, BufferMode::EightQubit).unwrap();
        let prep: Vec<MessageShape> =
            out.transcript.schema().into_iter().filter(|s| s.variant != "angle_announce" && s.variant != "result_announce").collect();
        let per_coord = prep.chunks(9).take(layout.num_qubits());
        assert_eq!(per_coord.len(), layout.num_qubits());
        for chunk in prep.chunks(9).take(layout.num_qubits()) {
            let slots: Vec<Option<u8>> = chunk[..8].iter().map(|s| s.slot).collect();
            assert_eq!(slots, (0..8).map(Some).collect::<Vec<_>>());
            assert!(chunk[..8].iter().all(|s| s.direction == Direction::BobToAlice && s.coord == chunk[0].coord));
            assert_eq!((chunk[8].variant, chunk[8].direction, chunk[8].coord), ("selection_return", Direction::AliceToBob, chunk[0].coord));
        }
    }
}

#[test]
fn measure_and_discard_holds_two_blocks() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let out = run_protocol2_bsa(&layout, None, &RunConfig::default(), 3, BufferMode::MeasureAndDiscard).unwrap();
    assert_eq!(out.ledger.buffer_high_water_blocks, 2);
    let discards = out.transcript.omniscient().filter(|r| matches!(r, OmniscientRecord::Discard { .. })).count();
    assert_eq!(discards, 7 * layout.num_qubits());
    assert!(fidelity(out.output.as_ref().unwrap(), &plus(2)).unwrap() > 1.0 - TOL);
}

#[test]
fn single_pauli_on_a_transferred_block_is_corrected() {
    let model = CostModel::steane();
    let mut cases = 0;
    for k in [0, 2, 4, 6] {
        let theta = Octant::new(k);
        for pos in 0..7 {
            for p in Pauli::ALL {
                let noise = PauliFrame::single(pos, p);
                let c = spot_check(&model, (1, 1), theta, noise, theta, 1000 + cases).unwrap();
                assert_eq!(c.expected_angle, theta);
                assert!(c.decoded_fidelity > 1.0 - TOL, "θ={theta} {p}{pos}: {}", c.decoded_fidelity);
                let want_x = matches!(p, Pauli::X | Pauli::Y).then_some(pos);
                let want_z = matches!(p, Pauli::Z | Pauli::Y).then_some(pos);
                assert_eq!((c.syndrome.x_error_position(), c.syndrome.z_error_position()), (want_x, want_z));
                assert!(!c.outcome, "M(θ) on |+_θ⟩_L");
                assert!(c.prep_matches() && c.measurement_matches());
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 84);
}

#[test]
fn two_errors_are_flagged_uncorrectable() {
    // Brute force over seeds for a run whose channel leaves a logical error.
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let cfg = RunConfig { channel: ChannelConfig { depolarizing: 0.2, ..ChannelConfig::default() }, ..RunConfig::tally() };
    let out = run_protocol1(&layout, None, &cfg, 1).unwrap();
    let RunStatus::Uncorrectable { coords } = &out.status else { panic!("p = 0.2 on 7-qubit blocks should fail") };
    let flagged: Vec<Coord> = out
        .transcript
        .omniscient()
        .filter_map(|r| match r {
            OmniscientRecord::LogicalError { x, y, .. } => Some(Coord::new(*x, *y)),
            _ => None,
        })
        .collect();
    assert!(!coords.is_empty());
    assert!(coords.iter().all(|c| flagged.contains(c)));
}

#[test]
fn spot_checks_agree_with_the_logical_model() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let cfg = RunConfig { channel: ChannelConfig { depolarizing: 0.03, ..ChannelConfig::default() }, physical_checks: 2, ..RunConfig::default() };
    let out = run_protocol1(&layout, None, &cfg, 12).unwrap();
    assert_eq!(out.spot_checks.len(), 2);
    let deltas = out.transcript.deltas();
    for (c, (coord, delta)) in out.spot_checks.iter().zip(deltas) {
        assert_eq!((c.x, c.y), (coord.x, coord.y));
        assert_eq!(c.delta, delta);
        assert!(c.decoded_fidelity > 1.0 - TOL, "{c:?}");
        assert!(c.prep_matches(), "{c:?}");
        assert!(c.measurement_matches(), "{c:?}");
    }
    let syndromes = out.ledger.itemized.iter().filter(|i| i.item.starts_with("syndrome extraction")).count();
    assert_eq!(syndromes, 2);
}

#[test]
fn residual_logical_matches_weight_two_intuition() {
    // Oracle: a weight-two X error on a distance-3 code decodes to the wrong codeword.
    for a in 0..7 {
        for b in (a + 1)..7 {
            let two = PauliFrame::single(a, Pauli::X).compose(PauliFrame::single(b, Pauli::X));
            assert_eq!(residual_logical(two), (true, false), "X{a}X{b}");
        }
    }
}

#[test]
fn bob_view_passes_the_secret_scan_and_hides_the_layout() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let a = random_layout(&mut rng, 3, 2);
    let b = random_layout(&mut rng, 3, 2);
    for variant in [Variant::BfkBasic, Variant::Protocol1, Variant::Protocol2] {
        let ra = run_protocol(variant, &a, None, &RunConfig::tally(), 1).unwrap();
        let rb = run_protocol(variant, &b, None, &RunConfig::tally(), 2).unwrap();
        assert_eq!(ra.transcript.schema(), rb.transcript.schema());
        let lines = ra.transcript.lines(View::Bob);
        assert_eq!(scan_bob_view(lines.iter().map(String::as_str)).unwrap(), lines.len() - 1);
        let omni = ra.transcript.to_jsonl(View::Omniscient);
        assert!(omni.contains("\"theta\""));
        assert!(!ra.transcript.to_jsonl(View::Bob).contains("theta"));
    }
}

#[test]
fn scanner_rejects_leaky_lines() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let out = run_bfk_basic(&layout, None, &RunConfig::tally(), 0).unwrap();
    let mut lines = out.transcript.lines(View::Bob);
    let last = lines.pop().unwrap();
    lines.push(last.replacen('{', "{\"theta\":3,", 1));
    assert!(matches!(scan_bob_view(lines.iter().map(String::as_str)), Err(ProtocolError::Leak(_))));
}

#[test]
fn blindness_audit_on_repeated_runs() {
    let mut layout = BrickworkLayout::identity(2, 1).unwrap();
    let target = Coord::new(2, 1);
    layout.set_phi(target, Octant::new(1)).unwrap();
    let mut samples = Vec::new();
    for seed in 0..10_000 {
        let out = run_bfk_basic(&layout, None, &RunConfig::tally(), seed).unwrap();
        samples.extend(delta_samples(&out.transcript, &layout).into_iter().filter(|s| s.coord == target));
    }
    let report = blindness_audit(&samples).unwrap();
    assert!(report.passed, "{}", report.to_text());
    for f in report.groups[0].frequencies() {
        assert!((0.105..=0.145).contains(&f), "{f}");
    }
    assert!(report.groups[0].p_value > 0.01);
}

#[test]
fn bad_configurations_are_rejected() {
    let layout = BrickworkLayout::identity(2, 1).unwrap();
    let input = plus(2);
    assert!(matches!(run_bfk_basic(&layout, Some(&input), &RunConfig::tally(), 0), Err(ProtocolError::Config(_))));
    assert!(matches!(run_bfk_basic(&layout, Some(&plus(3)), &RunConfig::default(), 0), Err(ProtocolError::Config(_))));
    assert!(matches!(
        run_protocol2_bsa(&layout, Some(&input), &RunConfig::default(), 0, BufferMode::EightQubit),
        Err(ProtocolError::Config(_))
    ));
    let cfg = RunConfig { physical_checks: 1, ..RunConfig::default() };
    assert!(matches!(run_bfk_basic(&layout, None, &cfg, 0), Err(ProtocolError::Config(_))));
    let cfg = RunConfig { forced_r: vec![(Coord::new(5, 1), true)], ..RunConfig::default() };
    assert!(matches!(run_bfk_basic(&layout, None, &cfg, 0), Err(ProtocolError::Config(_))));
    let cfg = RunConfig { channel: ChannelConfig { classical_loss: 1.0, ..ChannelConfig::default() }, ..RunConfig::tally() };
    assert!(matches!(run_bfk_basic(&layout, None, &cfg, 0), Err(ProtocolError::Aborted { attempts: 9, .. })));
}

#[test]
fn exact_backend_refuses_wide_layouts() {
    let layout = BrickworkLayout::identity(13, 1).unwrap();
    assert!(run_bfk_basic(&layout, None, &RunConfig::default(), 0).is_err());
    assert!(run_bfk_basic(&layout, None, &RunConfig::tally(), 0).is_ok());
}
