//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion does. Expected values are written out here
//! rather than taken from the library's own reference table.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftbqc::brickwork::*;
use ftbqc::compiler::{compile, decompose, qcla_adder, GateTally, QclaRegisters};
use ftbqc::ledger::{ratio_tables, Census, CostModel, CostVector, Reports};
use ftbqc::protocol::{blindness_audit, delta_samples, run_protocol, RunConfig, RunStatus, Variant, View};
use ftbqc::simcore::{fidelity, Gate, GateKind, Octant, Pauli, StateVector};
use ftbqc::steane::*;

const FIDELITY_TOL: f64 = 1e-9;
const CHI_SQUARE_ALPHA: f64 = 0.01;
const SWAP_TARGET: f64 = 328.0;
const SWAP_BAND: f64 = 0.15;
const MAX_GREEDY_LAYERS: usize = 700;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(s: &str) -> Rational64 {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let int: i64 = int.replace(',', "").parse().unwrap();
    let den = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
    Rational64::new(int * den + frac, den)
}

fn vector(parts: [&str; 4]) -> [Rational64; 4] {
    parts.map(q)
}

fn reference_reports() -> (Census, GateTally, Reports) {
    let census = Census::new(35, 612).unwrap();
    let target = GateTally { t_count: 441, cnot: 413, other_one_qubit: 144, ..GateTally::default() };
    let reports = Reports::build(&CostModel::steane(), &census, &target).unwrap();
    (census, target, reports)
}

fn criterion_1() -> Outcome {
    let (_, _, r) = reference_reports();
    let model = CostModel::steane();
    let cases: [(&str, Option<&CostVector>, [&str; 4]); 8] = [
        ("BFK basic Bob", r.bfk_basic.party("bob"), ["42,840", "106,488", "149,940", "85,680"]),
        ("Protocol 1 Alice", r.protocol1.party("alice"), ["900,007.5", "20,485,885", "4,821,468.75", "3,042,882.5"]),
        ("Protocol 1 Bob", r.protocol1.party("bob"), ["899,640", "15,568,056", "3,534,300", "2,441,880"]),
        ("BSA Bob prep", r.protocol2.party("bob_prep"), ["7,200,060", "163,887,080", "38,571,750", "24,343,060"]),
        ("BSA Bob BQC", r.protocol2.party("bob_bqc"), ["899,640", "15,568,056", "3,534,300", "2,441,880"]),
        ("FT circuit", r.ft_circuit.party("circuit"), ["9,261", "118,433", "23,058", "15,435"]),
        ("brick", Some(&model.brick_cost()), ["84", "1,454", "330", "228"]),
        ("half-brick", Some(&model.half_brick_cost()), ["42", "720", "165", "114"]),
    ];
    for (name, got, want) in cases {
        let got = got.ok_or(format!("{name} missing"))?;
        ensure(got.components() == vector(want), format!("{name}: {:?} != {want:?}", got.display_parts()))?;
    }
    Ok("8 cost vectors equal as exact rationals".into())
}

fn criterion_2() -> Outcome {
    let (_, target, reports) = reference_reports();
    let tables = ratio_tables(&reports, &target);
    let expected: [&[(&str, &[i64])]; 3] = [
        &[
            ("FT circuit", &[21, 287, 160]),
            ("BFK basic (Bob)", &[97, 258, 1041]),
            ("Protocol 1 (Bob)", &[2040, 37695, 24544]),
            ("Protocol 1 (Alice)", &[2041, 49603, 33482]),
            ("BSA (Bob only)", &[18367, 434516, 292403]),
        ],
        &[
            ("Protocol 1 (Bob)", &[97, 131, 153, 158]),
            ("Protocol 1 (Alice)", &[97, 173, 209, 197]),
            ("BSA (Bob only)", &[875, 1515, 1826, 1735]),
        ],
        &[
            ("Protocol 1 (Bob)", &[21, 146, 24, 29]),
            ("Protocol 1 (Alice)", &[21, 192, 32, 36]),
            ("BSA (Bob only)", &[189, 1685, 281, 313]),
        ],
    ];
    let mut cells = 0;
    for (t, rows) in expected.iter().enumerate() {
        ensure(tables[t].rows.len() == rows.len(), format!("table {} has {} rows", t + 1, tables[t].rows.len()))?;
        for (label, want) in rows.iter() {
            for (c, &w) in want.iter().enumerate() {
                let got = tables[t].cell(label, c).flatten();
                ensure(got == Some(w), format!("table {} {label} column {c}: {got:?} != {w}", t + 1))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells equal"))
}

fn criterion_3() -> Outcome {
    let a = brick_census(35, 612).map_err(|e| e.to_string())?;
    let b = brick_census(3, 14).map_err(|e| e.to_string())?;
    ensure(a == (10_404, 612, 85_715), format!("35x612 gave {a:?}"))?;
    ensure(b == (14, 14, 171), format!("3x14 gave {b:?}"))?;
    Ok(format!("35x612 -> {a:?}, 3x14 -> {b:?}"))
}

fn criterion_4() -> Outcome {
    let c = qcla_adder(10).map_err(|e| e.to_string())?;
    let t = c.tally();
    ensure(c.wire_count() == 35, format!("{} wires", c.wire_count()))?;
    ensure((t.toffoli, t.cnot, t.not) == (63, 35, 18), format!("source tally {t:?}"))?;
    let d = decompose(&c).tally();
    ensure(
        (d.t_count, d.cnot, d.one_qubit_clifford()) == (441, 413, 144),
        format!("decomposed {} T, {} CNOT, {} one-qubit", d.t_count, d.cnot, d.one_qubit_clifford()),
    )?;
    let (routed, placement) = compile(&c).map_err(|e| e.to_string())?;
    let s = routed.swaps as f64;
    ensure((s - SWAP_TARGET).abs() <= SWAP_BAND * SWAP_TARGET, format!("{} swaps", routed.swaps))?;
    ensure(placement.layers <= MAX_GREEDY_LAYERS, format!("{} layers", placement.layers))?;
    Ok(format!("63/35/18 -> 441/413/144; {} swaps, {} layers", routed.swaps, placement.layers))
}

fn criterion_5() -> Outcome {
    let mut mismatches = 0;
    let mut cases = 0;
    let mut check = |a: u128, b: u128, c: &ftbqc::compiler::CircuitIR, regs: &QclaRegisters| {
        let mut bits = regs.encode(a, b);
        c.evaluate_classical(&mut bits).unwrap();
        // Independent reference: plain integer addition, inputs restored, a untouched.
        if regs.decode(&bits) != (a, a + b, true) {
            mismatches += 1;
        }
        cases += 1;
    };
    for n in 1..=5 {
        let c = qcla_adder(n).map_err(|e| e.to_string())?;
        let regs = QclaRegisters::new(n);
        for a in 0..1u128 << n {
            for b in 0..1u128 << n {
                check(a, b, &c, &regs);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 6..=8 {
        let c = qcla_adder(n).map_err(|e| e.to_string())?;
        let regs = QclaRegisters::new(n);
        for _ in 0..1000 {
            let a = rng.random_range(0..1u128 << n);
            let b = rng.random_range(0..1u128 << n);
            check(a, b, &c, &regs);
        }
    }
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    Ok(format!("{cases} additions, 0 mismatches"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 1.0;
    let singles = [GateKind::I, GateKind::H, GateKind::X, GateKind::Z, GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg];
    let mut cases: Vec<(String, BrickworkLayout, Gate)> = Vec::new();
    for kind in singles {
        let mut l = BrickworkLayout::identity(2, 1).unwrap();
        l.set_row_pattern(1, 1, single_row(kind).unwrap()).unwrap();
        cases.push((kind.to_string(), l, Gate::single(kind, 0)));
    }
    let mut l = BrickworkLayout::identity(2, 1).unwrap();
    let p = cnot_pattern(true);
    l.set_row_pattern(1, 1, p.rows[0]).unwrap();
    l.set_row_pattern(1, 2, p.rows[1]).unwrap();
    cases.push(("CNOT".into(), l, Gate::cnot(0, 1)));
    for (name, layout, gate) in &cases {
        for _ in 0..20 {
            let input = StateVector::random(2, &mut rng).unwrap();
            let (out, _) = run_mbqc_state(layout, input.clone(), &mut rng).unwrap();
            let mut want = input;
            want.apply(gate).unwrap();
            let f = fidelity(&out, &want).unwrap();
            ensure(f > 1.0 - FIDELITY_TOL, format!("{name}: fidelity {f}"))?;
            worst = worst.min(f);
        }
    }
    Ok(format!("9 gates x 20 inputs, min fidelity {worst:.12}"))
}

/// Straight-line circuit for a brickwork run: per column, its vertical CZs and
/// `H·Rz(−φ)` on every row; then the output column's CZs.
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

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 1.0;
    for trial in 0..20u64 {
        let layout = random_layout(&mut rng, 2, 1 + trial as usize % 2);
        let input = StateVector::random(2, &mut rng).unwrap();
        let out = run_protocol(Variant::BfkBasic, &layout, Some(&input), &RunConfig::default(), trial).map_err(|e| e.to_string())?;
        ensure(out.status == RunStatus::Success, format!("trial {trial}: {:?}", out.status))?;
        let f = fidelity(out.output.as_ref().unwrap(), &direct(&layout, &input)).unwrap();
        ensure(f > 1.0 - FIDELITY_TOL, format!("trial {trial}: fidelity {f}"))?;
        worst = worst.min(f);
    }
    Ok(format!("20 layouts, min fidelity {worst:.12}"))
}

fn criterion_8() -> Outcome {
    let targets = [
        StateVector::new(1).unwrap(),
        StateVector::basis(1, 1).unwrap(),
        StateVector::equatorial(Octant::ZERO),
        StateVector::equatorial(Octant::QUARTER),
    ];
    let mut cases = 0;
    for (i, target) in targets.iter().enumerate() {
        let mut clean = Register::new(15, 80 + i as u64).unwrap();
        let b = clean.alloc_block().unwrap();
        match i {
            0 => prepare_logical_zero(&mut clean, &b).unwrap(),
            1 => {
                prepare_logical_zero(&mut clean, &b).unwrap();
                transversal_gate(&mut clean, TransversalKind::X, &[b]).unwrap();
            }
            2 => {
                prepare_logical_zero(&mut clean, &b).unwrap();
                transversal_gate(&mut clean, TransversalKind::H, &[b]).unwrap();
            }
            _ => prepare_magic(&mut clean, &b).unwrap(),
        }
        for pauli in Pauli::ALL {
            for pos in 0..7 {
                let mut reg = clean.clone();
                reg.inject(b.wires()[pos], pauli).unwrap();
                extract_and_correct(&mut reg, &b).unwrap();
                let f = decode_to_logical(reg.state(), &b).unwrap().fidelity(target).unwrap();
                ensure(f > 1.0 - FIDELITY_TOL, format!("codeword {i}, {pauli} on {pos}: fidelity {f}"))?;
                cases += 1;
            }
        }
    }
    let mut reg = Register::new(22, 88).unwrap();
    let data = reg.alloc_block().unwrap();
    prepare_logical_zero(&mut reg, &data).unwrap();
    transversal_gate(&mut reg, TransversalKind::H, &[data]).unwrap();
    let out = ft_t_gate(&mut reg, &data).unwrap();
    let f = decode_to_logical(reg.state(), &out).unwrap().fidelity(&StateVector::equatorial(Octant::QUARTER)).unwrap();
    ensure(f > 1.0 - FIDELITY_TOL, format!("FT T on |+>: fidelity {f}"))?;
    Ok(format!("{cases}/84 corrected; FT T on |+>_L fidelity {f:.12} (22 qubits)"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let layout = random_layout(&mut rng, 2, 1);
    let mut samples = Vec::new();
    for seed in 0..10_000 {
        let out = run_protocol(Variant::BfkBasic, &layout, None, &RunConfig::tally(), seed).map_err(|e| e.to_string())?;
        samples.extend(delta_samples(&out.transcript, &layout));
    }
    let report = blindness_audit(&samples).map_err(|e| e.to_string())?;
    let min_p = report.min_p_value();
    ensure(report.groups.len() == 8, format!("{} groups", report.groups.len()))?;
    // Per coordinate at 0.01, and the family at 0.01 after Bonferroni.
    ensure(min_p > CHI_SQUARE_ALPHA / report.groups.len() as f64, format!("min p {min_p}"))?;
    ensure(report.passed, report.to_text())?;

    let a = random_layout(&mut rng, 3, 2);
    let b = random_layout(&mut rng, 3, 2);
    for variant in [Variant::BfkBasic, Variant::Protocol1, Variant::Protocol2] {
        let ra = run_protocol(variant, &a, None, &RunConfig::tally(), 1).map_err(|e| e.to_string())?;
        let rb = run_protocol(variant, &b, None, &RunConfig::tally(), 2).map_err(|e| e.to_string())?;
        ensure(ra.transcript.schema() == rb.transcript.schema(), format!("{variant}: Bob views differ in shape"))?;
        ensure(!ra.transcript.to_jsonl(View::Bob).contains("theta"), "Bob view mentions theta")?;
    }
    Ok(format!("8 coordinates x 10,000 runs, min p {min_p:.4}; Bob views schema-identical across layouts"))
}

fn criterion_10(substitutes_passed: bool) -> Outcome {
    // The exact backend must refuse the full adder rather than pretend.
    let layout = BrickworkLayout::identity(35, 612).unwrap();
    let refused = run_protocol(Variant::Protocol1, &layout, None, &RunConfig::default(), 0).is_err();
    ensure(refused, "exact backend accepted a 35-row layout")?;
    ensure(substitutes_passed, "a substitute criterion (1, 2, 6, 7, 8) failed")?;
    Ok("not reproducible at desk scale (85,715 logical / 600,005 physical qubits); exact backend refuses it; \
        substituted by criteria 1, 2, 6, 7, 8"
        .into())
}

#[test]
fn acceptance() {
    let limits = [1, 1, 1, 1, 30, 60, 120, 600, 300].map(Duration::from_secs);
    let criteria: [fn() -> Outcome; 9] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9];
    let mut passed = Vec::new();
    for (i, (f, limit)) in criteria.iter().zip(limits).enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let ok = outcome.is_ok() && elapsed <= limit;
        let detail = match outcome {
            Ok(s) => s,
            Err(s) => s,
        };
        println!("criterion {:>2}: {} {detail} [{:.2?} / {:?}]", i + 1, if ok { "PASS" } else { "FAIL" }, elapsed, limit);
        passed.push(ok);
    }
    let substitutes = [0, 1, 5, 6, 7].iter().all(|&i| passed[i]);
    let outcome = catch_unwind(|| criterion_10(substitutes)).unwrap_or_else(|_| Err("panicked".into()));
    let ok = outcome.is_ok();
    println!("criterion 10: {} {}", if ok { "PASS" } else { "FAIL" }, outcome.unwrap_or_else(|e| e));
    passed.push(ok);
    let failed: Vec<usize> = passed.iter().enumerate().filter(|(_, &p)| !p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
