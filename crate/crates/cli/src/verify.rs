//! Property suites behind `ftbqc verify`. Seeds are fixed so a failure is
//! reproducible from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftbqc::brickwork::{cnot_pattern, run_mbqc_state, single_row, BrickworkLayout, Coord};
use ftbqc::protocol::{blindness_audit, delta_samples, run_protocol, RunConfig, RunStatus, Variant};
use ftbqc::simcore::{fidelity, Gate, GateKind, Octant, Pauli, StateVector};
use ftbqc::steane::{
    decode_to_logical, extract_and_correct, ft_t_gate, prepare_logical_zero, prepare_magic, transversal_gate, PhysicalTally,
    Register, TransversalKind,
};

use crate::{CliError, Suite};

const TOL: f64 = 1e-9;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

pub fn run(suite: Suite) -> Result<(), CliError> {
    let mut r = Report { failed: 0 };
    match suite {
        Suite::Simcore => simcore(&mut r)?,
        Suite::Steane => steane(&mut r)?,
        Suite::Brickwork => brickwork(&mut r)?,
        Suite::Equivalence => equivalence(&mut r)?,
        Suite::Blindness => blindness(&mut r)?,
    }
    if r.failed > 0 {
        return Err(CliError::Mismatch(r.failed));
    }
    Ok(())
}

fn sim(e: ftbqc::simcore::SimError) -> CliError {
    CliError::Usage(e.to_string())
}

fn simcore(r: &mut Report) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let kinds = [GateKind::H, GateKind::S, GateKind::T, GateKind::X, GateKind::Sdg, GateKind::Tdg, GateKind::Rz(Octant::new(3))];

    let mut worst_norm: f64 = 0.0;
    let mut worst_inverse: f64 = 1.0;
    for _ in 0..50 {
        let start = StateVector::random(5, &mut rng).map_err(sim)?;
        let mut s = start.clone();
        let mut gates = Vec::new();
        for _ in 0..30 {
            let g = match rng.random_range(0..4) {
                0 => Gate::cnot(rng.random_range(0..2), rng.random_range(2..5)),
                1 => Gate::cz(rng.random_range(0..2), rng.random_range(2..5)),
                2 => Gate::new(GateKind::Toffoli, &[0, 3, 4]).map_err(sim)?,
                _ => Gate::single(kinds[rng.random_range(0..kinds.len())], rng.random_range(0..5)),
            };
            s.apply(&g).map_err(sim)?;
            gates.push(g);
        }
        worst_norm = worst_norm.max((s.norm_sqr() - 1.0).abs());
        for g in gates.iter().rev() {
            let inv = g.kind.inverse().unwrap_or(g.kind);
            s.apply(&Gate::new(inv, g.wires()).map_err(sim)?).map_err(sim)?;
        }
        worst_inverse = worst_inverse.min(fidelity(&s, &start).map_err(sim)?);
    }
    r.check("norm preserved by 30-gate circuits", worst_norm < TOL, format!("max |‖ψ‖²−1| = {worst_norm:.2e}"));
    r.check("circuit followed by its inverse is the identity", worst_inverse > 1.0 - TOL, format!("min fidelity {worst_inverse:.12}"));

    let mut worst: f64 = 1.0;
    for _ in 0..20 {
        let start = StateVector::random(1, &mut rng).map_err(sim)?;
        let mut a = start.clone();
        for k in [GateKind::H, GateKind::Z, GateKind::H] {
            a.apply(&Gate::single(k, 0)).map_err(sim)?;
        }
        let mut b = start.clone();
        b.apply(&Gate::single(GateKind::X, 0)).map_err(sim)?;
        worst = worst.min(fidelity(&a, &b).map_err(sim)?);
        let mut a = start.clone();
        a.apply(&Gate::single(GateKind::T, 0)).map_err(sim)?;
        a.apply(&Gate::single(GateKind::T, 0)).map_err(sim)?;
        let mut b = start;
        b.apply(&Gate::single(GateKind::S, 0)).map_err(sim)?;
        worst = worst.min(fidelity(&a, &b).map_err(sim)?);
    }
    r.check("HZH = X and T·T = S", worst > 1.0 - TOL, format!("min fidelity {worst:.12}"));

    let mut bell = StateVector::new(2).map_err(sim)?;
    bell.apply(&Gate::single(GateKind::H, 0)).map_err(sim)?;
    bell.apply(&Gate::cnot(0, 1)).map_err(sim)?;
    let p0 = bell.probability_one(0).map_err(sim)?;
    let mut collapsed = bell.clone();
    collapsed.collapse(0, true).map_err(sim)?;
    let p1 = collapsed.probability_one(1).map_err(sim)?;
    r.check("Bell pair marginals and correlation", (p0 - 0.5).abs() < TOL && (p1 - 1.0).abs() < TOL, format!("P(1)={p0:.6}, P(1|1)={p1:.6}"));

    let shots = 20_000;
    let mut ones = 0;
    let mut agree = 0;
    for theta in 0..8 {
        let theta = Octant::new(theta);
        for _ in 0..shots / 8 {
            let mut s = StateVector::equatorial(theta);
            if s.measure_in_angle_basis(0, theta, &mut rng).map_err(sim)? {
                ones += 1;
            }
            let mut z = StateVector::equatorial(theta);
            agree += usize::from(!z.measure_z(0, &mut rng).map_err(sim)?);
        }
    }
    r.check("equatorial state measured in its own basis gives 0", ones == 0, format!("{ones} ones in {shots} shots"));
    let f = agree as f64 / shots as f64;
    // Five standard deviations of a fair coin.
    let band = 5.0 * (0.25 / shots as f64).sqrt();
    r.check("equatorial state in the Z basis is a fair coin", (f - 0.5).abs() < band, format!("P(0) = {f:.4} (±{band:.4})"));
    Ok(())
}

fn logical_fidelity(reg: &Register, b: &ftbqc::steane::CodeBlock, target: &StateVector) -> Result<f64, CliError> {
    decode_to_logical(reg.state(), b)
        .and_then(|d| d.fidelity(target))
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn steane(r: &mut Report) -> Result<(), CliError> {
    let st = |e: ftbqc::steane::SteaneError| CliError::Usage(e.to_string());
    let words: [(&str, fn(&mut Register, &ftbqc::steane::CodeBlock) -> Result<(), ftbqc::steane::SteaneError>, StateVector); 4] = [
        ("|0⟩", |reg, b| prepare_logical_zero(reg, b), StateVector::new(1).map_err(sim)?),
        (
            "|1⟩",
            |reg, b| {
                prepare_logical_zero(reg, b)?;
                transversal_gate(reg, TransversalKind::X, &[*b])
            },
            StateVector::basis(1, 1).map_err(sim)?,
        ),
        (
            "|+⟩",
            |reg, b| {
                prepare_logical_zero(reg, b)?;
                transversal_gate(reg, TransversalKind::H, &[*b])
            },
            StateVector::equatorial(Octant::ZERO),
        ),
        ("|A⟩", |reg, b| prepare_magic(reg, b), StateVector::equatorial(Octant::QUARTER)),
    ];
    for (i, (name, prep, target)) in words.iter().enumerate() {
        let mut clean = Register::new(15, 40 + i as u64).map_err(st)?;
        let b = clean.alloc_block().map_err(st)?;
        prep(&mut clean, &b).map_err(st)?;
        let mut wrong = 0;
        let mut worst: f64 = 1.0;
        for pauli in Pauli::ALL {
            for pos in 0..7 {
                let mut reg = clean.clone();
                reg.inject(b.wires()[pos], pauli).map_err(st)?;
                let s = extract_and_correct(&mut reg, &b).map_err(st)?;
                let want_x = matches!(pauli, Pauli::X | Pauli::Y).then_some(pos);
                let want_z = matches!(pauli, Pauli::Z | Pauli::Y).then_some(pos);
                if (s.x_error_position(), s.z_error_position()) != (want_x, want_z) {
                    wrong += 1;
                }
                worst = worst.min(logical_fidelity(&reg, &b, target)?);
            }
        }
        r.check(
            &format!("single-qubit errors on {name} located and corrected"),
            wrong == 0 && worst > 1.0 - TOL,
            format!("21 cases, {wrong} wrong syndromes, min fidelity {worst:.12}"),
        );
    }

    let mut reg = Register::new(22, 21).map_err(st)?;
    let data = reg.alloc_block().map_err(st)?;
    prepare_logical_zero(&mut reg, &data).map_err(st)?;
    transversal_gate(&mut reg, TransversalKind::H, &[data]).map_err(st)?;
    let before = reg.tally();
    let out = ft_t_gate(&mut reg, &data).map_err(st)?;
    let spent = reg.tally().since(&before);
    let f = logical_fidelity(&reg, &out, &StateVector::equatorial(Octant::QUARTER))?;
    r.check("fault-tolerant T on |+⟩ gives |A⟩", f > 1.0 - TOL, format!("fidelity {f:.12}"));
    let want = PhysicalTally::new(21, 262, 50, 35);
    r.check("fault-tolerant T gate tally", spent == want, format!("{spent:?} (want {want:?})"));
    Ok(())
}

fn brickwork(r: &mut Report) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let kinds = [GateKind::I, GateKind::H, GateKind::X, GateKind::Z, GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg];
    for kind in kinds {
        let mut layout = BrickworkLayout::identity(2, 1)?;
        layout.set_row_pattern(1, 1, single_row(kind)?)?;
        let worst = pattern_fidelity(&layout, &[Gate::single(kind, 0)], &mut rng)?;
        r.check(&format!("{kind} brick pattern"), worst > 1.0 - TOL, format!("20 random inputs, min fidelity {worst:.12}"));
    }
    let mut layout = BrickworkLayout::identity(2, 1)?;
    let p = cnot_pattern(true);
    layout.set_row_pattern(1, 1, p.rows[0])?;
    layout.set_row_pattern(1, 2, p.rows[1])?;
    let worst = pattern_fidelity(&layout, &[Gate::cnot(0, 1)], &mut rng)?;
    r.check("CNOT brick pattern", worst > 1.0 - TOL, format!("20 random inputs, min fidelity {worst:.12}"));
    Ok(())
}

fn pattern_fidelity(layout: &BrickworkLayout, gates: &[Gate], rng: &mut ChaCha8Rng) -> Result<f64, CliError> {
    let mut worst: f64 = 1.0;
    for _ in 0..20 {
        let input = StateVector::random(layout.rows(), rng).map_err(sim)?;
        let (out, _) = run_mbqc_state(layout, input.clone(), rng)?;
        let mut want = input;
        for g in gates {
            want.apply(g).map_err(sim)?;
        }
        worst = worst.min(fidelity(&out, &want).map_err(sim)?);
    }
    Ok(worst)
}

fn random_layout(rng: &mut ChaCha8Rng, rows: usize, layers: usize) -> Result<BrickworkLayout, CliError> {
    let mut l = BrickworkLayout::identity(rows, layers)?;
    for x in 1..=4 * layers {
        for y in 1..=rows {
            l.set_phi(Coord::new(x, y), Octant::new(rng.random_range(0..8)))?;
        }
    }
    Ok(l)
}

fn equivalence(r: &mut Report) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let cfg = RunConfig::default();
    let mut worst: f64 = 1.0;
    let mut encoded_worst: f64 = 1.0;
    for trial in 0..20u64 {
        let rows = 2 + trial as usize % 2;
        let layout = random_layout(&mut rng, rows, 1 + trial as usize % 2)?;
        let input = StateVector::random(rows, &mut rng).map_err(sim)?;
        let (want, _) = run_mbqc_state(&layout, input.clone(), &mut rng)?;
        let out = run_protocol(Variant::BfkBasic, &layout, Some(&input), &cfg, trial)?;
        if out.status != RunStatus::Success {
            r.check(&format!("trial {trial}"), false, format!("{:?}", out.status));
            continue;
        }
        worst = worst.min(fidelity(out.output.as_ref().expect("exact backend"), &want).map_err(sim)?);
        if trial < 5 {
            let base = run_protocol(Variant::BfkBasic, &layout, None, &cfg, trial)?;
            for variant in [Variant::Protocol1, Variant::Protocol2] {
                let out = run_protocol(variant, &layout, None, &cfg, trial)?;
                let f = fidelity(out.output.as_ref().expect("exact backend"), base.output.as_ref().expect("exact backend"))
                    .map_err(sim)?;
                encoded_worst = encoded_worst.min(f);
            }
        }
    }
    r.check("blind runs match plain MBQC on 20 random layouts", worst > 1.0 - TOL, format!("min fidelity {worst:.12}"));
    r.check("encoded protocols match the unencoded run", encoded_worst > 1.0 - TOL, format!("5 layouts, min fidelity {encoded_worst:.12}"));
    Ok(())
}

fn blindness(r: &mut Report) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cfg = RunConfig::tally();
    let mut samples = Vec::new();
    for seed in 0..10_000 {
        let layout = random_layout(&mut rng, 2, 1)?;
        let out = run_protocol(Variant::BfkBasic, &layout, None, &cfg, seed)?;
        samples.extend(delta_samples(&out.transcript, &layout));
    }
    let report = blindness_audit(&samples)?;
    print!("{}", report.to_text());
    r.check(
        "δ uniform for every (position, φ)",
        report.passed,
        format!("{} groups, min p = {:.4}, threshold {:.2e}", report.groups.len(), report.min_p_value(), report.per_group_threshold),
    );
    // The plug-in estimate sits near its bias under independence; allow three times that.
    let mi = report.mutual_information_bits;
    let bias = report.mutual_information_bias_bits;
    r.check("mutual information I(φ; δ) at the sampling floor", mi < 3.0 * bias, format!("{mi:.2e} bits (bias {bias:.2e})"));
    Ok(())
}
