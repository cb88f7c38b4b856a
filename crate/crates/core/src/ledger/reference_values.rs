//! Reference totals for the 10-bit adder on a 35 × 612 brickwork state, and a
//! checker that recomputes each one from the cost model.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{format_decimal, ratio_tables, Census, CostModel, CostVector, LedgerError, RatioTable, Reports};
use crate::compiler::GateTally;

pub const CENSUS: (usize, usize) = (35, 612);
pub const QUBITS: u64 = 85_715;
pub const BRICKS: u64 = 10_404;
pub const HALF_BRICKS: u64 = 612;

/// Decomposed adder: T, two-qubit Clifford, one-qubit Clifford.
pub const TARGET: (u64, u64, u64) = (441, 413, 144);

/// `(numerator, denominator)` per component.
type Exact = [(i64, i64); 4];

pub const FT_T: Exact = [(21, 1), (262, 1), (50, 1), (35, 1)];
pub const PHASE_SHIFT_AVG: Exact = [(21, 2), (131, 1), (121, 4), (35, 2)];
pub const ALICE_PREP_AVG: Exact = [(21, 2), (239, 1), (225, 4), (71, 2)];
pub const BRICK: Exact = [(84, 1), (1454, 1), (330, 1), (228, 1)];
pub const HALF_BRICK: Exact = [(42, 1), (720, 1), (165, 1), (114, 1)];
pub const BFK_BASIC_BOB: Exact = [(42_840, 1), (106_488, 1), (149_940, 1), (85_680, 1)];
pub const PROTOCOL1_ALICE: Exact = [(1_800_015, 2), (20_485_885, 1), (19_285_875, 4), (6_085_765, 2)];
pub const PROTOCOL1_BOB: Exact = [(899_640, 1), (15_568_056, 1), (3_534_300, 1), (2_441_880, 1)];
pub const PROTOCOL2_BOB_PREP: Exact = [(7_200_060, 1), (163_887_080, 1), (38_571_750, 1), (24_343_060, 1)];
pub const FT_CIRCUIT: Exact = [(9_261, 1), (118_433, 1), (23_058, 1), (15_435, 1)];

pub const TABLE1: [(&str, [i64; 3]); 5] = [
    ("FT circuit", [21, 287, 160]),
    ("BFK basic (Bob)", [97, 258, 1041]),
    ("Protocol 1 (Bob)", [2_040, 37_695, 24_544]),
    ("Protocol 1 (Alice)", [2_041, 49_603, 33_482]),
    ("BSA (Bob only)", [18_367, 434_516, 292_403]),
];
pub const TABLE2: [(&str, [i64; 4]); 3] = [
    ("Protocol 1 (Bob)", [97, 131, 153, 158]),
    ("Protocol 1 (Alice)", [97, 173, 209, 197]),
    ("BSA (Bob only)", [875, 1_515, 1_826, 1_735]),
];
pub const TABLE3: [(&str, [i64; 4]); 3] = [
    ("Protocol 1 (Bob)", [21, 146, 24, 29]),
    ("Protocol 1 (Alice)", [21, 192, 32, 36]),
    ("BSA (Bob only)", [189, 1_685, 281, 313]),
];

/// Transmitted physical qubits per brickwork qubit: unencoded, protocol 1, protocol 2.
pub const BANDWIDTH: [u64; 3] = [1, 7, 63];
/// Client buffer in physical qubits: full buffer, measure-and-discard.
pub const BUFFER: [u64; 2] = [56, 14];

fn exact(e: &Exact) -> CostVector {
    let q = |(n, d): (i64, i64)| Rational64::new(n, d);
    CostVector::new(q(e[0]), q(e[1]), q(e[2]), q(e[3]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

fn line(name: &str, expected: String, actual: String) -> CheckLine {
    CheckLine { ok: expected == actual, name: name.into(), expected, actual }
}

fn vector_text(c: &CostVector) -> String {
    format!("({})", c.display_parts().join("; "))
}

fn vector_line(name: &str, expected: &Exact, actual: Option<&CostVector>) -> CheckLine {
    line(name, vector_text(&exact(expected)), actual.map_or("missing".into(), vector_text))
}

fn cells_line(name: &str, expected: &[i64], actual: Option<&Vec<Option<i64>>>) -> CheckLine {
    let fmt = |v: &[Option<i64>]| v.iter().map(|c| super::format_cell(*c)).collect::<Vec<_>>().join(", ");
    let want: Vec<Option<i64>> = expected.iter().map(|&v| Some(v)).collect();
    line(name, fmt(&want), actual.map_or("missing".into(), |a| fmt(a)))
}

/// Recomputes every reference value from `model`.
pub fn check(model: &CostModel) -> Result<Vec<CheckLine>, LedgerError> {
    let census = Census::new(CENSUS.0, CENSUS.1)?;
    let target = GateTally { t_count: TARGET.0, cnot: TARGET.1, other_one_qubit: TARGET.2, ..GateTally::default() };
    let reports = Reports::build(model, &census, &target)?;
    let tables = ratio_tables(&reports, &target);
    Ok(compare(model, &census, &reports, &tables))
}

/// Diffs reports and tables built elsewhere (any census, any target) against
/// the reference values.
pub fn compare(model: &CostModel, census: &Census, reports: &Reports, tables: &[RatioTable; 3]) -> Vec<CheckLine> {
    let int = |v: u64| format_decimal(Rational64::from_integer(v as i64));
    let mut out = vec![
        line("census qubits", int(QUBITS), int(census.qubits)),
        line("census bricks", int(BRICKS), int(census.bricks)),
        line("census half-bricks", int(HALF_BRICKS), int(census.half_bricks)),
        vector_line("ft_t", &FT_T, Some(&model.ft_t)),
        vector_line("phase_shift_avg", &PHASE_SHIFT_AVG, Some(&model.phase_shift_avg())),
        vector_line("alice_prep_avg", &ALICE_PREP_AVG, Some(&model.alice_prep_avg())),
        vector_line("brick", &BRICK, Some(&model.brick_cost())),
        vector_line("half-brick", &HALF_BRICK, Some(&model.half_brick_cost())),
        vector_line("bfk_basic bob", &BFK_BASIC_BOB, reports.bfk_basic.party("bob")),
        vector_line("protocol1 alice", &PROTOCOL1_ALICE, reports.protocol1.party("alice")),
        vector_line("protocol1 bob", &PROTOCOL1_BOB, reports.protocol1.party("bob")),
        vector_line("protocol2 bob_prep", &PROTOCOL2_BOB_PREP, reports.protocol2.party("bob_prep")),
        vector_line("protocol2 bob_bqc", &PROTOCOL1_BOB, reports.protocol2.party("bob_bqc")),
        vector_line("ft_circuit", &FT_CIRCUIT, reports.ft_circuit.party("circuit")),
    ];
    let transmitted = |r: &super::Report| r.party("alice").map_or(0, |c| c.transmitted_physical_qubits);
    let sent = [transmitted(&reports.bfk_basic), transmitted(&reports.protocol1), transmitted(&reports.protocol2)];
    let expected_sent = BANDWIDTH.map(|k| k * QUBITS);
    for ((name, e), a) in ["bandwidth bfk_basic", "bandwidth protocol1", "bandwidth protocol2"].iter().zip(expected_sent).zip(sent) {
        out.push(line(name, int(e), int(a)));
    }
    out.push(line("buffer", format!("{}/{}", BUFFER[0], BUFFER[1]), format!("{}/{}", 8 * model.block, 2 * model.block)));
    let lookup = |t: usize, label: &str| tables[t].rows.iter().find(|(l, _)| l == label).map(|(_, c)| c);
    for (label, cells) in TABLE1 {
        out.push(cells_line(&format!("table 1 {label}"), &cells, lookup(0, label)));
    }
    for (label, cells) in TABLE2 {
        out.push(cells_line(&format!("table 2 {label}"), &cells, lookup(1, label)));
    }
    for (label, cells) in TABLE3 {
        out.push(cells_line(&format!("table 3 {label}"), &cells, lookup(2, label)));
    }
    out
}
