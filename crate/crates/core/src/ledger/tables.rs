use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{format_decimal, CostVector, Reports};
use crate::compiler::GateTally;

/// One ratio table: each cell is a rounded multiple of the baseline row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioTable {
    pub title: String,
    pub columns: Vec<String>,
    /// `None` marks a zero baseline.
    pub rows: Vec<(String, Vec<Option<i64>>)>,
}

/// `num / den` rounded half away from zero.
pub fn ratio_cell(num: Rational64, den: Rational64) -> Option<i64> {
    if den.is_zero() {
        None
    } else {
        Some((num / den).round().to_integer())
    }
}

pub fn format_cell(cell: Option<i64>) -> String {
    match cell {
        Some(v) => format!("{}x", format_decimal(Rational64::from_integer(v))),
        None => "n/a".into(),
    }
}

const THREE: [&str; 3] = ["T gates", "2-qubit gates", "1-qubit gates"];
const FOUR: [&str; 4] = ["T gates", "2-qubit gates", "1-qubit gates", "measurements"];

fn row(label: &str, cost: &CostVector, base: &CostVector, width: usize) -> (String, Vec<Option<i64>>) {
    let cells = cost.components().iter().zip(base.components()).take(width).map(|(n, d)| ratio_cell(*n, d)).collect();
    (label.to_string(), cells)
}

fn party<'a>(r: &'a super::Report, name: &str) -> &'a CostVector {
    r.party(name).unwrap_or_else(|| panic!("{} report has no `{name}` entry", r.protocol))
}

/// Three comparisons: against the plain target circuit, against
/// its fault-tolerant version, and against the unencoded brickwork protocol.
pub fn ratio_tables(reports: &Reports, target: &GateTally) -> [RatioTable; 3] {
    let base1 = CostVector::ints(target.t_count as i64, target.two_qubit_clifford() as i64, target.one_qubit_clifford() as i64, 0);
    let ft = party(&reports.ft_circuit, "circuit");
    let basic = party(&reports.bfk_basic, "bob");
    let p1_bob = party(&reports.protocol1, "bob");
    let p1_alice = party(&reports.protocol1, "alice");
    let bsa = party(&reports.protocol2, "bob");
    let fault_tolerant_rows = |base: &CostVector| {
        vec![
            row("Protocol 1 (Bob)", p1_bob, base, 4),
            row("Protocol 1 (Alice)", p1_alice, base, 4),
            row("BSA (Bob only)", bsa, base, 4),
        ]
    };
    [
        RatioTable {
            title: "vs target circuit".into(),
            columns: THREE.map(String::from).to_vec(),
            rows: vec![
                row("FT circuit", ft, &base1, 3),
                row("BFK basic (Bob)", basic, &base1, 3),
                row("Protocol 1 (Bob)", p1_bob, &base1, 3),
                row("Protocol 1 (Alice)", p1_alice, &base1, 3),
                row("BSA (Bob only)", bsa, &base1, 3),
            ],
        },
        RatioTable {
            title: "vs FT circuit".into(),
            columns: FOUR.map(String::from).to_vec(),
            rows: fault_tolerant_rows(ft),
        },
        RatioTable {
            title: "vs unencoded BFK".into(),
            columns: FOUR.map(String::from).to_vec(),
            rows: fault_tolerant_rows(basic),
        },
    ]
}

impl RatioTable {
    pub fn cell(&self, row: &str, column: usize) -> Option<Option<i64>> {
        self.rows.iter().find(|(l, _)| l == row).and_then(|(_, c)| c.get(column).copied())
    }

    pub fn to_text(&self) -> String {
        let label_w = self.rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(5);
        let mut s = format!("{}\n{:<label_w$}", self.title, "");
        for c in &self.columns {
            s += &format!(" {:>14}", c);
        }
        s.push('\n');
        for (label, cells) in &self.rows {
            s += &format!("{label:<label_w$}");
            for c in cells {
                s += &format!(" {:>14}", format_cell(*c));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("row,{}\n", self.columns.join(","));
        for (label, cells) in &self.rows {
            let cells: Vec<String> = cells.iter().map(|c| c.map_or("n/a".into(), |v| v.to_string())).collect();
            s += &format!("{label},{}\n", cells.join(","));
        }
        s
    }
}
