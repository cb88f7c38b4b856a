use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::steane::PhysicalTally;

/// Operation counts in the four ledger categories, as exact rationals, plus
/// the physical qubits crossing the quantum channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostVector {
    #[serde(with = "decimal")]
    pub t_gates: Rational64,
    #[serde(with = "decimal")]
    pub two_qubit: Rational64,
    #[serde(with = "decimal")]
    pub one_qubit: Rational64,
    #[serde(with = "decimal")]
    pub measurements: Rational64,
    pub transmitted_physical_qubits: u64,
}

impl Default for CostVector {
    fn default() -> Self {
        CostVector::ZERO
    }
}

const fn int(v: i64) -> Rational64 {
    Rational64::new_raw(v, 1)
}

impl CostVector {
    pub const ZERO: CostVector = CostVector::ints(0, 0, 0, 0);

    pub const fn ints(t: i64, two: i64, one: i64, meas: i64) -> Self {
        CostVector { t_gates: int(t), two_qubit: int(two), one_qubit: int(one), measurements: int(meas), transmitted_physical_qubits: 0 }
    }

    pub fn new(t: Rational64, two: Rational64, one: Rational64, meas: Rational64) -> Self {
        CostVector { t_gates: t, two_qubit: two, one_qubit: one, measurements: meas, transmitted_physical_qubits: 0 }
    }

    pub fn with_transmitted(mut self, qubits: u64) -> Self {
        self.transmitted_physical_qubits = qubits;
        self
    }

    pub fn components(&self) -> [Rational64; 4] {
        [self.t_gates, self.two_qubit, self.one_qubit, self.measurements]
    }

    pub fn scale(&self, k: Rational64) -> CostVector {
        CostVector {
            t_gates: self.t_gates * k,
            two_qubit: self.two_qubit * k,
            one_qubit: self.one_qubit * k,
            measurements: self.measurements * k,
            transmitted_physical_qubits: self.transmitted_physical_qubits,
        }
    }

    pub fn times(&self, k: u64) -> CostVector {
        self.scale(int(k as i64))
    }

    pub fn from_tally(t: &PhysicalTally) -> CostVector {
        CostVector::ints(t.t_gates as i64, t.two_qubit as i64, t.one_qubit as i64, t.measurements as i64)
    }

    /// Gate counts as four decimal strings with thousands separators.
    pub fn display_parts(&self) -> [String; 4] {
        self.components().map(format_decimal)
    }
}

impl Add for CostVector {
    type Output = CostVector;
    fn add(self, o: CostVector) -> CostVector {
        CostVector {
            t_gates: self.t_gates + o.t_gates,
            two_qubit: self.two_qubit + o.two_qubit,
            one_qubit: self.one_qubit + o.one_qubit,
            measurements: self.measurements + o.measurements,
            transmitted_physical_qubits: self.transmitted_physical_qubits + o.transmitted_physical_qubits,
        }
    }
}

impl AddAssign for CostVector {
    fn add_assign(&mut self, o: CostVector) {
        *self = *self + o;
    }
}

impl Mul<u64> for CostVector {
    type Output = CostVector;
    fn mul(self, k: u64) -> CostVector {
        self.times(k)
    }
}

impl Mul<Rational64> for CostVector {
    type Output = CostVector;
    fn mul(self, k: Rational64) -> CostVector {
        self.scale(k)
    }
}

impl Sum for CostVector {
    fn sum<I: Iterator<Item = CostVector>>(iter: I) -> CostVector {
        iter.fold(CostVector::ZERO, |a, b| a + b)
    }
}

fn group_thousands(digits: &str) -> String {
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// Exact decimal with thousands separators (`4,821,468.75`). Values whose
/// denominator has a prime factor other than 2 or 5 print as `p/q`.
pub fn format_decimal(q: Rational64) -> String {
    let mut d = *q.denom();
    while d % 2 == 0 {
        d /= 2;
    }
    while d % 5 == 0 {
        d /= 5;
    }
    if d != 1 {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let a = q.abs();
    let whole = a.trunc().to_integer();
    let mut frac = a.fract();
    let mut s = format!("{sign}{}", group_thousands(&whole.to_string()));
    if !frac.is_zero() {
        s.push('.');
        while !frac.is_zero() {
            frac *= int(10);
            let digit = frac.trunc().to_integer();
            s.push(char::from(b'0' + digit as u8));
            frac = frac.fract();
        }
    }
    s
}

/// Inverse of [`format_decimal`]; also accepts plain integers and `p/q`.
pub fn parse_decimal(s: &str) -> Result<Rational64, String> {
    let clean: String = s.trim().chars().filter(|c| *c != ',').collect();
    if let Some((p, q)) = clean.split_once('/') {
        let p: i64 = p.parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let q: i64 = q.parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if q == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational64::new(p, q));
    }
    let (neg, body) = match clean.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, clean.as_str()),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() || !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("not a decimal: `{s}`"));
    }
    let digits: i64 = format!("{whole}{frac}").parse().map_err(|_| format!("out of range: `{s}`"))?;
    let v = Rational64::new(digits, 10i64.pow(frac.len() as u32));
    Ok(if neg { -v } else { v })
}

/// Serde adapter writing rationals as decimal strings.
pub(crate) mod decimal {
    use num_rational::Rational64;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_decimal(*q).replace(',', ""))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_decimal(&s).map_err(D::Error::custom)
    }
}
