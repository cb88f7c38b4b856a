use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An angle `k·π/4` with `k` taken mod 8.
///
/// Every preparation, measurement and correction angle used by the brickwork
/// protocols lives on this grid, so all angle arithmetic is exact integer
/// arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Octant(u8);

impl Octant {
    pub const ZERO: Octant = Octant(0);
    /// π/4
    pub const QUARTER: Octant = Octant(1);
    /// π/2
    pub const HALF: Octant = Octant(2);
    /// π
    pub const PI: Octant = Octant(4);

    /// All eight octants in increasing order.
    pub const ALL: [Octant; 8] = [
        Octant(0),
        Octant(1),
        Octant(2),
        Octant(3),
        Octant(4),
        Octant(5),
        Octant(6),
        Octant(7),
    ];

    pub const fn new(k: i64) -> Self {
        Octant(k.rem_euclid(8) as u8)
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * std::f64::consts::FRAC_PI_4
    }

    /// `e^{ikπ/4}`
    pub fn phase(self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians())
    }

    /// Adds π when `bit` is set.
    pub fn plus_pi_if(self, bit: bool) -> Self {
        if bit {
            self + Octant::PI
        } else {
            self
        }
    }

    /// Negates the angle when `bit` is set.
    pub fn negate_if(self, bit: bool) -> Self {
        if bit {
            -self
        } else {
            self
        }
    }

    /// True for the odd octants, the ones that need a T gate.
    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }
}

impl From<Octant> for u8 {
    fn from(o: Octant) -> u8 {
        o.0
    }
}

impl TryFrom<u8> for Octant {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        if v < 8 {
            Ok(Octant(v))
        } else {
            Err(format!("octant index {v} out of range 0..8"))
        }
    }
}

impl Add for Octant {
    type Output = Octant;
    fn add(self, rhs: Octant) -> Octant {
        Octant((self.0 + rhs.0) % 8)
    }
}

impl AddAssign for Octant {
    fn add_assign(&mut self, rhs: Octant) {
        *self = *self + rhs;
    }
}

impl Sub for Octant {
    type Output = Octant;
    fn sub(self, rhs: Octant) -> Octant {
        self + (-rhs)
    }
}

impl Neg for Octant {
    type Output = Octant;
    fn neg(self) -> Octant {
        Octant((8 - self.0) % 8)
    }
}

impl fmt::Display for Octant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            4 => write!(f, "π"),
            k => write!(f, "{k}π/4"),
        }
    }
}
