//! Circle-valued phases with exact rational-turn storage.

use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Tolerance for comparing phases stored as doubles.
pub const PHASE_TOL: f64 = 1e-10;

/// A value in the circle group. `Turn(q/n)` stands for `exp(2πi q/n)` and is
/// kept reduced in `[0, 1)`; `Unit` holds an arbitrary unit-modulus double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    Turn(Ratio<i64>),
    Unit(Complex64),
}

fn reduce_turn(r: Ratio<i64>) -> Ratio<i64> {
    let fl = r.floor();
    r - fl
}

impl Phase {
    pub const ONE: Phase = Phase::Turn(Ratio::new_raw(0, 1));

    pub fn turn(q: i64, n: i64) -> Phase {
        Phase::Turn(reduce_turn(Ratio::new(q, n)))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Phase {
        Phase::Turn(reduce_turn(r))
    }

    /// A double phase; the value is renormalized onto the circle.
    pub fn from_complex(z: Complex64) -> Phase {
        Phase::Unit(z / z.norm())
    }

    /// `exp(2πi t)` for a real number of turns, stored as a double.
    pub fn from_turns_f64(t: f64) -> Phase {
        let a = 2.0 * std::f64::consts::PI * t;
        Phase::Unit(Complex64::new(a.cos(), a.sin()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Phase::Turn(_))
    }

    pub fn as_turn(&self) -> Option<Ratio<i64>> {
        match self {
            Phase::Turn(r) => Some(*r),
            Phase::Unit(_) => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::Unit(z) => z,
            Phase::Turn(r) => turn_to_complex(r),
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        match (self, other) {
            (Phase::Turn(a), Phase::Turn(b)) => Phase::Turn(reduce_turn(a + b)),
            (a, b) => Phase::Unit(a.to_complex() * b.to_complex()),
        }
    }

    pub fn conj(self) -> Phase {
        match self {
            Phase::Turn(a) => Phase::Turn(reduce_turn(-a)),
            Phase::Unit(z) => Phase::Unit(z.conj()),
        }
    }

    pub fn div(self, other: Phase) -> Phase {
        self.mul(other.conj())
    }

    /// Exact comparison for two rational turns, `PHASE_TOL` otherwise.
    pub fn approx_eq(self, other: Phase) -> bool {
        match (self, other) {
            (Phase::Turn(a), Phase::Turn(b)) => a == b,
            (a, b) => (a.to_complex() - b.to_complex()).norm() <= PHASE_TOL,
        }
    }

    pub fn deviation(self, other: Phase) -> f64 {
        (self.to_complex() - other.to_complex()).norm()
    }

    pub fn is_one(self) -> bool {
        self.approx_eq(Phase::ONE)
    }

    /// Parses `turn q/n`, `q/n` or an integer as an exact turn, and a decimal
    /// number of turns as a double.
    pub fn parse(text: &str) -> Result<Phase, String> {
        let t = text.trim();
        let body = t.strip_prefix("turn").map(str::trim).unwrap_or(t);
        if let Some((q, n)) = body.split_once('/') {
            let q: i64 = q.trim().parse().map_err(|_| format!("bad phase numerator in `{t}`"))?;
            let n: i64 = n.trim().parse().map_err(|_| format!("bad phase denominator in `{t}`"))?;
            if n == 0 {
                return Err(format!("zero denominator in `{t}`"));
            }
            return Ok(Phase::turn(q, n));
        }
        if let Ok(q) = body.parse::<i64>() {
            return Ok(Phase::turn(q, 1));
        }
        match body.parse::<f64>() {
            Ok(x) if x.is_finite() && body.len() == t.len() => Ok(Phase::from_turns_f64(x)),
            _ => Err(format!("`{t}` is not a phase; expected `turn q/n`, `q/n` or a decimal")),
        }
    }

    /// For a rational turn `q/d` with `d | n`, the residue `k` with value `exp(2πi k/n)`.
    pub fn residue_mod(self, n: u32) -> Option<u32> {
        let r = self.as_turn()?;
        let scaled = r * Ratio::from_integer(n as i64);
        if !scaled.is_integer() {
            return None;
        }
        Some(scaled.to_integer().rem_euclid(n as i64) as u32)
    }
}

/// `exp(2πi r)` with exact values on quarter turns.
pub fn turn_to_complex(r: Ratio<i64>) -> Complex64 {
    let r = reduce_turn(r);
    if r.is_zero() {
        return Complex64::one();
    }
    match (*r.numer(), *r.denom()) {
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        (q, n) => {
            let a = 2.0 * std::f64::consts::PI * (q as f64) / (n as f64);
            Complex64::new(a.cos(), a.sin())
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Turn(r) => write!(f, "turn {}/{}", r.numer(), r.denom()),
            Phase::Unit(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turns_stay_exact() {
        let a = Phase::turn(1, 3);
        let b = Phase::turn(5, 6);
        assert_eq!(a.mul(b), Phase::turn(1, 6));
        assert_eq!(a.conj(), Phase::turn(2, 3));
        assert!(a.mul(a.conj()).is_one());
        assert!(a.mul(b).is_exact());
    }

    #[test]
    fn quarter_turns_are_exact_complex() {
        assert_eq!(Phase::turn(1, 2).to_complex(), Complex64::new(-1.0, 0.0));
        assert_eq!(Phase::turn(-1, 4).to_complex(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn parsing() {
        assert_eq!(Phase::parse("turn 3/6"), Ok(Phase::turn(1, 2)));
        assert_eq!(Phase::parse("-1/4"), Ok(Phase::turn(3, 4)));
        assert_eq!(Phase::parse("2"), Ok(Phase::ONE));
        assert!(!Phase::parse("0.25").unwrap().is_exact());
        assert!(Phase::parse("turn 0.25").is_err());
        assert!(Phase::parse("1/0").is_err());
        assert!(Phase::parse("x").is_err());
    }

    #[test]
    fn residues() {
        assert_eq!(Phase::turn(1, 2).residue_mod(4), Some(2));
        assert_eq!(Phase::turn(1, 4).residue_mod(2), None);
        assert_eq!(Phase::from_turns_f64(0.5).residue_mod(2), None);
    }

    #[test]
    fn mixed_products_fall_back_to_doubles() {
        let p = Phase::turn(1, 4).mul(Phase::from_turns_f64(0.25));
        assert!(!p.is_exact());
        assert!(p.approx_eq(Phase::turn(1, 2)));
    }
}
