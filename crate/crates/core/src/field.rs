//! Electric phase per lattice axis.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Result, WalkError};

/// Position-linear phase `phi` picked up per step, `e^{i phi x}`.
///
/// The rational form stores `phi = 2 pi q / p` exactly and evaluates the
/// phase from a table of `p`-th roots of unity, so long runs do not drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldPhase {
    Rational { q: i64, p: u64 },
    Real { value: f64 },
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Largest denominator for which the roots-of-unity table is materialized.
const ROOT_TABLE_MAX: u64 = 1 << 16;

impl FieldPhase {
    pub const ZERO: FieldPhase = FieldPhase::Rational { q: 0, p: 1 };

    /// `2 pi q / p`, reduced to lowest terms.
    pub fn rational(q: i64, p: u64) -> Result<Self> {
        if p == 0 {
            return Err(WalkError::InvalidPhase(
                "denominator must be positive".into(),
            ));
        }
        let g = gcd(q.unsigned_abs(), p).max(1);
        Ok(FieldPhase::Rational {
            q: q / g as i64,
            p: p / g,
        })
    }

    pub fn real(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(WalkError::InvalidPhase(format!("{value} is not finite")));
        }
        Ok(FieldPhase::Real { value })
    }

    /// Phase in radians.
    pub fn radians(&self) -> f64 {
        match *self {
            FieldPhase::Rational { q, p } => TAU * q as f64 / p as f64,
            FieldPhase::Real { value } => value,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            FieldPhase::Rational { q, .. } => q == 0,
            FieldPhase::Real { value } => value == 0.0,
        }
    }

    /// The same field with opposite sign.
    pub fn negated(&self) -> Self {
        match *self {
            FieldPhase::Rational { q, p } => FieldPhase::Rational { q: -q, p },
            FieldPhase::Real { value } => FieldPhase::Real { value: -value },
        }
    }

    /// Scales the phase by an integer factor (used for the doubled-field
    /// correspondence between walks).
    pub fn scaled(&self, factor: i64) -> Self {
        match *self {
            FieldPhase::Rational { q, p } => {
                FieldPhase::rational(q * factor, p).expect("denominator unchanged")
            }
            FieldPhase::Real { value } => FieldPhase::Real {
                value: value * factor as f64,
            },
        }
    }

    /// `e^{i phi x}` for every `x` in `lo..=hi`.
    pub fn phases(&self, lo: i64, hi: i64) -> Vec<C64> {
        if hi < lo {
            return Vec::new();
        }
        match *self {
            FieldPhase::Rational { q, p } => {
                let p_i = p as i128;
                let residue = |x: i64| ((q as i128 % p_i) * (x as i128 % p_i)).rem_euclid(p_i);
                if p <= ROOT_TABLE_MAX {
                    let table: Vec<C64> = (0..p)
                        .map(|j| C64::from_polar(1.0, TAU * j as f64 / p as f64))
                        .collect();
                    (lo..=hi).map(|x| table[residue(x) as usize]).collect()
                } else {
                    (lo..=hi)
                        .map(|x| C64::from_polar(1.0, TAU * residue(x) as f64 / p as f64))
                        .collect()
                }
            }
            FieldPhase::Real { value } => (lo..=hi)
                .map(|x| C64::from_polar(1.0, value * x as f64))
                .collect(),
        }
    }
}

impl Default for FieldPhase {
    fn default() -> Self {
        FieldPhase::ZERO
    }
}

impl fmt::Display for FieldPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FieldPhase::Rational { q, p } => write!(f, "2pi*{q}/{p}"),
            FieldPhase::Real { value } => write!(f, "{value:.17e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_reduced() {
        assert_eq!(
            FieldPhase::rational(4, 240).unwrap(),
            FieldPhase::Rational { q: 1, p: 60 }
        );
        assert_eq!(
            FieldPhase::rational(-6, 4).unwrap(),
            FieldPhase::Rational { q: -3, p: 2 }
        );
        assert_eq!(FieldPhase::rational(0, 7).unwrap(), FieldPhase::ZERO);
        assert!(FieldPhase::rational(1, 0).is_err());
    }

    #[test]
    fn real_rejects_nan() {
        assert!(FieldPhase::real(f64::NAN).is_err());
        assert!(FieldPhase::real(f64::INFINITY).is_err());
    }

    #[test]
    fn table_matches_direct_exponential() {
        let phi = FieldPhase::rational(7, 120).unwrap();
        let direct = FieldPhase::real(phi.radians()).unwrap();
        let a = phi.phases(-500, 500);
        let b = direct.phases(-500, 500);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn negated_phase_cancels() {
        for phi in [
            FieldPhase::rational(3, 7).unwrap(),
            FieldPhase::real(0.123).unwrap(),
        ] {
            let a = phi.phases(-40, 40);
            let b = phi.negated().phases(-40, 40);
            for (x, y) in a.iter().zip(&b) {
                assert!((x * y - C64::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn display_round_trips_rational() {
        assert_eq!(
            FieldPhase::rational(1, 120).unwrap().to_string(),
            "2pi*1/120"
        );
    }
}
