//! Continued fractions of field phases.
//!
//! A phase `phi` with `phi / 2pi = q / p` makes the `p`-step walk
//! translation invariant; irrational phases are handled through their
//! convergents.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Result, WalkError};
use crate::field::FieldPhase;

/// Remainder, or distance between `x` and the current convergent, below
/// which the expansion is considered terminated.
pub const EXACT_THRESHOLD: f64 = 1e-12;

/// `a0 + 1/(a1 + 1/(a2 + ...))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFExpansion {
    pub terms: Vec<u64>,
    /// Set when the expansion terminated before `max_terms` was reached.
    pub exact: bool,
}

/// Continued-fraction expansion of `x` in `[0, 1)`.
pub fn expand(x: f64, max_terms: usize) -> CFExpansion {
    assert!(
        (0.0..1.0).contains(&x),
        "expand expects x in [0, 1), got {x}"
    );
    assert!(max_terms >= 1);
    let mut terms = Vec::with_capacity(max_terms);
    let mut value = x;
    let (mut h_prev, mut h) = (0.0f64, 1.0f64);
    let (mut k_prev, mut k) = (1.0f64, 0.0f64);
    loop {
        let mut a = value.floor();
        let mut rem = value - a;
        // a value sitting just below an integer is that integer
        if 1.0 - rem < EXACT_THRESHOLD {
            a += 1.0;
            rem = 0.0;
        }
        terms.push(a as u64);
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
        if rem < EXACT_THRESHOLD || (x - h / k).abs() < EXACT_THRESHOLD {
            return CFExpansion { terms, exact: true };
        }
        if terms.len() == max_terms {
            return CFExpansion {
                terms,
                exact: false,
            };
        }
        value = 1.0 / rem;
    }
}

/// Reduced fraction `q / p` of the expansion truncated to its first `depth` terms.
pub fn convergent(cf: &CFExpansion, depth: usize) -> Result<(u64, u64)> {
    if depth == 0 || depth > cf.terms.len() {
        return Err(WalkError::DepthOutOfRange {
            depth,
            len: cf.terms.len(),
        });
    }
    // h_n = a_n h_{n-1} + h_{n-2}, k_n = a_n k_{n-1} + k_{n-2}
    let (mut h_prev, mut h) = (1u64, cf.terms[0]);
    let (mut k_prev, mut k) = (0u64, 1u64);
    for &a in &cf.terms[1..depth] {
        (h_prev, h) = (h, a.saturating_mul(h).saturating_add(h_prev));
        (k_prev, k) = (k, a.saturating_mul(k).saturating_add(k_prev));
    }
    Ok((h, k))
}

/// All convergents of an expansion, shallowest first.
pub fn convergents(cf: &CFExpansion) -> Vec<(u64, u64)> {
    (1..=cf.terms.len())
        .map(|d| convergent(cf, d).expect("depth in range"))
        .collect()
}

/// Smallest-denominator convergent of `phi / 2pi` lying within `tolerance`
/// of it (tolerance measured in turns, i.e. in units of `2pi`).
///
/// Negative phases are folded into `[0, 2pi)`, which leaves `e^{i phi x}`
/// unchanged on the integer lattice.
pub fn phase_to_rational(phi: f64, tolerance: f64) -> Result<FieldPhase> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(WalkError::InvalidPhase(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    if !phi.is_finite() {
        return Err(WalkError::InvalidPhase(format!("{phi} is not finite")));
    }
    let turns = phi / TAU;
    let frac = turns - turns.floor();
    let frac = if frac >= 1.0 { 0.0 } else { frac };
    let cf = expand(frac, 64);
    let mut best = (0, 1);
    for (q, p) in convergents(&cf) {
        best = (q, p);
        if (frac - q as f64 / p as f64).abs() <= tolerance {
            break;
        }
    }
    FieldPhase::rational(best.0 as i64, best.1)
}
