//! Interval positivity audit of an ML POVM.
//!
//! Every interval `Δ` of the support must satisfy `0 ≤ ∫_Δ (f_I ± f_z) ≤ 1`.
//! The audit checks seeded random intervals and, in addition, the exact
//! worst intervals on a fine cell grid (largest and smallest contiguous
//! cell sums).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::MlPovm;
use crate::quad;

pub const AUDIT_CELLS: usize = 4096;
pub const AUDIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityAudit {
    pub random_intervals: usize,
    /// Failing random intervals plus failing worst-case intervals.
    pub violations: usize,
    /// Smallest interval integral found.
    pub worst_lower: f64,
    /// Largest interval integral found.
    pub worst_upper: f64,
    pub passed: bool,
}

fn extreme_subarrays(cells: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut run_lo, mut run_hi) = (0.0f64, 0.0f64);
    for &c in cells {
        run_lo = c + run_lo.min(0.0);
        run_hi = c + run_hi.max(0.0);
        lo = lo.min(run_lo);
        hi = hi.max(run_hi);
    }
    (lo, hi)
}

pub fn audit_positivity(povm: &MlPovm, n_random: usize, seed: u64) -> PositivityAudit {
    let (a, b) = povm.prior.integration_support();
    let rate = 2.0 * povm.tau_c;
    let mut violations = 0;
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::NEG_INFINITY;
    let mut record = |v: f64, violations: &mut usize| {
        worst_lower = worst_lower.min(v);
        worst_upper = worst_upper.max(v);
        if !(-AUDIT_TOLERANCE..=1.0 + AUDIT_TOLERANCE).contains(&v) {
            *violations += 1;
        }
    };

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        let (u, v) = {
            let p: f64 = rng.random_range(a..b);
            let q: f64 = rng.random_range(a..b);
            (p.min(q), p.max(q))
        };
        let panels = (((v - u) * rate / PI).ceil() as usize + ((v - u) / povm.prior.sigma).ceil() as usize).max(2);
        let fi = quad::composite(u, v, panels, |x| povm.fi(x));
        let fz = quad::composite(u, v, panels, |x| povm.fz(x));
        record(fi + fz, &mut violations);
        record(fi - fz, &mut violations);
    }

    let h = (b - a) / AUDIT_CELLS as f64;
    let mut plus = Vec::with_capacity(AUDIT_CELLS);
    let mut minus = Vec::with_capacity(AUDIT_CELLS);
    for i in 0..AUDIT_CELLS {
        let lo = a + h * i as f64;
        let fi = quad::panel(lo, lo + h, |x| povm.fi(x));
        let fz = quad::panel(lo, lo + h, |x| povm.fz(x));
        plus.push(fi + fz);
        minus.push(fi - fz);
    }
    for cells in [&plus, &minus] {
        let (lo, hi) = extreme_subarrays(cells);
        record(lo, &mut violations);
        record(hi, &mut violations);
    }

    PositivityAudit {
        random_intervals: n_random,
        violations,
        worst_lower,
        worst_upper,
        passed: violations == 0,
    }
}
