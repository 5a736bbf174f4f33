use serde::{Deserialize, Serialize};

use crate::dynamics::{FieldState, Scenario};
use crate::error::Result;
use crate::mmse;
use crate::prior::Prior;

/// Search window for `g0 τ_c`.
pub const TAU_STAR_WINDOW: (f64, f64) = (0.05, 3.0);
pub const TAU_STAR_COARSE_POINTS: usize = 300;
/// Absolute tolerance on `g0 τ*`.
pub const TAU_STAR_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauStar {
    pub tau_c: f64,
    pub c_min: f64,
}

/// Interaction time minimizing `c_min`, from a coarse scan refined by
/// golden-section search.
pub fn find_tau_star(prior: &Prior, scenario: &Scenario, field: &FieldState) -> Result<TauStar> {
    let g0 = prior.g0;
    let cost = |x: f64| -> Result<f64> {
        let s = scenario.with_tau_c(x / g0);
        Ok(mmse::solve(prior, &s, field)?.c_min)
    };
    let (lo, hi) = TAU_STAR_WINDOW;
    let n = TAU_STAR_COARSE_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..n {
        let c = cost(lo + step * i as f64)?;
        if c < best.1 {
            best = (i, c);
        }
    }
    let centre = lo + step * best.0 as f64;
    let mut a = (centre - step).max(lo);
    let mut b = (centre + step).min(hi);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = cost(x1)?;
    let mut f2 = cost(x2)?;
    while b - a > TAU_STAR_TOLERANCE {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = cost(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = cost(x2)?;
        }
    }
    let (x, c) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let (x, c) = if best.1 < c { (centre, best.1) } else { (x, c) };
    Ok(TauStar {
        tau_c: x / g0,
        c_min: c,
    })
}
