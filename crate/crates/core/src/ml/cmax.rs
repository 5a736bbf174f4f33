//! Normalization constants `c_max` of the ML POVMs.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::prior::{sinc, Prior, PriorKind};
use crate::quad;

const SIN_VANISHES: f64 = 1e-14;

/// Constraints on the Gaussian `c`.
///
/// `c1` and `c2` come from the two inequalities on `[0, π/(2στ_c)]`
/// (lower and upper POVM bound); `pointwise` is `1/(√(2π)σ|sin 2g0τ_c|)`,
/// the exact limit from `f_I ≥ |f_z|`. `value` is the smallest of the three.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCmax {
    pub c1: f64,
    pub c2: f64,
    pub pointwise: f64,
    pub value: f64,
}

fn check_positive(prior: &Prior, tau_c: f64) -> Result<()> {
    if !(tau_c > 0.0 && tau_c.is_finite()) {
        return Err(Error::InvalidScenario(format!("tau_c must be > 0, got {tau_c}")));
    }
    if !(prior.sigma > 0.0) {
        return Err(Error::InvalidPrior("sigma must be > 0".into()));
    }
    Ok(())
}

/// `1/(√(2π)σ|sin 2g0τ_c|)`.
pub fn gaussian_cmax_pointwise(prior: &Prior, tau_c: f64) -> f64 {
    1.0 / ((2.0 * PI).sqrt() * prior.sigma * (2.0 * prior.g0 * tau_c).sin().abs())
}

pub fn gaussian_cmax(prior: &Prior, tau_c: f64) -> Result<GaussianCmax> {
    check_positive(prior, tau_c)?;
    if prior.kind != PriorKind::Gaussian {
        return Err(Error::UnsupportedCombination(
            "gaussian_cmax needs a Gaussian prior".into(),
        ));
    }
    let sin = (2.0 * prior.g0 * tau_c).sin();
    if sin.abs() <= SIN_VANISHES {
        return Err(Error::SinVanishes);
    }
    let st = prior.sigma * tau_c;
    // beyond x = 40 the Gaussian weight underflows
    let upper = (PI / (2.0 * st)).min(40.0);
    let panels = (upper * 2.0 * st / PI).ceil().max(4.0) as usize;
    let i0 = quad::adaptive(0.0, upper, 1e-15, panels, |x| (-0.5 * x * x).exp() / TAU.sqrt());
    let i1 = quad::adaptive(0.0, upper, 1e-15, panels, |x| {
        (-0.5 * x * x).exp() * (2.0 * st * x).sin()
    });
    let y = prior.sigma * sin.abs();
    let c1 = i0 / (y * i1);
    let c2 = (1.0 - i0) / (y * i1);
    let pointwise = gaussian_cmax_pointwise(prior, tau_c);
    Ok(GaussianCmax {
        c1,
        c2,
        pointwise,
        value: c1.min(c2).min(pointwise),
    })
}

/// Range `[min, max]` of `cos θ` over `θ ∈ [lo, hi]`.
fn cos_range(lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (lo.cos(), hi.cos());
    let mut min = a.min(b);
    let mut max = a.max(b);
    if ((hi / TAU).floor() * TAU) >= lo {
        max = 1.0;
    }
    if (((hi - PI) / TAU).floor() * TAU + PI) >= lo {
        min = -1.0;
    }
    (min, max)
}

/// Uniform-prior `c_max` from pointwise positivity `f_I ≥ |f_z|`:
/// `1 / (2√3σ · max_x |cos 2xτ_c − sinc(2√3στ_c) cos 2g0τ_c|)`.
pub fn uniform_cmax(prior: &Prior, tau_c: f64) -> Result<f64> {
    check_positive(prior, tau_c)?;
    if prior.kind != PriorKind::Uniform {
        return Err(Error::UnsupportedCombination(
            "uniform_cmax needs a uniform prior".into(),
        ));
    }
    let h = prior.uniform_half_width();
    let offset = sinc(2.0 * h * tau_c) * (2.0 * prior.g0 * tau_c).cos();
    let (lo, hi) = cos_range(2.0 * tau_c * (prior.g0 - h), 2.0 * tau_c * (prior.g0 + h));
    let spread = (hi - offset).abs().max((lo - offset).abs());
    if spread == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (2.0 * h * spread))
}

/// Uniform-prior `c_max` by minimax over intervals.
///
/// An interval of relative length `x ∈ [0, 1]` and centre parameter `y`
/// integrates `f_I ± f_z` to `x ± (c/τ_c)·k(x, y)` with
/// `k = sin(xs)cos(yt) − x sin(s)cos(t)`, `s = 2√3στ_c`, `t = 2g0τ_c`.
/// The bound is `c ≤ τ_c · inf_x min(x, 1 − x) / max_y |k|`; the `y`
/// extremes are taken analytically and `x` is scanned on a 400-point grid
/// and refined by golden-section search.
pub fn uniform_cmax_minimax(prior: &Prior, tau_c: f64) -> Result<f64> {
    check_positive(prior, tau_c)?;
    let s = 2.0 * prior.uniform_half_width() * tau_c;
    let t = 2.0 * prior.g0 * tau_c;
    let fixed = s.sin() * t.cos();
    let ratio = |x: f64| -> f64 {
        let spread = s * (1.0 - x);
        let (lo, hi) = cos_range(t - spread, t + spread);
        let sx = (x * s).sin();
        let k = (sx * hi - x * fixed).abs().max((sx * lo - x * fixed).abs());
        let room = x.min(1.0 - x);
        if k == 0.0 {
            f64::INFINITY
        } else {
            room / k
        }
    };
    let at_zero = {
        let (lo, hi) = cos_range(t - s, t + s);
        let k = (s * hi - fixed).abs().max((s * lo - fixed).abs());
        1.0 / k
    };
    let at_one = 1.0 / ((s.sin() - s * s.cos()).abs() * t.cos().abs() + (s * s.sin() * t.sin()).abs());

    let n = 400;
    let mut best = (0usize, f64::INFINITY);
    for i in 1..n {
        let r = ratio(i as f64 / n as f64);
        if r < best.1 {
            best = (i, r);
        }
    }
    let mut inf = at_zero.min(at_one).min(best.1);
    if best.1.is_finite() {
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut a = (best.0 - 1) as f64 / n as f64;
        let mut b = (best.0 + 1) as f64 / n as f64;
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (ratio(x1), ratio(x2));
        while b - a > 1e-12 {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = ratio(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = ratio(x2);
            }
        }
        inf = inf.min(f1).min(f2);
    }
    Ok(tau_c * inf)
}
