//! Maximum-likelihood POVMs for the resonant vacuum case.
//!
//! The POVM density is `dΠ(g̃) = [[f_I + f_z, 0], [0, f_I − f_z]] dg̃`. For a
//! true coupling `g` the estimate density is
//! `p(g̃|g) = f_I(g̃) + f_z(g̃)·(2cos²(gτ_c)e^{−γτ_f} − 1)`.

mod audit;
mod cmax;
mod hermite;

pub use audit::{audit_positivity, PositivityAudit, AUDIT_CELLS, AUDIT_TOLERANCE};
pub use cmax::{gaussian_cmax, gaussian_cmax_pointwise, uniform_cmax, uniform_cmax_minimax, GaussianCmax};
pub use hermite::{hermite_functions, HermiteExpansion, DEFAULT_BASIS_SIZE};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::prior::{Prior, PriorKind, QuadratureRule, DEFAULT_POINTS};

/// Optimal ML measurement for one prior and interaction time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlPovm {
    pub prior: Prior,
    pub tau_c: f64,
    pub gamma_tau_f: f64,
    /// Normalization constant; `+∞` when `f_z` is identically zero.
    pub c_max: f64,
    /// Scale of `f_z`: `c·sin(2g0τ_c)` (Gaussian) or `c` (uniform); zero
    /// when `f_z ≡ 0`.
    fz_amplitude: f64,
    /// Support average of `cos(2xτ_c)` subtracted in the uniform `f_z`.
    fz_offset: f64,
}

impl MlPovm {
    pub fn fi(&self, x: f64) -> f64 {
        self.prior.density(x)
    }

    pub fn fz(&self, x: f64) -> f64 {
        if self.fz_amplitude == 0.0 {
            return 0.0;
        }
        let p = &self.prior;
        match p.kind {
            PriorKind::Gaussian => {
                let u = x - p.g0;
                -self.fz_amplitude * (2.0 * self.tau_c * u).sin() * (-0.5 * u * u / (p.sigma * p.sigma)).exp()
            }
            PriorKind::Uniform => {
                if p.density(x) == 0.0 {
                    0.0
                } else {
                    self.fz_amplitude * ((2.0 * x * self.tau_c).cos() - self.fz_offset)
                }
            }
        }
    }

    /// Whether `f_z` vanishes identically.
    pub fn is_uninformative(&self) -> bool {
        self.fz_amplitude == 0.0
    }

    /// The constant actually multiplying `f_z` (zero when uninformative).
    pub fn effective_c(&self) -> f64 {
        if self.is_uninformative() {
            0.0
        } else {
            self.c_max
        }
    }

    /// The same POVM family with `c` replaced by `c`.
    pub fn with_c(&self, c: f64) -> MlPovm {
        let mut out = *self;
        out.c_max = c;
        out.fz_amplitude = match self.prior.kind {
            PriorKind::Gaussian => c * (2.0 * self.prior.g0 * self.tau_c).sin(),
            PriorKind::Uniform => c,
        };
        if self.is_uninformative() {
            out.fz_amplitude = 0.0;
        }
        out
    }

    pub fn with_flight_decay(&self, gamma_tau_f: f64) -> MlPovm {
        MlPovm { gamma_tau_f, ..*self }
    }

    /// `2cos²(gτ_c)e^{−γτ_f} − 1 = ρ_ee − ρ_gg`.
    pub fn inversion(&self, g: f64) -> f64 {
        2.0 * (g * self.tau_c).cos().powi(2) * (-self.gamma_tau_f).exp() - 1.0
    }

    /// Rule over the integration support resolving `f_z`.
    pub fn rule(&self) -> QuadratureRule {
        self.prior.quadrature_resolving(DEFAULT_POINTS, 2.0 * self.tau_c)
    }
}

/// ML POVM for a Gaussian prior. When `sin(2g0τ_c)` vanishes, `f_z ≡ 0`
/// and `c_max` is reported as `+∞`.
pub fn gaussian_ml_povm(prior: &Prior, tau_c: f64, gamma_tau_f: f64) -> Result<MlPovm> {
    if prior.kind != PriorKind::Gaussian {
        return Err(Error::UnsupportedCombination(
            "gaussian_ml_povm needs a Gaussian prior".into(),
        ));
    }
    let (c_max, amplitude) = match gaussian_cmax(prior, tau_c) {
        Ok(c) => (c.value, c.value * (2.0 * prior.g0 * tau_c).sin()),
        Err(Error::SinVanishes) => (f64::INFINITY, 0.0),
        Err(e) => return Err(e),
    };
    Ok(MlPovm {
        prior: *prior,
        tau_c,
        gamma_tau_f,
        c_max,
        fz_amplitude: amplitude,
        fz_offset: 0.0,
    })
}

/// ML POVM for a uniform prior.
pub fn uniform_ml_povm(prior: &Prior, tau_c: f64, gamma_tau_f: f64) -> Result<MlPovm> {
    if prior.kind != PriorKind::Uniform {
        return Err(Error::UnsupportedCombination(
            "uniform_ml_povm needs a uniform prior".into(),
        ));
    }
    let c_max = uniform_cmax(prior, tau_c)?;
    let s = 2.0 * prior.uniform_half_width() * tau_c;
    let offset = crate::prior::sinc(s) * (2.0 * prior.g0 * tau_c).cos();
    Ok(MlPovm {
        prior: *prior,
        tau_c,
        gamma_tau_f,
        c_max,
        fz_amplitude: if c_max.is_finite() { c_max } else { 0.0 },
        fz_offset: offset,
    })
}

/// Dispatch on the prior kind.
pub fn ml_povm(prior: &Prior, tau_c: f64, gamma_tau_f: f64) -> Result<MlPovm> {
    if !(tau_c > 0.0) {
        return Err(Error::InvalidScenario(format!("ML POVM needs tau_c > 0, got {tau_c}")));
    }
    match prior.kind {
        PriorKind::Gaussian => gaussian_ml_povm(prior, tau_c, gamma_tau_f),
        PriorKind::Uniform => uniform_ml_povm(prior, tau_c, gamma_tau_f),
    }
}

/// `p(g̃|g)`.
pub fn conditional_pdf(povm: &MlPovm, g: f64, g_tilde: f64) -> f64 {
    povm.fi(g_tilde) + povm.fz(g_tilde) * povm.inversion(g)
}

/// `C̄ = ∫ z(g̃) Tr{ρ(g̃) dΠ(g̃)/dg̃} dg̃` by quadrature.
pub fn average_cost(povm: &MlPovm) -> f64 {
    povm.rule().expect(|x| conditional_pdf(povm, x, x))
}

/// Closed-form maximal average cost for a Gaussian prior.
pub fn gaussian_cost_max(povm: &MlPovm) -> f64 {
    let p = &povm.prior;
    let base = 1.0 / (4.0 * PI * p.sigma * p.sigma).sqrt();
    if povm.is_uninformative() {
        return base;
    }
    let s2t2 = p.sigma * p.sigma * povm.tau_c * povm.tau_c;
    base + povm.c_max * (-povm.gamma_tau_f).exp() * (-(-4.0 * s2t2).exp_m1()) / (2.0 * 2f64.sqrt())
        * (2.0 * p.g0 * povm.tau_c).sin().powi(2)
}

/// Closed-form maximal average cost for a uniform prior.
pub fn uniform_cost_max(povm: &MlPovm) -> f64 {
    let p = &povm.prior;
    let base = 1.0 / (2.0 * p.uniform_half_width());
    if povm.is_uninformative() {
        return base;
    }
    let t = povm.tau_c;
    let s = 2.0 * p.uniform_half_width() * t;
    let c2 = (2.0 * p.g0 * t).cos();
    let bracket = 0.5 - (s.sin() * c2).powi(2) / (12.0 * p.sigma * p.sigma * t * t)
        + (2.0 * s).sin() * (4.0 * p.g0 * t).cos() / (8.0 * 3f64.sqrt() * p.sigma * t);
    base + povm.c_max * bracket * (-povm.gamma_tau_f).exp()
}

/// Closed-form maximal cost for either prior kind.
pub fn cost_max(povm: &MlPovm) -> f64 {
    match povm.prior.kind {
        PriorKind::Gaussian => gaussian_cost_max(povm),
        PriorKind::Uniform => uniform_cost_max(povm),
    }
}

/// `E[g̃|g] = ∫ g̃ p(g̃|g) dg̃` by quadrature.
pub fn ml_average_estimate(povm: &MlPovm, g: f64) -> f64 {
    let k = povm.inversion(g);
    povm.rule().integrate(|x| x * (povm.fi(x) + povm.fz(x) * k))
}

/// `E[(g̃ − g)²|g]` by quadrature.
pub fn ml_mse(povm: &MlPovm, g: f64) -> f64 {
    let k = povm.inversion(g);
    povm.rule()
        .integrate(|x| (x - g).powi(2) * (povm.fi(x) + povm.fz(x) * k))
}

/// `x'(g) = d E[g̃|g] / dg = ∫ g̃ f_z(g̃) dg̃ · d(inversion)/dg`.
pub fn ml_sensitivity(povm: &MlPovm, g: f64) -> f64 {
    if povm.is_uninformative() {
        return 0.0;
    }
    let first = povm.rule().integrate(|x| x * povm.fz(x));
    let d_inversion = -2.0 * povm.tau_c * (2.0 * g * povm.tau_c).sin() * (-povm.gamma_tau_f).exp();
    first * d_inversion
}

/// Gaussian average estimate with the reference prefactor `4√(5π)σ²`,
/// `g0 + 4√(5π) c σ² τ e^{−2σ²τ²−γτ_f}[e^{γτ_f} − 2cos²(gτ)] sin(2g0τ)`.
pub fn gaussian_average_estimate_reference(povm: &MlPovm, g: f64) -> f64 {
    gaussian_average_estimate_with(povm, g, 4.0 * (5.0 * PI).sqrt() * povm.prior.sigma.powi(2))
}

/// Gaussian average estimate from direct integration,
/// `g0 + 2√(2π) c σ³ τ e^{−2σ²τ²−γτ_f}[e^{γτ_f} − 2cos²(gτ)] sin(2g0τ)`.
pub fn gaussian_average_estimate_closed(povm: &MlPovm, g: f64) -> f64 {
    gaussian_average_estimate_with(povm, g, 2.0 * (2.0 * PI).sqrt() * povm.prior.sigma.powi(3))
}

fn gaussian_average_estimate_with(povm: &MlPovm, g: f64, prefactor: f64) -> f64 {
    let p = &povm.prior;
    let t = povm.tau_c;
    let c = povm.effective_c();
    if c == 0.0 {
        return p.g0;
    }
    let gtf = povm.gamma_tau_f;
    p.g0 + prefactor
        * c
        * t
        * (-2.0 * p.sigma * p.sigma * t * t - gtf).exp()
        * (gtf.exp() - 2.0 * (g * t).cos().powi(2))
        * (2.0 * p.g0 * t).sin()
}

/// Uniform average estimate in the special case `2√3στ_c = 2g0τ_c = π/2`:
/// `g0 + (4g0/π²)[1 − 2e^{−γτ_f}cos²(πg/(4g0))]`.
pub fn uniform_special_average_estimate(g0: f64, g: f64, gamma_tau_f: f64) -> f64 {
    g0 + 4.0 * g0 / (PI * PI) * (1.0 - 2.0 * (-gamma_tau_f).exp() * (PI * g / (4.0 * g0)).cos().powi(2))
}
