//! Run configuration in units of `g0`.
//!
//! ```toml
//! [prior]
//! kind = "gaussian"   # or "uniform"
//! g0 = 1.0
//! sigma = 1.0         # σ/g0
//!
//! [scenario]
//! g0_tau_c = 0.785398
//! gamma_tau_f = 0.0
//! delta = 0.0         # Δ/g0
//! alpha = [0.0, 0.0]  # Re α, Im α
//! gamma = 0.0         # in-cavity atomic decay γ/g0
//! kappa = 0.0         # cavity leakage κ/g0
//! fock_cutoff = 40    # optional; automatic when absent
//!
//! [probe]
//! g_over_g0 = 1.0     # true coupling for g-dependent outputs
//!
//! [sweep]
//! quantity = "mmse_cost"
//! axis = "tau_c"
//! range = [0.01, 3.0, 300]
//! optimize_tau = false
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::dynamics::{FockCutoff, Scenario};
use crate::error::{Error, Result};
use crate::prior::{Prior, PriorKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorConfig {
    pub kind: PriorKind,
    pub g0: f64,
    pub sigma: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            kind: PriorKind::Gaussian,
            g0: 1.0,
            sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub g0_tau_c: f64,
    pub gamma_tau_f: f64,
    pub delta: f64,
    pub alpha: [f64; 2],
    pub gamma: f64,
    pub kappa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_cutoff: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            g0_tau_c: FRAC_PI_4,
            gamma_tau_f: 0.0,
            delta: 0.0,
            alpha: [0.0, 0.0],
            gamma: 0.0,
            kappa: 0.0,
            fock_cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub g_over_g0: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { g_over_g0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    MmseEigenvalues,
    MmseCost,
    MmseAvgEstimate,
    MmseCrBound,
    MlCost,
    MlAvgEstimate,
    MlCrBound,
    DissipativeCost,
}

impl Quantity {
    pub fn is_ml(self) -> bool {
        matches!(self, Quantity::MlCost | Quantity::MlAvgEstimate | Quantity::MlCrBound)
    }

    /// Whether the output depends on the true coupling `g`.
    pub fn depends_on_g(self) -> bool {
        matches!(
            self,
            Quantity::MmseAvgEstimate | Quantity::MmseCrBound | Quantity::MlAvgEstimate | Quantity::MlCrBound
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// `g0 τ_c`.
    TauC,
    GOverG0,
    /// `Δ/g0`.
    Delta,
    GammaTauF,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub axis: Axis,
    /// `(lo, hi, n_points)`.
    pub range: (f64, f64, usize),
    #[serde(default)]
    pub optimize_tau: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub prior: PriorConfig,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// A configuration converted to physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub prior: Prior,
    pub scenario: Scenario,
    /// True coupling for `g`-dependent outputs.
    pub g: f64,
}

impl Config {
    pub fn resolve(&self) -> Result<Setup> {
        let p = &self.prior;
        if !(p.g0 > 0.0 && p.g0.is_finite()) {
            return Err(Error::InvalidPrior(format!("g0 must be > 0, got {}", p.g0)));
        }
        let g0 = p.g0;
        let prior = Prior::new(p.kind, g0, p.sigma * g0)?;
        let s = &self.scenario;
        let scenario = Scenario::resonant_vacuum(s.g0_tau_c / g0, s.gamma_tau_f)
            .with_detuning(s.delta * g0)
            .with_alpha(Complex64::new(s.alpha[0], s.alpha[1]))
            .with_cavity_losses(s.gamma * g0, s.kappa * g0)
            .with_cutoff(s.fock_cutoff.map_or(FockCutoff::Auto, FockCutoff::Fixed));
        scenario.validate()?;
        Ok(Setup {
            prior,
            scenario,
            g: self.probe.g_over_g0 * g0,
        })
    }
}
