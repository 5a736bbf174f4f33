//! Prior densities on the coupling strength and the quadrature rules that
//! integrate against them.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::quad::{composite_nodes, PANEL_ORDER};

/// Half-width, in units of `σ`, of the truncated Gaussian support.
pub const GAUSSIAN_CUTOFF_SIGMAS: f64 = 8.0;
/// Default node count for prior quadrature.
pub const DEFAULT_POINTS: usize = 256;
/// Smallest accepted node count.
pub const MIN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    Gaussian,
    Uniform,
}

/// Prior on `g` with mean `g0` and standard deviation `sigma`.
///
/// The uniform prior lives on `[g0 - √3σ, g0 + √3σ]` so that its variance
/// is exactly `σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub kind: PriorKind,
    pub g0: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureKind {
    GaussLegendreComposite,
}

/// Nodes and plain integration weights over the prior support, together
/// with the prior density at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub densities: Vec<f64>,
    pub kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f(g) dg` over the truncated support.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `∫ f(g) z(g) dg`.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.densities)
            .map(|((&x, &w), &z)| w * z * f(x))
            .sum()
    }
}

impl Prior {
    pub fn new(kind: PriorKind, g0: f64, sigma: f64) -> Result<Self> {
        if !(g0.is_finite() && g0 > 0.0) {
            return Err(Error::InvalidPrior(format!("g0 must be finite and > 0, got {g0}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidPrior(format!(
                "sigma must be finite and > 0, got {sigma}"
            )));
        }
        Ok(Self { kind, g0, sigma })
    }

    pub fn gaussian(g0: f64, sigma: f64) -> Result<Self> {
        Self::new(PriorKind::Gaussian, g0, sigma)
    }

    pub fn uniform(g0: f64, sigma: f64) -> Result<Self> {
        Self::new(PriorKind::Uniform, g0, sigma)
    }

    /// Half-width `√3σ` of the uniform support.
    pub fn uniform_half_width(&self) -> f64 {
        3f64.sqrt() * self.sigma
    }

    pub fn density(&self, g: f64) -> f64 {
        match self.kind {
            PriorKind::Gaussian => {
                let u = (g - self.g0) / self.sigma;
                (-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * self.sigma)
            }
            PriorKind::Uniform => {
                let h = self.uniform_half_width();
                if (g - self.g0).abs() <= h {
                    1.0 / (2.0 * h)
                } else {
                    0.0
                }
            }
        }
    }

    /// `(mean, variance)`.
    pub fn moments(&self) -> (f64, f64) {
        (self.g0, self.sigma * self.sigma)
    }

    /// Exact support; unbounded for the Gaussian.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            PriorKind::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            PriorKind::Uniform => {
                let h = self.uniform_half_width();
                (self.g0 - h, self.g0 + h)
            }
        }
    }

    /// Support used for numerical integration.
    pub fn integration_support(&self) -> (f64, f64) {
        match self.kind {
            PriorKind::Gaussian => {
                let h = GAUSSIAN_CUTOFF_SIGMAS * self.sigma;
                (self.g0 - h, self.g0 + h)
            }
            PriorKind::Uniform => self.support(),
        }
    }

    pub fn cdf(&self, g: f64) -> f64 {
        match self.kind {
            PriorKind::Gaussian => 0.5 * erfc((self.g0 - g) / (self.sigma * SQRT_2)),
            PriorKind::Uniform => {
                let h = self.uniform_half_width();
                ((g - self.g0 + h) / (2.0 * h)).clamp(0.0, 1.0)
            }
        }
    }

    /// Inverse CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        match self.kind {
            PriorKind::Gaussian => self.g0 - self.sigma * SQRT_2 * erfc_inv(2.0 * u),
            PriorKind::Uniform => self.g0 + self.uniform_half_width() * (2.0 * u - 1.0),
        }
    }

    /// Composite Gauss-Legendre rule with at least `n_points` nodes.
    pub fn quadrature(&self, n_points: usize) -> QuadratureRule {
        self.quadrature_resolving(n_points, 0.0)
    }

    /// Composite rule whose panels are at most half a period of
    /// `cos(rate·g)` wide, so integrands oscillating up to angular
    /// frequency `rate` are resolved.
    pub fn quadrature_resolving(&self, n_points: usize, rate: f64) -> QuadratureRule {
        let (a, b) = self.integration_support();
        let width = b - a;
        let mut panels = n_points.max(MIN_POINTS).div_ceil(PANEL_ORDER);
        if self.kind == PriorKind::Gaussian {
            panels = panels.max((width / self.sigma).ceil() as usize);
        }
        if rate > 0.0 {
            panels = panels.max((width * rate / PI).ceil() as usize);
        }
        let (nodes, weights) = composite_nodes(a, b, panels);
        let densities = nodes.iter().map(|&x| self.density(x)).collect();
        QuadratureRule {
            nodes,
            weights,
            densities,
            kind: QuadratureKind::GaussLegendreComposite,
        }
    }

    /// `E[cos(2gτ)]` and `E[sin(2gτ)]` under the prior.
    pub fn trig_moments(&self, tau: f64) -> (f64, f64) {
        let envelope = match self.kind {
            PriorKind::Gaussian => (-2.0 * self.sigma * self.sigma * tau * tau).exp(),
            PriorKind::Uniform => sinc(2.0 * self.uniform_half_width() * tau),
        };
        let phase = 2.0 * self.g0 * tau;
        (envelope * phase.cos(), envelope * phase.sin())
    }
}

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
