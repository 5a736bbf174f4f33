//! Hermite-function expansion of `cos(2σxτ_c + 2g0τ_c) e^{−x²/2}`.

use std::f64::consts::PI;

use crate::prior::Prior;

pub const DEFAULT_BASIS_SIZE: usize = 40;

/// Orthonormal Hermite functions `Ψ_0(x) … Ψ_n_max(x)`.
pub fn hermite_functions(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion {
    /// `γᶜ_n`, `n = 0..=N`.
    pub coefficients: Vec<f64>,
}

impl HermiteExpansion {
    pub fn new(prior: &Prior, tau_c: f64, n_basis: usize) -> Self {
        let k = 2.0 * prior.sigma * tau_c;
        let phase = 2.0 * prior.g0 * tau_c;
        let envelope = PI.powf(0.25) * (-prior.sigma * prior.sigma * tau_c * tau_c).exp();
        let mut scale = 1.0; // k^n / sqrt(2^n n!)
        let mut coefficients = Vec::with_capacity(n_basis + 1);
        for n in 0..=n_basis {
            if n > 0 {
                scale *= k / (2.0 * n as f64).sqrt();
            }
            let trig = match n % 4 {
                0 => phase.cos(),
                1 => -phase.sin(),
                2 => -phase.cos(),
                _ => phase.sin(),
            };
            coefficients.push(envelope * scale * trig);
        }
        Self { coefficients }
    }

    /// Whether the last retained coefficient is below `1e-12`.
    pub fn tail_is_negligible(&self) -> bool {
        self.coefficients.last().is_some_and(|c| c.abs() < 1e-12)
    }

    pub fn sum(&self, x: f64) -> f64 {
        let psi = hermite_functions(x, self.coefficients.len() - 1);
        self.coefficients.iter().zip(&psi).map(|(c, p)| c * p).sum()
    }

    /// Partial sum over odd `n`.
    pub fn odd_sum(&self, x: f64) -> f64 {
        let psi = hermite_functions(x, self.coefficients.len() - 1);
        self.coefficients
            .iter()
            .zip(&psi)
            .skip(1)
            .step_by(2)
            .map(|(c, p)| c * p)
            .sum()
    }
}
