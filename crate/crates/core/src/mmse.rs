//! Minimum-mean-square-error estimation.
//!
//! The optimal estimator is the Hermitian operator `M` solving
//! `Γ0 M + M Γ0 = 2 Γ1`, where `Γk = ∫ gᵏ z(g) ρ(g) dg`. Its eigenvalues are
//! the estimates, its eigenvectors the measurement basis, and
//! `C̄_min = Tr(Γ2 − M Γ0 M)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{solve_symmetric_product, Hermitian2};
use crate::dynamics::{FieldState, Scenario};
use crate::error::{Error, Result};
use crate::prior::{sinc, Prior, PriorKind, QuadratureRule, DEFAULT_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTriple {
    pub gamma0: Hermitian2,
    pub gamma1: Hermitian2,
    pub gamma2: Hermitian2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmseResult {
    pub m_min: Hermitian2,
    /// Eigenvalues of `m_min`, ascending.
    pub estimates: [f64; 2],
    /// Unit eigenvectors matching `estimates`.
    pub projectors: [[Complex64; 2]; 2],
    pub c_min: f64,
}

impl MmseResult {
    /// Index into `estimates` of the branch with the larger `|e⟩` overlap.
    pub fn excited_branch(&self) -> usize {
        if self.projectors[0][0].norm_sqr() >= self.projectors[1][0].norm_sqr() {
            0
        } else {
            1
        }
    }

    /// Estimate reported when the detector finds the atom excited (diagonal
    /// case) or the eigenvalue whose eigenvector is closest to `|e⟩`.
    pub fn excited_estimate(&self) -> f64 {
        self.estimates[self.excited_branch()]
    }

    pub fn ground_estimate(&self) -> f64 {
        self.estimates[1 - self.excited_branch()]
    }

    /// Outcome probabilities `⟨vᵢ|ρ|vᵢ⟩`.
    pub fn outcome_probabilities(&self, rho: &Hermitian2) -> [f64; 2] {
        [
            rho.expectation(&self.projectors[0]),
            rho.expectation(&self.projectors[1]),
        ]
    }
}

/// The scalars `a`, `b`, `c` of the resonant vacuum case.
///
/// `Γ0 = diag(aE, 1 − aE)`, `Γ1 = diag(bE, g0 − bE)`,
/// `Γ2 = diag(cE, g0² + σ² − cE)` with `E = e^{−γτ_f}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormAbc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// `E[u^k · trig(2uτ)]` for the centred prior variable `u = g − g0`:
/// returns `(E[cos 2uτ], E[u sin 2uτ], E[u² cos 2uτ])`.
fn centred_trig_moments(prior: &Prior, tau: f64) -> (f64, f64, f64) {
    let s = prior.sigma;
    match prior.kind {
        PriorKind::Gaussian => {
            let env = (-2.0 * s * s * tau * tau).exp();
            (
                env,
                2.0 * s * s * tau * env,
                (s * s - 4.0 * s.powi(4) * tau * tau) * env,
            )
        }
        PriorKind::Uniform => {
            let h = prior.uniform_half_width();
            let x = 2.0 * h * tau;
            let (j1, j2) = if x.abs() < 1e-2 {
                let x2 = x * x;
                (
                    x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0),
                    1.0 / 3.0 - x2 / 10.0 + x2 * x2 / 168.0 - x2 * x2 * x2 / 6480.0,
                )
            } else {
                (
                    (x.sin() - x * x.cos()) / (x * x),
                    ((x * x - 2.0) * x.sin() + 2.0 * x * x.cos()) / (x * x * x),
                )
            };
            (sinc(x), h * j1, h * h * j2)
        }
    }
}

/// Closed-form `a`, `b`, `c` for either prior kind.
pub fn closed_form_abc(prior: &Prior, tau_c: f64) -> ClosedFormAbc {
    let (s0, s1, s2) = centred_trig_moments(prior, tau_c);
    let g0 = prior.g0;
    let (cos0, sin0) = ((2.0 * g0 * tau_c).cos(), (2.0 * g0 * tau_c).sin());
    let e_cos = cos0 * s0;
    let e_g_cos = g0 * cos0 * s0 - sin0 * s1;
    let e_g2_cos = g0 * g0 * cos0 * s0 - 2.0 * g0 * sin0 * s1 + cos0 * s2;
    ClosedFormAbc {
        a: 0.5 * (1.0 + e_cos),
        b: 0.5 * (g0 + e_g_cos),
        c: 0.5 * (g0 * g0 + prior.sigma * prior.sigma + e_g2_cos),
    }
}

/// Moment operators built from the closed-form scalars.
pub fn closed_form_gammas(prior: &Prior, tau_c: f64, gamma_tau_f: f64) -> GammaTriple {
    let ClosedFormAbc { a, b, c } = closed_form_abc(prior, tau_c);
    let e = (-gamma_tau_f).exp();
    let (g0, s2) = (prior.g0, prior.sigma * prior.sigma);
    GammaTriple {
        gamma0: Hermitian2::diag(a * e, 1.0 - a * e),
        gamma1: Hermitian2::diag(b * e, g0 - b * e),
        gamma2: Hermitian2::diag(c * e, g0 * g0 + s2 - c * e),
    }
}

/// Closed-form estimator `diag(b/a, (g0 − bE)/(1 − aE))` and its cost.
///
/// The excited-branch estimate `b/a` is formed without the damping factor,
/// so it stays finite at large `γτ_f` where the numeric path reports a
/// degenerate `Γ0`.
pub fn closed_form_mmse(prior: &Prior, tau_c: f64, gamma_tau_f: f64) -> Result<MmseResult> {
    let ClosedFormAbc { a, b, c } = closed_form_abc(prior, tau_c);
    let e = (-gamma_tau_f).exp();
    let ground_weight = 1.0 - a * e;
    if ground_weight <= crate::algebra::DEGENERACY_THRESHOLD || a <= 0.0 {
        return Err(Error::DegenerateGamma0 {
            min_pair_sum: 2.0 * ground_weight.min(a * e),
        });
    }
    let g0 = prior.g0;
    let m_e = b / a;
    let m_g = (g0 - b * e) / ground_weight;
    let second = g0 * g0 + prior.sigma * prior.sigma;
    let c_min = (c * e + (second - c * e)) - (m_e * m_e * a * e + m_g * m_g * ground_weight);
    Ok(assemble(Hermitian2::diag(m_e, m_g), c_min))
}

fn assemble(m_min: Hermitian2, c_min: f64) -> MmseResult {
    let eig = m_min.eigendecompose();
    MmseResult {
        m_min,
        estimates: eig.values,
        projectors: eig.vectors,
        c_min: c_min.max(0.0),
    }
}

/// Quadrature rule adequate for the scenario's oscillation rate.
pub fn moment_rule(prior: &Prior, scenario: &Scenario, field: &FieldState) -> QuadratureRule {
    prior.quadrature_resolving(DEFAULT_POINTS, scenario.oscillation_rate(field))
}

/// `Γ0, Γ1, Γ2` by quadrature over the prior.
pub fn gamma_moments(prior: &Prior, scenario: &Scenario, field: &FieldState) -> Result<GammaTriple> {
    gamma_moments_with(&moment_rule(prior, scenario, field), scenario, field)
}

pub fn gamma_moments_with(rule: &QuadratureRule, scenario: &Scenario, field: &FieldState) -> Result<GammaTriple> {
    let mut out = GammaTriple {
        gamma0: Hermitian2::ZERO,
        gamma1: Hermitian2::ZERO,
        gamma2: Hermitian2::ZERO,
    };
    for ((&g, &w), &z) in rule.nodes.iter().zip(&rule.weights).zip(&rule.densities) {
        if z == 0.0 {
            continue;
        }
        let rho = *scenario.detector_state(g, field)?.matrix();
        let wz = w * z;
        out.gamma0 = out.gamma0 + rho * wz;
        out.gamma1 = out.gamma1 + rho * (wz * g);
        out.gamma2 = out.gamma2 + rho * (wz * g * g);
    }
    Ok(out)
}

/// Optimal estimator from the moment operators.
pub fn mmse_estimator(gammas: &GammaTriple) -> Result<MmseResult> {
    let m = solve_symmetric_product(&gammas.gamma0, &gammas.gamma1)?;
    let c_min = gammas.gamma2.trace() - m.sandwich(&gammas.gamma0).trace();
    Ok(assemble(m, c_min))
}

/// Numeric MMSE solution for a scenario.
pub fn solve(prior: &Prior, scenario: &Scenario, field: &FieldState) -> Result<MmseResult> {
    mmse_estimator(&gamma_moments(prior, scenario, field)?)
}

/// `c_min` for a scenario, building the field from the scenario.
pub fn min_cost(prior: &Prior, scenario: &Scenario) -> Result<f64> {
    Ok(solve(prior, scenario, &scenario.field())?.c_min)
}

/// Ground-branch estimate in the limit `τ_c → 0⁺` without flight decay:
/// `g0 (3σ² + g0²) / (σ² + g0²)`.
pub fn limit_eigenvalue_tau0(prior: &Prior) -> f64 {
    let (g0, s2) = (prior.g0, prior.sigma * prior.sigma);
    g0 * (3.0 * s2 + g0 * g0) / (s2 + g0 * g0)
}

/// `E[g̃ | g] = Tr(M ρ(g))`.
pub fn average_estimate(result: &MmseResult, g: f64, scenario: &Scenario, field: &FieldState) -> Result<f64> {
    let rho = scenario.detector_state(g, field)?;
    Ok(result.m_min.trace_product(rho.matrix()))
}

/// `Tr((M − g)² ρ(g))`.
pub fn mse_of_estimator(result: &MmseResult, g: f64, scenario: &Scenario, field: &FieldState) -> Result<f64> {
    let rho = scenario.detector_state(g, field)?;
    let shifted = result.m_min - Hermitian2::scaled_identity(g);
    Ok(shifted.square().trace_product(rho.matrix()).max(0.0))
}
