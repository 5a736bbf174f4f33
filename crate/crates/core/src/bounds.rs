//! Symmetrized logarithmic derivative and Cramér–Rao-type bounds.
//!
//! For an estimator with average estimate `E[g̃|g]` the sensitivity is
//! `x'(g) = dE[g̃|g]/dg` and the quantum Fisher term is `F = Tr{ρ L²}`.
//! Reports carry the standard bound `x'²/F` as `lower_bound` and the
//! first-power variant `|x'|/F` alongside it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::algebra::Hermitian2;
use crate::dynamics::{FieldState, Scenario};
use crate::error::{Error, Result};
use crate::ml::{ml_mse, ml_sensitivity, MlPovm};
use crate::mmse::{mse_of_estimator, MmseResult};
use crate::prior::PriorKind;

/// Threshold below which `cos(gτ_c)` or `1 − cos²(gτ_c)e^{−γτ_f}` is
/// treated as zero.
pub const SLD_SINGULAR: f64 = 1e-12;
/// Relative step of the central differences used for `∂ρ/∂g`.
pub const DERIVATIVE_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub g: f64,
    /// Mean-squared error of the strategy at `g`.
    pub mse: f64,
    /// `x'(g)² / Tr{ρL²}`.
    pub lower_bound: f64,
    /// `|x'(g)| / Tr{ρL²}`.
    pub first_power_bound: f64,
    /// `x'(g)`.
    pub sensitivity: f64,
    /// `Tr{ρL²}`.
    pub fisher: f64,
    /// Eigenvalues of `L`; `None` where `L` itself diverges.
    pub sld_diag: Option<[f64; 2]>,
}

impl BoundReport {
    /// `mse ≥ lower_bound − tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.mse >= self.lower_bound - tol
    }
}

/// `L = diag(−2τ tan(gτ), τ sin(2gτ)e^{−γτ_f} / (1 − cos²(gτ)e^{−γτ_f}))`.
pub fn sld(g: f64, tau_c: f64, gamma_tau_f: f64) -> Result<Hermitian2> {
    let e = (-gamma_tau_f).exp();
    let cos = (g * tau_c).cos();
    let denominator = 1.0 - cos * cos * e;
    if cos.abs() < SLD_SINGULAR || denominator <= SLD_SINGULAR {
        return Err(Error::SingularSld { g });
    }
    Ok(Hermitian2::diag(
        -2.0 * tau_c * (g * tau_c).tan(),
        tau_c * (2.0 * g * tau_c).sin() * e / denominator,
    ))
}

/// Analytic `∂ρ/∂g` of the resonant vacuum state.
pub fn drho_diagonal(g: f64, tau_c: f64, gamma_tau_f: f64) -> Hermitian2 {
    let dp = -tau_c * (2.0 * g * tau_c).sin() * (-gamma_tau_f).exp();
    Hermitian2::diag(dp, -dp)
}

/// `Tr{ρL²} = 4τ² sin²(gτ)e^{−γτ_f} / (1 − cos²(gτ)e^{−γτ_f})`, finite
/// everywhere; at the pure-state points the one-sided limit is returned.
pub fn fisher_diagonal(g: f64, tau_c: f64, gamma_tau_f: f64) -> f64 {
    let e = (-gamma_tau_f).exp();
    let (s, c) = (g * tau_c).sin_cos();
    let (s2, c2) = (s * s, c * c);
    // 1 − c²e = s² + c²(1 − e)
    let denominator = s2 - c2 * (-gamma_tau_f).exp_m1();
    if denominator == 0.0 {
        return 4.0 * tau_c * tau_c;
    }
    4.0 * tau_c * tau_c * s2 * e / denominator
}

/// `∂ρ/∂g` by Richardson-extrapolated central differences.
pub fn drho_numeric(g: f64, step: f64, scenario: &Scenario, field: &FieldState) -> Result<Hermitian2> {
    let central = |h: f64| -> Result<Hermitian2> {
        let plus = *scenario.detector_state(g + h, field)?.matrix();
        let minus = *scenario.detector_state(g - h, field)?.matrix();
        Ok((plus - minus) * (0.5 / h))
    };
    let coarse = central(step)?;
    let fine = central(0.5 * step)?;
    Ok((fine * 4.0 - coarse) * (1.0 / 3.0))
}

/// SLD from its defining equation in the eigenbasis of `rho`,
/// `L_ij = 2(∂ρ)_ij / (p_i + p_j)`, with entries on a vanishing `p_i + p_j`
/// set to zero. Returns `(L, Tr{ρL²})`.
pub fn sld_generic(rho: &Hermitian2, drho: &Hermitian2) -> (Hermitian2, f64) {
    let eig = rho.eigendecompose();
    let p = eig.values;
    let d = drho.conjugate_by(&eig.vectors);
    let ratio = |num: f64, den: f64| if den < SLD_SINGULAR { 0.0 } else { 2.0 * num / den };
    let l00 = ratio(d.ee, 2.0 * p[0]);
    let l11 = ratio(d.gg, 2.0 * p[1]);
    let sum = p[0] + p[1];
    let l01 = if sum < SLD_SINGULAR {
        Complex64::new(0.0, 0.0)
    } else {
        d.eg * (2.0 / sum)
    };
    let fisher = p[0] * l00 * l00 + p[1] * l11 * l11 + sum * l01.norm_sqr();
    (Hermitian2::new(l00, l11, l01).unconjugate_by(&eig.vectors), fisher)
}

fn assemble(g: f64, mse: f64, sensitivity: f64, fisher: f64, sld_diag: Option<[f64; 2]>) -> Result<BoundReport> {
    let (lower_bound, first_power_bound) = if sensitivity == 0.0 {
        (0.0, 0.0)
    } else if fisher > 0.0 {
        (sensitivity * sensitivity / fisher, sensitivity.abs() / fisher)
    } else {
        return Err(Error::SingularSld { g });
    };
    Ok(BoundReport {
        g,
        mse,
        lower_bound,
        first_power_bound,
        sensitivity,
        fisher,
        sld_diag,
    })
}

fn sorted_eigenvalues(l: &Hermitian2) -> [f64; 2] {
    l.eigendecompose().values
}

/// Bound for the MMSE strategy at true coupling `g`.
///
/// The resonant vacuum case uses the analytic `∂ρ/∂g` and `Tr{ρL²}`; any
/// other scenario goes through [`drho_numeric`] and [`sld_generic`].
pub fn cr_bound_mmse(result: &MmseResult, g: f64, scenario: &Scenario, field: &FieldState) -> Result<BoundReport> {
    let mse = mse_of_estimator(result, g, scenario, field)?;
    if scenario.is_diagonal_case() {
        let (t, gtf) = (scenario.tau_c, scenario.gamma_tau_f);
        let sensitivity = result.m_min.trace_product(&drho_diagonal(g, t, gtf));
        let sld_diag = sld(g, t, gtf).ok().map(|l| [l.ee, l.gg]);
        assemble(g, mse, sensitivity, fisher_diagonal(g, t, gtf), sld_diag)
    } else {
        cr_bound_mmse_generic(result, g, scenario, field)
    }
}

/// [`cr_bound_mmse`] forced through the numeric SLD.
pub fn cr_bound_mmse_generic(
    result: &MmseResult,
    g: f64,
    scenario: &Scenario,
    field: &FieldState,
) -> Result<BoundReport> {
    let mse = mse_of_estimator(result, g, scenario, field)?;
    let rho = *scenario.detector_state(g, field)?.matrix();
    let step = DERIVATIVE_STEP * g.abs().max(f64::MIN_POSITIVE.sqrt());
    let drho = drho_numeric(g, step, scenario, field)?;
    let sensitivity = result.m_min.trace_product(&drho);
    let (l, fisher) = sld_generic(&rho, &drho);
    assemble(g, mse, sensitivity, fisher, Some(sorted_eigenvalues(&l)))
}

/// Bound for an ML strategy at true coupling `g`; the flight decay is the
/// one stored in `povm`.
pub fn cr_bound_ml(povm: &MlPovm, g: f64) -> Result<BoundReport> {
    let (t, gtf) = (povm.tau_c, povm.gamma_tau_f);
    let sensitivity = ml_sensitivity(povm, g);
    let sld_diag = sld(g, t, gtf).ok().map(|l| [l.ee, l.gg]);
    assemble(g, ml_mse(povm, g), sensitivity, fisher_diagonal(g, t, gtf), sld_diag)
}

/// Closed-form first-power MMSE bound
/// `(1 − cos²(gτ)E)/(4τ sin²(gτ)) · |sin 2gτ| · |g0 − b/a| / (1 − aE)`,
/// where `a`, `b` are the prior averages of `cos²(gτ)` and `g cos²(gτ)`.
pub fn reference_mmse_bound(g0: f64, a: f64, b: f64, g: f64, tau_c: f64, gamma_tau_f: f64) -> f64 {
    let e = (-gamma_tau_f).exp();
    let s2 = (g * tau_c).sin().powi(2);
    if s2 == 0.0 {
        return 0.0;
    }
    (1.0 - (g * tau_c).cos().powi(2) * e) / (4.0 * tau_c * s2) * (2.0 * g * tau_c).sin().abs() * (g0 - b / a).abs()
        / (1.0 - a * e)
}

/// First-power bound for the Gaussian ML strategy with the reference
/// prefactor `2√(5π)σ²`.
pub fn reference_ml_bound_gaussian(povm: &MlPovm, g: f64) -> f64 {
    ml_bound_gaussian_with(povm, g, 2.0 * (5.0 * PI).sqrt() * povm.prior.sigma.powi(2))
}

/// The same expression with the prefactor `√(2π)σ³` that equals `|x'|/F`.
pub fn ml_bound_gaussian_closed(povm: &MlPovm, g: f64) -> f64 {
    ml_bound_gaussian_with(povm, g, (2.0 * PI).sqrt() * povm.prior.sigma.powi(3))
}

fn ml_bound_gaussian_with(povm: &MlPovm, g: f64, prefactor: f64) -> f64 {
    if povm.prior.kind != PriorKind::Gaussian || povm.is_uninformative() {
        return 0.0;
    }
    let (t, e) = (povm.tau_c, (-povm.gamma_tau_f).exp());
    let s2 = (g * t).sin().powi(2);
    if s2 == 0.0 {
        return 0.0;
    }
    let p = &povm.prior;
    (1.0 - (g * t).cos().powi(2) * e) / s2
        * (2.0 * g * t).sin().abs()
        * prefactor
        * (-2.0 * p.sigma * p.sigma * t * t).exp()
        * (povm.c_max * (2.0 * p.g0 * t).sin()).abs()
}

/// First-power bound for the uniform special case `2√3στ_c = 2g0τ_c = π/2`,
/// `(8g0²/π²)(1 − cos²(πg/4g0)E) / (π sin²(πg/4g0)) · |sin(πg/2g0)|`.
pub fn reference_ml_bound_uniform_special(g0: f64, g: f64, gamma_tau_f: f64) -> f64 {
    let x = PI * g / (4.0 * g0);
    let s2 = x.sin().powi(2);
    if s2 == 0.0 {
        return 0.0;
    }
    8.0 * g0 * g0 / (PI * PI) * (1.0 - x.cos().powi(2) * (-gamma_tau_f).exp()) / (PI * s2) * (2.0 * x).sin().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::ml_povm;
    use crate::mmse::{closed_form_abc, solve};
    use crate::prior::Prior;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn sld_at_quarter_period() {
        let g0 = 1.7;
        let l = sld(g0, FRAC_PI_4 / g0, 0.0).unwrap();
        assert!((l.ee + PI / (2.0 * g0)).abs() < 1e-14);
        assert!((l.gg - PI / (2.0 * g0)).abs() < 1e-14);
    }

    #[test]
    fn sld_singular_points() {
        assert_eq!(sld(1.0, FRAC_PI_2, 0.0), Err(Error::SingularSld { g: 1.0 }));
        assert_eq!(sld(1.0, PI, 0.0), Err(Error::SingularSld { g: 1.0 }));
        assert!(sld(1.0, PI, 0.3).is_ok());
    }

    #[test]
    fn sld_defining_identity() {
        let (tau, gtf) = (0.83, 0.4);
        let scenario = Scenario::resonant_vacuum(tau, gtf);
        let field = scenario.field();
        for i in 0..50 {
            let g = 0.2 + 1.6 * i as f64 / 49.0;
            let Ok(l) = sld(g, tau, gtf) else { continue };
            let rho = *scenario.detector_state(g, &field).unwrap().matrix();
            let lr = Hermitian2::diag(l.ee * rho.ee, l.gg * rho.gg);
            let lhs = drho_diagonal(g, tau, gtf);
            assert!(lhs.max_abs_diff(&lr) < 1e-9, "g={g}");
        }
    }

    #[test]
    fn analytic_derivative_matches_differences() {
        let (tau, gtf) = (1.3, 0.2);
        let scenario = Scenario::resonant_vacuum(tau, gtf);
        let field = scenario.field();
        for &g in &[0.3, 0.9, 1.4, 2.2] {
            let h = 1e-6;
            let plus = *scenario.detector_state(g + h, &field).unwrap().matrix();
            let minus = *scenario.detector_state(g - h, &field).unwrap().matrix();
            let fd = (plus - minus) * (0.5 / h);
            assert!(fd.max_abs_diff(&drho_diagonal(g, tau, gtf)) < 1e-6);
        }
    }

    #[test]
    fn fisher_matches_sld() {
        for &(g, tau, gtf) in &[(1.0, 0.7, 0.0), (0.6, 1.9, 0.5), (2.0, 0.3, 2.0)] {
            let l = sld(g, tau, gtf).unwrap();
            let rho = Scenario::resonant_vacuum(tau, gtf)
                .detector_state(g, &FieldState::vacuum())
                .unwrap();
            let f = rho.matrix().trace_product(&l.square());
            assert!((f - fisher_diagonal(g, tau, gtf)).abs() < 1e-12 * f.max(1.0));
        }
        assert!((fisher_diagonal(1.0, 0.5, 0.0) - 1.0).abs() < 1e-15);
        assert!((fisher_diagonal(2.0, PI / 2.0, 0.0) - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn inconclusive_times_give_zero_bound() {
        let g0 = 1.0;
        let prior = Prior::gaussian(g0, 0.6).unwrap();
        for tau in [FRAC_PI_2 / g0, PI / g0] {
            let scenario = Scenario::resonant_vacuum(tau, 0.0);
            let field = scenario.field();
            let res = solve(&prior, &scenario, &field).unwrap();
            for &g in &[0.5, 0.9, 1.3] {
                let r = cr_bound_mmse(&res, g, &scenario, &field).unwrap();
                assert!(r.lower_bound < 1e-12 && r.first_power_bound < 1e-12, "{r:?}");
            }
        }
    }

    #[test]
    fn first_power_bound_matches_reference_form() {
        let (g0, sigma) = (1.0, 0.7);
        let prior = Prior::gaussian(g0, sigma).unwrap();
        let tau = FRAC_PI_4 / g0;
        for gtf in [0.0, 0.8] {
            let scenario = Scenario::resonant_vacuum(tau, gtf);
            let field = scenario.field();
            let res = solve(&prior, &scenario, &field).unwrap();
            let abc = closed_form_abc(&prior, tau);
            let e = (-gtf).exp();
            for &g in &[0.4, 1.0, 1.6] {
                let r = cr_bound_mmse(&res, g, &scenario, &field).unwrap();
                let x = PI * g / (4.0 * g0);
                let display = (1.0 - x.cos().powi(2) * e) / x.sin().powi(2)
                    * (2.0 * x).sin().abs()
                    * sigma
                    * sigma
                    * (-PI * PI * sigma * sigma / (8.0 * g0 * g0)).exp()
                    / (2.0 - e);
                assert!(
                    (r.first_power_bound - display).abs() < 1e-8,
                    "{} {}",
                    r.first_power_bound,
                    display
                );
                let general = reference_mmse_bound(g0, abc.a, abc.b, g, tau, gtf);
                assert!((r.first_power_bound - general).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn generic_path_matches_closed_form() {
        let prior = Prior::gaussian(1.0, 0.8).unwrap();
        let scenario = Scenario::resonant_vacuum(FRAC_PI_4, 0.0);
        let field = scenario.field();
        let res = solve(&prior, &scenario, &field).unwrap();
        let a = cr_bound_mmse(&res, 1.0, &scenario, &field).unwrap();
        let b = cr_bound_mmse_generic(&res, 1.0, &scenario, &field).unwrap();
        assert!((a.lower_bound - b.lower_bound).abs() < 1e-8);
        assert!((a.first_power_bound - b.first_power_bound).abs() < 1e-8);
        assert!((a.fisher - b.fisher).abs() < 1e-8);
    }

    #[test]
    fn ml_uninformative_bound_is_zero() {
        let povm = ml_povm(&Prior::gaussian(1.0, 0.5).unwrap(), FRAC_PI_2, 0.0).unwrap();
        let r = cr_bound_ml(&povm, 0.8).unwrap();
        assert_eq!((r.lower_bound, r.first_power_bound), (0.0, 0.0));
    }

    #[test]
    fn ml_uniform_special_case() {
        let g0 = 1.0;
        let tau = FRAC_PI_4 / g0;
        let prior = Prior::uniform(g0, PI / (4.0 * 3f64.sqrt() * tau)).unwrap();
        let povm = ml_povm(&prior, tau, 0.0).unwrap();
        let r = cr_bound_ml(&povm, g0).unwrap();
        let reference = reference_ml_bound_uniform_special(g0, g0, 0.0);
        assert!((reference - 8.0 * g0 * g0 / PI.powi(3)).abs() < 1e-14);
        assert!((r.first_power_bound - reference).abs() < 1e-9, "{r:?}");
        assert!((r.lower_bound - 16.0 * g0 * g0 / PI.powi(4)).abs() < 1e-9);
    }

    #[test]
    fn ml_gaussian_closed_bound_matches_quadrature() {
        let povm = ml_povm(&Prior::gaussian(1.0, 0.6).unwrap(), 0.9, 0.3).unwrap();
        for &g in &[0.3, 0.8, 1.5] {
            let r = cr_bound_ml(&povm, g).unwrap();
            let closed = ml_bound_gaussian_closed(&povm, g);
            assert!((r.first_power_bound - closed).abs() < 1e-9 * closed.max(1.0));
            let reference = reference_ml_bound_gaussian(&povm, g);
            let ratio = 2.0 * 5f64.sqrt() / (2f64.sqrt() * 0.6);
            assert!((reference / closed - ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn ml_inequality_on_grid() {
        for prior in [Prior::gaussian(1.0, 0.5).unwrap(), Prior::uniform(1.0, 0.5).unwrap()] {
            let povm = ml_povm(&prior, 0.9, 0.0).unwrap();
            for i in 0..50 {
                let g = 0.2 + 1.6 * i as f64 / 49.0;
                let r = cr_bound_ml(&povm, g).unwrap();
                assert!(r.holds(1e-9), "{r:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn mmse_inequality_holds(
            s in 0.2f64..1.5,
            t in 0.05f64..3.0,
            gtf in 0.0f64..3.0,
            g in 0.1f64..2.5,
            uniform in any::<bool>(),
        ) {
            let prior = if uniform { Prior::uniform(1.0, s) } else { Prior::gaussian(1.0, s) }.unwrap();
            let scenario = Scenario::resonant_vacuum(t, gtf);
            let field = scenario.field();
            let res = solve(&prior, &scenario, &field).unwrap();
            let r = cr_bound_mmse(&res, g, &scenario, &field).unwrap();
            prop_assert!(r.holds(1e-9), "{:?}", r);
        }

        #[test]
        fn bound_ignores_relabelling(shift in -0.5f64..0.5, g in 0.2f64..1.8) {
            // Shifting every estimate by a constant leaves ρ, L and x' unchanged.
            let prior = Prior::gaussian(1.0, 0.7).unwrap();
            let scenario = Scenario::resonant_vacuum(0.9, 0.1);
            let field = scenario.field();
            let res = solve(&prior, &scenario, &field).unwrap();
            let mut moved = res;
            moved.m_min = res.m_min + Hermitian2::scaled_identity(shift);
            let a = cr_bound_mmse(&res, g, &scenario, &field).unwrap();
            let b = cr_bound_mmse(&moved, g, &scenario, &field).unwrap();
            prop_assert!((a.lower_bound - b.lower_bound).abs() < 1e-12);
            prop_assert!((a.fisher - b.fisher).abs() < 1e-12);
        }
    }
}
