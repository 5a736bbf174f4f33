//! State of the two-level system at the detector.
//!
//! Three stages are modelled: resonant or detuned Jaynes-Cummings transit
//! through the cavity with an arbitrary (truncated) initial field, the
//! free flight to the detector with spontaneous decay, and a damped
//! in-cavity variant with cavity leakage `κ` and atomic decay `γ`.
//!
//! The excited state `|e⟩` is the first basis vector throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Hermitian2, QubitState};
use crate::error::{Error, Result};

/// Captured probability the automatic Fock cutoff must reach before the
/// safety margin is added.
pub const AUTO_CUTOFF_MASS: f64 = 0.99;
/// Extra Fock levels kept beyond the 0.99 point.
pub const AUTO_CUTOFF_MARGIN: usize = 10;
/// Largest tolerated tail mass of a truncated field.
pub const MAX_TAIL_MASS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FockCutoff {
    Auto,
    Fixed(usize),
}

/// Physical knobs of one estimation run.
///
/// `tau_c` and `delta` are in the same units as the coupling `g`
/// (time and frequency respectively); `gamma_tau_f` is dimensionless.
/// `kappa` and `gamma_cav` select the damped in-cavity model when either is
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub tau_c: f64,
    pub gamma_tau_f: f64,
    pub delta: f64,
    pub alpha: Complex64,
    pub kappa: f64,
    pub gamma_cav: f64,
    pub fock_cutoff: FockCutoff,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            tau_c: 0.0,
            gamma_tau_f: 0.0,
            delta: 0.0,
            alpha: Complex64::new(0.0, 0.0),
            kappa: 0.0,
            gamma_cav: 0.0,
            fock_cutoff: FockCutoff::Auto,
        }
    }
}

impl Scenario {
    /// Resonant transit with the cavity initially in vacuum.
    pub fn resonant_vacuum(tau_c: f64, gamma_tau_f: f64) -> Self {
        Self {
            tau_c,
            gamma_tau_f,
            ..Self::default()
        }
    }

    pub fn with_tau_c(mut self, tau_c: f64) -> Self {
        self.tau_c = tau_c;
        self
    }

    pub fn with_flight_decay(mut self, gamma_tau_f: f64) -> Self {
        self.gamma_tau_f = gamma_tau_f;
        self
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_cavity_losses(mut self, gamma_cav: f64, kappa: f64) -> Self {
        self.gamma_cav = gamma_cav;
        self.kappa = kappa;
        self
    }

    pub fn with_cutoff(mut self, cutoff: FockCutoff) -> Self {
        self.fock_cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("tau_c", self.tau_c),
            ("gamma_tau_f", self.gamma_tau_f),
            ("kappa", self.kappa),
            ("gamma_cav", self.gamma_cav),
        ];
        for (name, v) in named {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !self.delta.is_finite() || !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return Err(Error::InvalidScenario("delta and alpha must be finite".into()));
        }
        if let FockCutoff::Fixed(0) = self.fock_cutoff {
            return Err(Error::InvalidScenario("fock_cutoff must be positive".into()));
        }
        Ok(())
    }

    pub fn is_dissipative(&self) -> bool {
        self.kappa > 0.0 || self.gamma_cav > 0.0
    }

    /// Resonant, vacuum field, no in-cavity losses: the diagonal case with
    /// closed forms.
    pub fn is_diagonal_case(&self) -> bool {
        self.delta == 0.0 && self.alpha.norm() == 0.0 && !self.is_dissipative()
    }

    pub fn field(&self) -> FieldState {
        FieldState::coherent(self.alpha, self.fock_cutoff)
    }

    /// Detector-side state for coupling `g`, dispatching to the unitary or
    /// damped in-cavity model.
    pub fn detector_state(&self, g: f64, field: &FieldState) -> Result<QubitState> {
        if self.is_dissipative() {
            if self.delta != 0.0 || field.mean_photon_number() > 0.0 {
                return Err(Error::UnsupportedCombination(
                    "damped in-cavity model requires delta = 0 and a vacuum field".into(),
                ));
            }
            let exit = dissipative_state(g, self.tau_c, self.gamma_cav, self.kappa)?;
            Ok(apply_flight_decay(&exit, self.gamma_tau_f))
        } else {
            reduced_state(g, self, field)
        }
    }

    /// Upper bound on the angular frequency, in `g`, of the matrix elements
    /// of the detector state. Used to size quadrature panels.
    pub fn oscillation_rate(&self, field: &FieldState) -> f64 {
        2.0 * self.tau_c * ((field.coefficients.len()) as f64).sqrt()
    }
}

/// Truncated Fock-basis amplitudes `a_n` of the initial field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub coefficients: Vec<Complex64>,
}

impl FieldState {
    pub fn vacuum() -> Self {
        Self {
            coefficients: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Coherent state `|α⟩`, truncated per `cutoff`.
    pub fn coherent(alpha: Complex64, cutoff: FockCutoff) -> Self {
        if alpha.norm() == 0.0 {
            return match cutoff {
                FockCutoff::Auto => Self::vacuum(),
                FockCutoff::Fixed(n) => {
                    let mut coefficients = vec![Complex64::new(0.0, 0.0); n + 1];
                    coefficients[0] = Complex64::new(1.0, 0.0);
                    Self { coefficients }
                }
            };
        }
        let mut coefficients = vec![Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0)];
        let push_next = |c: &mut Vec<Complex64>| {
            let n = c.len() as f64;
            let next = c[c.len() - 1] * alpha / n.sqrt();
            c.push(next);
        };
        match cutoff {
            FockCutoff::Fixed(n) => {
                while coefficients.len() <= n {
                    push_next(&mut coefficients);
                }
            }
            FockCutoff::Auto => {
                let mut mass = coefficients[0].norm_sqr();
                while mass < AUTO_CUTOFF_MASS {
                    push_next(&mut coefficients);
                    mass += coefficients[coefficients.len() - 1].norm_sqr();
                }
                for _ in 0..AUTO_CUTOFF_MARGIN {
                    push_next(&mut coefficients);
                }
            }
        }
        Self { coefficients }
    }

    /// Highest retained photon number `N`.
    pub fn max_photon_number(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn captured_mass(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.captured_mass()).max(0.0)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }
}

/// Effective Rabi frequency `λₙ = sqrt(Δ²/4 + g² n)`.
pub fn rabi_frequency(n: usize, g: f64, delta: f64) -> f64 {
    (0.25 * delta * delta + g * g * n as f64).sqrt()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Reduced state of the two-level system at the detector after unitary
/// transit (duration `tau_c`) and free flight with decay `gamma_tau_f`.
///
/// The atom enters excited; the field enters in `field`. Amplitudes follow
/// the interaction-picture solution in each `{|e,n-1⟩, |g,n⟩}` sector.
pub fn reduced_state(g: f64, scenario: &Scenario, field: &FieldState) -> Result<QubitState> {
    if scenario.is_dissipative() {
        return Err(Error::UnsupportedCombination(
            "reduced_state covers lossless transit only; use dissipative_state".into(),
        ));
    }
    let tail = field.tail_mass();
    if tail > MAX_TAIL_MASS {
        return Err(Error::TruncationTooSmall { tail });
    }
    let t = scenario.tau_c;
    let delta = scenario.delta;
    let a = &field.coefficients;
    let n_max = a.len() - 1;
    let i = Complex64::new(0.0, 1.0);
    let phase_e = Complex64::from_polar(1.0, -0.5 * delta * t);
    let phase_g = phase_e.conj();

    // c_{e,m}, m = 0..=N, carries a_m and λ_{m+1}.
    let excited = |m: usize| -> Complex64 {
        let lam = rabi_frequency(m + 1, g, delta);
        let envelope = Complex64::new((lam * t).cos(), 0.5 * delta * t * sinc(lam * t));
        phase_e * envelope * a[m]
    };
    // c_{g,n}, n = 1..=N+1, carries a_{n-1} and λ_n.
    let ground = |n: usize| -> Complex64 {
        let lam = rabi_frequency(n, g, delta);
        -i * phase_g * (g * (n as f64).sqrt() * t * sinc(lam * t)) * a[n - 1]
    };

    let ce: Vec<Complex64> = (0..=n_max).map(excited).collect();
    let cg: Vec<Complex64> = (1..=n_max + 1).map(ground).collect();

    let a_ee: f64 = ce.iter().map(|c| c.norm_sqr()).sum();
    let a_gg: f64 = cg.iter().map(|c| c.norm_sqr()).sum();
    let a_eg: Complex64 = (1..=n_max).map(|m| ce[m] * cg[m - 1].conj()).sum();

    let exit = Hermitian2::new(a_ee, a_gg + tail, a_eg);
    Ok(apply_flight_decay(
        &QubitState::new_unchecked(exit),
        scenario.gamma_tau_f,
    ))
}

/// Spontaneous decay at rate `γ` acting for `τ_f`: populations relax by
/// `e^{-γτ_f}`, coherences by `e^{-γτ_f/2}`.
pub fn apply_flight_decay(state: &QubitState, gamma_tau_f: f64) -> QubitState {
    if gamma_tau_f == 0.0 {
        return *state;
    }
    let m = state.matrix();
    let survive = (-gamma_tau_f).exp();
    let decayed = -(-gamma_tau_f).exp_m1();
    QubitState::new_unchecked(Hermitian2::new(
        m.ee * survive,
        m.gg + m.ee * decayed,
        m.eg * (-0.5 * gamma_tau_f).exp(),
    ))
}

/// Excited population after an in-cavity interaction of duration `t` with
/// atomic decay `gamma` and cavity leakage `kappa`, starting from `|e⟩|0⟩`
/// on resonance.
pub fn dissipative_population(g: f64, t: f64, gamma: f64, kappa: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidRate(format!("gamma must be >= 0, got {gamma}")));
    }
    if !(kappa >= 0.0) {
        return Err(Error::InvalidRate(format!("kappa must be >= 0, got {kappa}")));
    }
    // f(t) = e^{-(γ+κ)t/2} [cosh z + 8g² (cosh z - 1)/Ω² + (κ-γ) sinh z / Ω],
    // z = Ωt/2, Ω = sqrt((γ-κ)² - 16g²). All three bracket terms are even
    // in Ω; the series branch covers Ω → 0.
    let omega_sq = (gamma - kappa).powi(2) - 16.0 * g * g;
    let omega = Complex64::new(omega_sq, 0.0).sqrt();
    let z = omega * (0.5 * t);
    let (cosh_z, cosh_m1_over, sinh_over) = if z.norm() < 1e-3 {
        let z2 = z * z;
        let z4 = z2 * z2;
        (
            1.0 + z2 / 2.0 + z4 / 24.0,
            (1.0 + z2 / 12.0 + z4 / 360.0) * (t * t / 8.0),
            (1.0 + z2 / 6.0 + z4 / 120.0) * (t / 2.0),
        )
    } else {
        let c = z.cosh();
        (c, (c - 1.0) / (omega * omega), z.sinh() / omega)
    };
    let bracket = cosh_z + cosh_m1_over * (8.0 * g * g) + sinh_over * (kappa - gamma);
    let f = bracket * (-0.5 * (gamma + kappa) * t).exp();
    debug_assert!(f.im.abs() < 1e-12 * (1.0 + f.re.abs()), "imaginary residue {}", f.im);
    Ok(f.re)
}

/// State leaving a damped cavity: `diag(f(t), 1 - f(t))`.
pub fn dissipative_state(g: f64, t: f64, gamma: f64, kappa: f64) -> Result<QubitState> {
    let f = dissipative_population(g, t, gamma, kappa)?;
    Ok(QubitState::new_unchecked(Hermitian2::diag(f, 1.0 - f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rabi_examples() {
        assert_eq!(rabi_frequency(1, 1.0, 0.0), 1.0);
        assert_eq!(rabi_frequency(4, 1.0, 0.0), 2.0);
        assert!((rabi_frequency(1, 1.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn full_emission_at_half_rabi_cycle() {
        let s = Scenario::resonant_vacuum(FRAC_PI_2, 0.0);
        let rho = reduced_state(1.0, &s, &FieldState::vacuum()).unwrap();
        assert!(rho.matrix().max_abs_diff(&Hermitian2::diag(0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn no_interaction_keeps_excited_state() {
        let s = Scenario::default().with_alpha(c(1.3, -0.4)).with_detuning(0.7);
        let field = s.field();
        let rho = reduced_state(0.9, &s, &field).unwrap();
        // the untracked tail mass is booked to the ground population
        assert!(field.tail_mass() < 1e-8);
        assert!(rho.matrix().max_abs_diff(&Hermitian2::diag(1.0, 0.0)) <= field.tail_mass() + 1e-15);
    }

    #[test]
    fn flight_decay_quarter_population() {
        let s = Scenario::resonant_vacuum(FRAC_PI_4, LN_2);
        let rho = reduced_state(1.0, &s, &FieldState::vacuum()).unwrap();
        assert!(rho.matrix().max_abs_diff(&Hermitian2::diag(0.25, 0.75)) < 1e-15);
    }

    #[test]
    fn auto_cutoff_captures_required_mass() {
        for r in [0.3, 1.0, 2.0, 3.5] {
            let f = FieldState::coherent(c(r, 0.0), FockCutoff::Auto);
            let n = f.max_photon_number();
            let head: f64 = f.coefficients[..=n - AUTO_CUTOFF_MARGIN]
                .iter()
                .map(|a| a.norm_sqr())
                .sum();
            assert!(head >= AUTO_CUTOFF_MASS);
            let shorter: f64 = f.coefficients[..n - AUTO_CUTOFF_MARGIN]
                .iter()
                .map(|a| a.norm_sqr())
                .sum();
            assert!(shorter < AUTO_CUTOFF_MASS);
            assert!(f.captured_mass() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn too_short_truncation_is_rejected() {
        let s = Scenario::resonant_vacuum(1.0, 0.0)
            .with_alpha(c(2.0, 0.0))
            .with_cutoff(FockCutoff::Fixed(2));
        assert!(matches!(
            reduced_state(1.0, &s, &s.field()),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn detector_state_is_a_density_matrix_on_a_grid() {
        let scenarios = [
            Scenario::resonant_vacuum(0.65, 0.0),
            Scenario::resonant_vacuum(2.0, 0.3).with_alpha(c(1.0, 0.5)),
            Scenario::resonant_vacuum(1.1, 0.0)
                .with_detuning(1.5)
                .with_alpha(c(0.0, 2.0)),
            Scenario::resonant_vacuum(0.8, 1.0).with_cavity_losses(0.6, 0.6),
        ];
        for s in scenarios {
            let field = s.field();
            for k in 0..=60 {
                let g = 3.0 * k as f64 / 60.0;
                let rho = s.detector_state(g, &field).unwrap();
                assert!(QubitState::new(*rho.matrix()).is_ok(), "g={g} {s:?}");
            }
        }
    }

    #[test]
    fn phase_of_alpha_does_not_change_populations() {
        let base = Scenario::resonant_vacuum(1.3, 0.2).with_detuning(0.4);
        let a = base.with_alpha(Complex64::from_polar(1.5, 0.0));
        let b = base.with_alpha(Complex64::from_polar(1.5, 2.1));
        for g in [0.2, 0.9, 1.7] {
            let ra = reduced_state(g, &a, &a.field()).unwrap();
            let rb = reduced_state(g, &b, &b.field()).unwrap();
            assert!((ra.excited_population() - rb.excited_population()).abs() < 1e-14);
            assert!((ra.coherence().norm() - rb.coherence().norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn flight_damping_scales_population_exactly() {
        let s = Scenario::resonant_vacuum(1.2, 0.0).with_alpha(c(0.8, 0.1));
        let exit = reduced_state(0.7, &s, &s.field()).unwrap();
        let det = reduced_state(0.7, &s.with_flight_decay(0.9), &s.field()).unwrap();
        assert_eq!(det.excited_population(), exit.excited_population() * (-0.9f64).exp());
    }

    /// The grouped expression, without the removable-singularity rewrite.
    fn reference_population(g: f64, t: f64, gamma: f64, kappa: f64) -> f64 {
        let omega = Complex64::new((gamma - kappa).powi(2) - 16.0 * g * g, 0.0).sqrt();
        let z = omega * (t / 2.0);
        let o2 = omega * omega;
        let f = (-(gamma + kappa) * t / 2.0).exp()
            * (-8.0 * g * g * (1.0 + z.cosh()) / o2
                + (gamma - kappa).powi(2) * z.cosh() / o2
                + (kappa - gamma) * z.sinh() / omega);
        f.re
    }

    #[test]
    fn reference_population_starts_at_one() {
        for (g, gamma, kappa) in [(1.0, 0.014, 0.246), (1.0, 0.6, 0.6), (0.1, 3.0, 0.2)] {
            assert!((reference_population(g, 0.0, gamma, kappa) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rewritten_population_matches_reference_form() {
        for (g, t, gamma, kappa) in [
            (1.0, 1.0, 0.014, 0.246),
            (1.0, 2.5, 0.6, 0.6),
            (0.1, 0.7, 3.0, 0.2),
            (0.4, 3.0, 0.0, 2.0),
        ] {
            let got = dissipative_population(g, t, gamma, kappa).unwrap();
            assert!((got - reference_population(g, t, gamma, kappa)).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_damping_is_finite() {
        // Ω = 0 exactly: (γ - κ)² = 16 g²
        let f = dissipative_population(0.5, 1.3, 2.0, 0.0).unwrap();
        let near = dissipative_population(0.5 + 1e-7, 1.3, 2.0, 0.0).unwrap();
        assert!(f.is_finite());
        assert!((f - near).abs() < 1e-6);
    }

    #[test]
    fn lossless_limit_is_rabi_oscillation() {
        for k in 0..=200 {
            let gt = 10.0 * k as f64 / 200.0;
            let f = dissipative_population(1.0, gt, 0.0, 0.0).unwrap();
            assert!((f - gt.cos().powi(2)).abs() < 1e-10);
        }
        assert_eq!(dissipative_population(0.8, 0.0, 0.3, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn negative_rates_are_rejected() {
        assert!(matches!(
            dissipative_population(1.0, 1.0, -0.1, 0.0),
            Err(Error::InvalidRate(_))
        ));
        assert!(matches!(
            dissipative_population(1.0, 1.0, 0.0, -0.1),
            Err(Error::InvalidRate(_))
        ));
    }
}
