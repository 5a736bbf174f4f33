//! Parameter sweeps over one axis, and the recommended interaction time.

mod config;
mod tau_star;

pub use config::{Axis, Config, PriorConfig, ProbeConfig, Quantity, ScenarioConfig, Setup, SweepConfig};
pub use tau_star::{find_tau_star, TauStar, TAU_STAR_COARSE_POINTS, TAU_STAR_TOLERANCE, TAU_STAR_WINDOW};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{cr_bound_ml, cr_bound_mmse};
use crate::error::{Error, Result};
use crate::ml::{average_cost, cost_max, ml_average_estimate, ml_povm};
use crate::mmse::{self, average_estimate};

/// A validated sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    /// Replace `τ_c` by the recommended time at every axis point.
    pub optimize_tau: bool,
    pub base: Setup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn unsupported(msg: impl Into<String>) -> Error {
    Error::UnsupportedCombination(msg.into())
}

impl SweepSpec {
    pub fn new(sweep: &SweepConfig, base: Setup) -> Result<Self> {
        let (lo, hi, n_points) = sweep.range;
        let spec = Self {
            quantity: sweep.quantity,
            axis: sweep.axis,
            lo,
            hi,
            n_points,
            optimize_tau: sweep.optimize_tau,
            base,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "sweep range needs lo < hi, got ({}, {})",
                self.lo, self.hi
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidScenario("sweep needs n_points >= 2".into()));
        }
        let q = self.quantity;
        let s = &self.base.scenario;
        if q.is_ml() || q == Quantity::DissipativeCost {
            if s.alpha.norm() != 0.0 {
                return Err(unsupported(format!("{q:?} requires alpha = 0")));
            }
            if s.delta != 0.0 || self.axis == Axis::Delta {
                return Err(unsupported(format!("{q:?} requires delta = 0")));
            }
        }
        if q.is_ml() && s.is_dissipative() {
            return Err(unsupported(format!("{q:?} requires gamma = kappa = 0")));
        }
        if self.axis == Axis::GOverG0 && !q.depends_on_g() {
            return Err(unsupported(format!(
                "{q:?} does not depend on g; axis g_over_g0 is meaningless"
            )));
        }
        if self.optimize_tau && (q.is_ml() || self.axis == Axis::TauC) {
            return Err(unsupported("optimize_tau applies to MMSE quantities on a non-tau axis"));
        }
        if self.axis == Axis::TauC && self.lo <= 0.0 && (q.is_ml() || q == Quantity::DissipativeCost) {
            return Err(unsupported(format!("{q:?} needs g0 tau_c > 0")));
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.n_points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / n as f64
                }
            })
            .collect()
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["axis"];
        if self.optimize_tau {
            cols.push("g0_tau_star");
        }
        cols.extend(match self.quantity {
            Quantity::MmseEigenvalues => &["eig_lo", "eig_hi"][..],
            Quantity::MmseCost | Quantity::DissipativeCost => &["eig_lo", "eig_hi", "c_min"][..],
            Quantity::MmseAvgEstimate => &["eig_lo", "eig_hi", "c_min", "avg_estimate"][..],
            Quantity::MmseCrBound => &[
                "eig_lo",
                "eig_hi",
                "c_min",
                "avg_estimate",
                "cr_bound",
                "mse",
                "first_power_bound",
            ][..],
            Quantity::MlCost => &["c_max", "cost", "cost_quadrature"][..],
            Quantity::MlAvgEstimate => &["c_max", "avg_estimate"][..],
            Quantity::MlCrBound => &["c_max", "avg_estimate", "cr_bound", "mse", "first_power_bound"][..],
        });
        cols.into_iter().map(String::from).collect()
    }

    /// The setup at axis value `x`.
    pub fn point(&self, x: f64) -> Setup {
        let mut p = self.base;
        let g0 = p.prior.g0;
        match self.axis {
            Axis::TauC => p.scenario.tau_c = x / g0,
            Axis::GOverG0 => p.g = x * g0,
            Axis::Delta => p.scenario.delta = x * g0,
            Axis::GammaTauF => p.scenario.gamma_tau_f = x,
        }
        p
    }

    fn row(&self, x: f64) -> Result<Vec<f64>> {
        let mut setup = self.point(x);
        let mut row = vec![x];
        let field = setup.scenario.field();
        if self.optimize_tau {
            let star = find_tau_star(&setup.prior, &setup.scenario, &field)?;
            setup.scenario.tau_c = star.tau_c;
            row.push(star.tau_c * setup.prior.g0);
        }
        let Setup { prior, scenario, g } = setup;
        if self.quantity.is_ml() {
            let povm = ml_povm(&prior, scenario.tau_c, scenario.gamma_tau_f)?;
            let c = povm.c_max;
            match self.quantity {
                Quantity::MlCost => row.extend([c, cost_max(&povm), average_cost(&povm)]),
                Quantity::MlAvgEstimate => row.extend([c, ml_average_estimate(&povm, g)]),
                _ => {
                    let b = cr_bound_ml(&povm, g)?;
                    row.extend([
                        c,
                        ml_average_estimate(&povm, g),
                        b.lower_bound,
                        b.mse,
                        b.first_power_bound,
                    ]);
                }
            }
            return Ok(row);
        }
        let res = mmse::solve(&prior, &scenario, &field)?;
        let [lo, hi] = if res.estimates[0] <= res.estimates[1] {
            res.estimates
        } else {
            [res.estimates[1], res.estimates[0]]
        };
        row.extend([lo, hi]);
        if self.quantity == Quantity::MmseEigenvalues {
            return Ok(row);
        }
        row.push(res.c_min);
        if matches!(self.quantity, Quantity::MmseAvgEstimate | Quantity::MmseCrBound) {
            row.push(average_estimate(&res, g, &scenario, &field)?);
        }
        if self.quantity == Quantity::MmseCrBound {
            let b = cr_bound_mmse(&res, g, &scenario, &field)?;
            row.extend([b.lower_bound, b.mse, b.first_power_bound]);
        }
        Ok(row)
    }
}

/// Evaluates every axis point (in parallel) and returns rows in axis order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let rows = spec
        .axis_values()
        .into_par_iter()
        .map(|x| spec.row(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: spec.columns(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::Prior;
    use crate::Scenario;

    fn spec(quantity: Quantity, axis: Axis, range: (f64, f64, usize), base: Setup) -> Result<SweepSpec> {
        SweepSpec::new(
            &SweepConfig {
                quantity,
                axis,
                range,
                optimize_tau: false,
            },
            base,
        )
    }

    fn base() -> Setup {
        Setup {
            prior: Prior::gaussian(1.0, 1.0).unwrap(),
            scenario: Scenario::resonant_vacuum(0.7, 0.0),
            g: 1.0,
        }
    }

    #[test]
    fn mmse_cost_curve_over_tau() {
        let s = spec(Quantity::MmseCost, Axis::TauC, (0.01, 3.0, 300), base()).unwrap();
        let t = run_sweep(&s).unwrap();
        let c = t.column("c_min").unwrap();
        assert!((c[0] - 1.0).abs() < 1e-3);
        let (imin, _) = c
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        assert!(imin > 0 && imin < 299);
        assert!((0.5..0.7).contains(&t.rows[imin][0]));
    }

    #[test]
    fn detuning_minimum_at_resonance() {
        let s = spec(Quantity::MmseCost, Axis::Delta, (-3.0, 3.0, 21), base()).unwrap();
        let c = run_sweep(&s).unwrap().column("c_min").unwrap();
        let imin = (0..21).min_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
        assert_eq!(imin, 10);
    }

    #[test]
    fn lossless_dissipative_sweep_equals_unitary() {
        let a = run_sweep(&spec(Quantity::MmseCost, Axis::TauC, (0.1, 3.0, 30), base()).unwrap()).unwrap();
        let b = run_sweep(&spec(Quantity::DissipativeCost, Axis::TauC, (0.1, 3.0, 30), base()).unwrap()).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            for (u, v) in x.iter().zip(y) {
                assert!((u - v).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_unsupported_combinations() {
        let mut b = base();
        b.scenario.delta = 0.5;
        assert!(matches!(
            spec(Quantity::MlCost, Axis::TauC, (0.1, 1.0, 5), b),
            Err(Error::UnsupportedCombination(_))
        ));
        assert!(spec(Quantity::MlCost, Axis::Delta, (0.1, 1.0, 5), base()).is_err());
        assert!(spec(Quantity::MmseCost, Axis::GOverG0, (0.1, 1.0, 5), base()).is_err());
        assert!(spec(Quantity::MmseCost, Axis::TauC, (1.0, 1.0, 5), base()).is_err());
        assert!(spec(Quantity::MmseCost, Axis::TauC, (0.0, 1.0, 1), base()).is_err());
    }

    #[test]
    fn columns_match_rows() {
        for q in [
            Quantity::MmseEigenvalues,
            Quantity::MmseCost,
            Quantity::MmseAvgEstimate,
            Quantity::MmseCrBound,
            Quantity::MlCost,
            Quantity::MlAvgEstimate,
            Quantity::MlCrBound,
            Quantity::DissipativeCost,
        ] {
            let s = spec(q, Axis::TauC, (0.2, 1.2, 3), base()).unwrap();
            let t = run_sweep(&s).unwrap();
            assert!(t.rows.iter().all(|r| r.len() == t.columns.len()), "{q:?}");
        }
    }

    #[test]
    fn optimize_tau_column() {
        let mut s = spec(Quantity::MmseCost, Axis::GammaTauF, (0.0, 1.0, 3), base()).unwrap();
        s.optimize_tau = true;
        let t = run_sweep(&s).unwrap();
        assert_eq!(t.columns[1], "g0_tau_star");
        assert!((t.rows[0][1] - 0.5772).abs() < 1e-3, "{}", t.rows[0][1]);
    }
}
