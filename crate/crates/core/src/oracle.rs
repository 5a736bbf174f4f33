//! Independent checks of the closed forms: Monte-Carlo simulation of the
//! measurement and brute-force Riemann sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Hermitian2;
use crate::dynamics::{FieldState, Scenario};
use crate::error::Result;
use crate::ml::{conditional_pdf, ml_average_estimate, MlPovm};
use crate::mmse::{GammaTriple, MmseResult};
use crate::prior::Prior;

/// Number of independent substreams a Monte-Carlo run is split into.
pub const MC_SHARDS: usize = 64;
/// Grid size of the inverse-CDF sampler for `p(g̃|g)`.
pub const ESTIMATE_GRID: usize = 2048;
pub const HISTOGRAM_BINS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n_samples: usize,
    pub empirical_cost: f64,
    pub standard_error: f64,
    pub analytic_cost: f64,
    pub z_score: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn new(lo: f64, hi: f64, samples: &[f64]) -> Self {
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        for &x in samples {
            let bin = (((x - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[bin] += 1;
        }
        Self { lo, hi, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateDistribution {
    pub n_samples: usize,
    pub seed: u64,
    pub g: f64,
    pub mean: f64,
    pub standard_error: f64,
    /// `∫ g̃ p(g̃|g) dg̃` by quadrature.
    pub quadrature_mean: f64,
    pub z_score: f64,
    pub histogram: Histogram,
}

/// Sum with pairwise splitting; the result depends only on the order of
/// `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Uniform draw in the open interval `(0, 1)`.
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

fn shard_sizes(n: usize) -> Vec<usize> {
    (0..MC_SHARDS)
        .map(|k| n / MC_SHARDS + usize::from(k < n % MC_SHARDS))
        .collect()
}

/// Runs `draw` `n` times over [`MC_SHARDS`] seeded substreams and returns
/// every draw, in shard order.
fn sharded<F>(n: usize, seed: u64, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha20Rng) -> Result<f64> + Sync,
{
    let shards: Vec<Result<Vec<f64>>> = shard_sizes(n)
        .into_par_iter()
        .enumerate()
        .map(|(k, size)| {
            let mut rng = shard_rng(seed, k);
            (0..size).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for shard in shards {
        out.extend(shard?);
    }
    Ok(out)
}

fn mean_and_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = pairwise_sum(samples) / n;
    let centred: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let variance = pairwise_sum(&centred) / (n - 1.0);
    (mean, (variance / n).sqrt())
}

fn z_score(empirical: f64, analytic: f64, standard_error: f64) -> f64 {
    let diff = (empirical - analytic).abs();
    if standard_error > 0.0 {
        diff / standard_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Simulated average quadratic cost of the MMSE measurement `result`.
///
/// Each draw takes `g` from the prior by inverse CDF, prepares `ρ(g)`,
/// picks an outcome with the Born probabilities of the eigenprojectors and
/// records `(λ_i − g)²`.
pub fn mc_quadratic_cost(
    result: &MmseResult,
    prior: &Prior,
    scenario: &Scenario,
    field: &FieldState,
    n: usize,
    seed: u64,
) -> Result<McReport> {
    let costs = sharded(n, seed, |rng| {
        let g = prior.quantile(open_unit(rng));
        let rho = scenario.detector_state(g, field)?;
        let p = result.outcome_probabilities(rho.matrix());
        let outcome = usize::from(rng.random::<f64>() * (p[0] + p[1]) >= p[0]);
        Ok((result.estimates[outcome] - g).powi(2))
    })?;
    let (empirical_cost, standard_error) = mean_and_error(&costs);
    Ok(McReport {
        n_samples: n,
        empirical_cost,
        standard_error,
        analytic_cost: result.c_min,
        z_score: z_score(empirical_cost, result.c_min, standard_error),
        seed,
    })
}

/// Piecewise-constant inverse-CDF sampler of `p(g̃|g)` on a uniform grid.
struct GridSampler {
    lo: f64,
    step: f64,
    cumulative: Vec<f64>,
}

impl GridSampler {
    fn new(povm: &MlPovm, g: f64) -> Self {
        let (lo, hi) = povm.prior.integration_support();
        let step = (hi - lo) / (ESTIMATE_GRID - 1) as f64;
        let pdf: Vec<f64> = (0..ESTIMATE_GRID)
            .map(|i| conditional_pdf(povm, g, lo + step * i as f64).max(0.0))
            .collect();
        let mut cumulative = Vec::with_capacity(ESTIMATE_GRID);
        let mut total = 0.0;
        cumulative.push(0.0);
        for w in pdf.windows(2) {
            total += 0.5 * step * (w[0] + w[1]);
            cumulative.push(total);
        }
        Self { lo, step, cumulative }
    }

    fn sample(&self, u: f64) -> f64 {
        let target = u * self.cumulative[self.cumulative.len() - 1];
        let cell = self
            .cumulative
            .partition_point(|&c| c <= target)
            .clamp(1, self.cumulative.len() - 1)
            - 1;
        let (c0, c1) = (self.cumulative[cell], self.cumulative[cell + 1]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        self.lo + self.step * (cell as f64 + frac)
    }
}

/// Draws `n` estimates from `p(g̃|g)`.
pub fn mc_estimate_samples(povm: &MlPovm, g: f64, n: usize, seed: u64) -> Vec<f64> {
    let sampler = GridSampler::new(povm, g);
    sharded(n, seed, |rng| Ok(sampler.sample(open_unit(rng)))).expect("grid sampling is infallible")
}

/// Empirical mean and histogram of the ML estimate at true coupling `g`,
/// compared with the quadrature mean.
pub fn mc_estimate_distribution(povm: &MlPovm, g: f64, n: usize, seed: u64) -> EstimateDistribution {
    let samples = mc_estimate_samples(povm, g, n, seed);
    let (mean, standard_error) = mean_and_error(&samples);
    let quadrature_mean = ml_average_estimate(povm, g);
    let (lo, hi) = povm.prior.integration_support();
    EstimateDistribution {
        n_samples: n,
        seed,
        g,
        mean,
        standard_error,
        quadrature_mean,
        z_score: z_score(mean, quadrature_mean, standard_error),
        histogram: Histogram::new(lo, hi, &samples),
    }
}

/// Kolmogorov–Smirnov distance between `samples` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// `Γ_k = ∫ g^k ρ(g) p(g) dg` by a midpoint sum over the integration
/// support.
pub fn brute_force_gamma(prior: &Prior, scenario: &Scenario, field: &FieldState, n_grid: usize) -> Result<GammaTriple> {
    let (lo, hi) = prior.integration_support();
    let h = (hi - lo) / n_grid as f64;
    let mut gamma0 = Hermitian2::ZERO;
    let mut gamma1 = Hermitian2::ZERO;
    let mut gamma2 = Hermitian2::ZERO;
    for i in 0..n_grid {
        let g = lo + h * (i as f64 + 0.5);
        let rho = *scenario.detector_state(g, field)?.matrix() * (prior.density(g) * h);
        gamma0 = gamma0 + rho;
        gamma1 = gamma1 + rho * g;
        gamma2 = gamma2 + rho * (g * g);
    }
    Ok(GammaTriple { gamma0, gamma1, gamma2 })
}
