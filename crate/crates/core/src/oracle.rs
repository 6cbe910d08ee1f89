//! Monte Carlo estimators of the conditional mutual information, used as an
//! independent check on the analytic engines.
//!
//! Samples are drawn in [`MC_BATCHES`] batches. Batch `b` uses a ChaCha8
//! stream seeded with `seed ^ b`, so an estimate is reproducible from
//! `(configuration, samples, seed)` alone. The standard error comes from the
//! spread of the per-batch estimates.

use alloc::vec::Vec;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::discrete::{check_dims, component_sd, Direction, Link};
use crate::error::{Error, Result};
use crate::gaussian::{h_given_both, h_given_local, superposition_sd};
use crate::model::{ChannelConfig, Constellation, Point, UniformQuantizer};
use crate::numerics::std_normal_quantile;

pub const MC_BATCHES: usize = 20;
pub const MIN_SAMPLES_DISCRETE: usize = 10_000;
pub const MIN_SAMPLES_GAUSSIAN: usize = 100_000;
/// Equal-probability strata over the conditioning variable in the Gaussian estimator.
pub const GAUSSIAN_STRATA: usize = 16;

/// A Monte Carlo estimate in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    /// First-order upper bound on the upward bias of the estimator
    /// (zero for estimators without plug-in bias).
    pub bias_guard: f64,
}

impl McEstimate {
    /// Whether `analytic` is consistent with the estimate: the plug-in
    /// estimator overshoots by at most `bias_guard`, so
    /// `analytic − value ∈ [−(k·stderr + bias_guard), k·stderr]`.
    pub fn agrees_with(&self, analytic: f64, k: f64) -> bool {
        let diff = analytic - self.value;
        diff >= -(k * self.stderr + self.bias_guard) && diff <= k * self.stderr
    }
}

fn batch_sizes(samples: usize) -> impl Iterator<Item = usize> {
    let base = samples / MC_BATCHES;
    let extra = samples % MC_BATCHES;
    (0..MC_BATCHES).map(move |b| base + usize::from(b < extra))
}

// One key per run, one stream per batch: XOR-ing the batch index into the
// seed would let neighbouring seeds reuse each other's batches.
fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

/// Entropy in bits of the empirical distribution given by `counts`.
fn count_entropy(counts: &[u64]) -> (f64, u64) {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return (0.0, 0);
    }
    let nf = n as f64;
    let s: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let cf = c as f64;
            cf * libm::log2(cf)
        })
        .sum();
    ((libm::log2(nf) - s / nf).max(0.0), n)
}

/// Plug-in `H(Y | local) − H(Y | local, desired)` from joint counts laid out
/// as `[local][desired][cell]`.
fn plugin_cond_mi(counts: &[u64], kl: usize, kd: usize, cells: usize) -> f64 {
    let total: u64 = counts.iter().sum();
    let nf = total as f64;
    let mut h_local = 0.0;
    let mut h_both = 0.0;
    let mut row = alloc::vec![0u64; cells];
    for i in 0..kl {
        row.iter_mut().for_each(|r| *r = 0);
        for j in 0..kd {
            let block = &counts[(i * kd + j) * cells..(i * kd + j + 1) * cells];
            let (h, n) = count_entropy(block);
            h_both += n as f64 / nf * h;
            row.iter_mut().zip(block).for_each(|(r, c)| *r += c);
        }
        let (h, n) = count_entropy(&row);
        h_local += n as f64 / nf * h;
    }
    h_local - h_both
}

/// Simulates the channel and returns the plug-in conditional MI of `direction`.
pub fn mc_cond_mi(
    direction: Direction,
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES_DISCRETE {
        return Err(Error::TooFewSamples { got: samples, min: MIN_SAMPLES_DISCRETE });
    }
    check_dims(c1, c2, qz)?;
    let link = Link::new(direction, c1, c2, cfg);
    let (kl, kd, cells) = (link.local.len(), link.desired.len(), qz.cells());
    let sd = component_sd(qz, cfg.noise_var);
    let two_dim = qz.is_2d();

    let mut total = alloc::vec![0u64; kl * kd * cells];
    let mut batch = alloc::vec![0u64; kl * kd * cells];
    let mut batch_values = Vec::with_capacity(MC_BATCHES);
    for (b, n) in batch_sizes(samples).enumerate() {
        let mut rng = batch_rng(seed, b);
        batch.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            let i = rng.random_range(0..kl);
            let j = rng.random_range(0..kd);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if two_dim { rng.sample(StandardNormal) } else { 0.0 };
            let y = link.mean(i, j) + Point::new(sd * re, sd * im);
            let cell = qz.flat_index(qz.quantize(y));
            batch[(i * kd + j) * cells + cell] += 1;
        }
        batch_values.push(plugin_cond_mi(&batch, kl, kd, cells));
        total.iter_mut().zip(&batch).for_each(|(t, c)| *t += c);
    }

    let (_, stderr) = mean_and_stderr(&batch_values);
    let bias_guard = ((kl * kd - kl) * (cells - 1)) as f64
        / (2.0 * samples as f64 * core::f64::consts::LN_2);
    Ok(McEstimate {
        value: plugin_cond_mi(&total, kl, kd, cells),
        stderr,
        samples,
        seed,
        bias_guard,
    })
}

/// Gaussian-input estimate of `I(X₁; Y₂ | X₂)`.
///
/// The conditioning variables (`x₂` for `H(Y₂|X₂)` and `s = cX₁ + dX₂` for
/// `H(Y₂|X₁,X₂)`) are sampled with stratification over [`GAUSSIAN_STRATA`]
/// quantile bins, while the cell pmf at each sample is exact. Both terms
/// share the same standard normal draws.
pub fn mc_cond_mi_gaussian(
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES_GAUSSIAN {
        return Err(Error::TooFewSamples { got: samples, min: MIN_SAMPLES_GAUSSIAN });
    }
    if qz.is_2d() {
        return Err(Error::DimensionMismatch("Gaussian inputs are analysed with a 1-D quantizer"));
    }
    let sd2 = libm::sqrt(cfg.p2);
    let sds = superposition_sd(cfg);

    let mut batch_values = Vec::with_capacity(MC_BATCHES);
    for (b, n) in batch_sizes(samples).enumerate() {
        let mut rng = batch_rng(seed, b);
        let mut sums = [0.0f64; GAUSSIAN_STRATA];
        let mut counts = [0usize; GAUSSIAN_STRATA];
        for k in 0..n {
            let stratum = k % GAUSSIAN_STRATA;
            let u: f64 = rng.sample(Open01);
            let z = std_normal_quantile((stratum as f64 + u) / GAUSSIAN_STRATA as f64);
            sums[stratum] += h_given_local(qz, cfg, sd2 * z) - h_given_both(qz, cfg, sds * z);
            counts[stratum] += 1;
        }
        let value = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| s / c as f64)
            .sum::<f64>()
            / GAUSSIAN_STRATA as f64;
        batch_values.push(value);
    }
    let (value, stderr) = mean_and_stderr(&batch_values);
    Ok(McEstimate {
        value,
        stderr,
        samples,
        seed,
        bias_guard: 0.0,
    })
}
