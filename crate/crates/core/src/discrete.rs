//! Conditional mutual information for equiprobable constellation inputs.
//!
//! For the link from user 1 to user 2 the received sample is
//! `Ỹ₂ = c·x₁ + d·x₂ + Z` and
//!
//! ```text
//! I(X₁; Y₂ | X₂) = H(Y₂ | X₂) − H(Y₂ | X₁, X₂)
//! ```
//!
//! where `Y₂` is the quantizer cell. Every term is a finite sum of normal
//! interval probabilities, so the result is exact up to floating point.
//!
//! Noise convention: a 1-D quantizer sees real noise of variance `σ²`; a 2-D
//! quantizer sees circularly symmetric complex noise of total variance `σ²`,
//! i.e. `σ²/2` per component.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{ChannelConfig, Constellation, Point, RatePair, UniformQuantizer};
use crate::numerics::{entropy_of, std_normal_interval, Pmf};

/// Which user's message is being decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// User 1 → receiver 2: `I(X₁; Y₂ | X₂)`.
    OneToTwo,
    /// User 2 → receiver 1: `I(X₂; Y₁ | X₁)`.
    TwoToOne,
}

/// The desired and self-interfering inputs as seen by one receiver.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Link<'a> {
    pub desired: &'a Constellation,
    pub desired_gain: f64,
    pub local: &'a Constellation,
    pub local_gain: f64,
}

impl<'a> Link<'a> {
    pub fn new(
        direction: Direction,
        c1: &'a Constellation,
        c2: &'a Constellation,
        cfg: &ChannelConfig,
    ) -> Self {
        match direction {
            Direction::OneToTwo => Link {
                desired: c1,
                desired_gain: cfg.c,
                local: c2,
                local_gain: cfg.d,
            },
            Direction::TwoToOne => Link {
                desired: c2,
                desired_gain: cfg.b,
                local: c1,
                local_gain: cfg.a,
            },
        }
    }

    pub fn mean(&self, local_idx: usize, desired_idx: usize) -> Point {
        self.desired.points()[desired_idx] * self.desired_gain
            + self.local.points()[local_idx] * self.local_gain
    }
}

pub(crate) fn check_dims(c1: &Constellation, c2: &Constellation, qz: &UniformQuantizer) -> Result<()> {
    if !qz.is_2d() && !(c1.is_real() && c2.is_real()) {
        return Err(Error::DimensionMismatch(
            "a 1-D quantizer needs constellations on the real axis",
        ));
    }
    Ok(())
}

/// Per-component noise standard deviation for the quantizer's dimensionality.
pub(crate) fn component_sd(qz: &UniformQuantizer, noise_var: f64) -> f64 {
    if qz.is_2d() {
        libm::sqrt(0.5 * noise_var)
    } else {
        libm::sqrt(noise_var)
    }
}

/// Cell probabilities on one axis for a normal sample with `mean` and `sd`.
pub(crate) fn axis_pmf(levels: usize, grain: f64, mean: f64, sd: f64) -> Vec<f64> {
    let edges = UniformQuantizer::edges(levels, grain);
    edges
        .windows(2)
        .map(|e| std_normal_interval((e[0] - mean) / sd, (e[1] - mean) / sd))
        .collect()
}

/// Output cell probabilities (flat, row-major) for a received mean.
pub(crate) fn received_pmf(qz: &UniformQuantizer, mean: Point, noise_var: f64) -> Vec<f64> {
    let sd = component_sd(qz, noise_var);
    let re = axis_pmf(qz.levels(), qz.grain(), mean.re, sd);
    if !qz.is_2d() {
        return re;
    }
    let im = axis_pmf(qz.levels2(), qz.grain(), mean.im, sd);
    let mut out = Vec::with_capacity(re.len() * im.len());
    for &pr in &re {
        out.extend(im.iter().map(|&pi| pr * pi));
    }
    out
}

/// `P(cell k)` for a real normal sample: `Φ((b_k − μ)/σ) − Φ((b_{k−1} − μ)/σ)`.
pub fn cell_prob_1d(qz: &UniformQuantizer, mean: f64, noise_sd: f64, k: usize) -> Result<f64> {
    if !(noise_sd.is_finite() && noise_sd > 0.0) {
        return Err(Error::Precondition("noise standard deviation must be positive"));
    }
    if k == 0 || k > qz.levels() {
        return Err(Error::CellOutOfRange);
    }
    let e = UniformQuantizer::edges(qz.levels(), qz.grain());
    Ok(std_normal_interval((e[k - 1] - mean) / noise_sd, (e[k] - mean) / noise_sd))
}

/// `P(cell (m, n))` for complex noise of total variance `noise_var` around `mean`.
///
/// With unit variance this is the product of `Φ(√2(b − μ))` differences.
pub fn cell_prob_2d(qz: &UniformQuantizer, mean: Point, noise_var: f64, cell: (usize, usize)) -> Result<f64> {
    if !qz.is_2d() {
        return Err(Error::DimensionMismatch("cell_prob_2d needs a 2-D quantizer"));
    }
    if !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::Precondition("noise variance must be positive"));
    }
    let (m, n) = cell;
    if m == 0 || m > qz.levels() || n == 0 || n > qz.levels2() {
        return Err(Error::CellOutOfRange);
    }
    let sd = component_sd(qz, noise_var);
    let eb = UniformQuantizer::edges(qz.levels(), qz.grain());
    let ed = UniformQuantizer::edges(qz.levels2(), qz.grain());
    let pm = std_normal_interval((eb[m - 1] - mean.re) / sd, (eb[m] - mean.re) / sd);
    let pn = std_normal_interval((ed[n - 1] - mean.im) / sd, (ed[n] - mean.im) / sd);
    Ok(pm * pn)
}

/// Output distribution at the receiver of `direction`, given the receiver's
/// own input index, mixed over the equiprobable desired input.
pub fn output_pmf_given_local(
    direction: Direction,
    local_index: usize,
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
) -> Result<Pmf> {
    check_dims(c1, c2, qz)?;
    let link = Link::new(direction, c1, c2, cfg);
    if local_index >= link.local.len() {
        return Err(Error::Precondition("local input index out of range"));
    }
    let k = link.desired.len() as f64;
    let mut mix = alloc::vec![0.0; qz.cells()];
    for j in 0..link.desired.len() {
        let p = received_pmf(qz, link.mean(local_index, j), cfg.noise_var);
        mix.iter_mut().zip(&p).for_each(|(m, v)| *m += v);
    }
    mix.iter_mut().for_each(|m| *m /= k);
    Pmf::new(mix)
}

/// `P(Y₂ | X₂ = x₂ᵢ)`: receiver 2's output given its own input.
pub fn output_pmf_given_x2(
    x2_index: usize,
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
) -> Result<Pmf> {
    output_pmf_given_local(Direction::OneToTwo, x2_index, c1, c2, cfg, qz)
}

/// Conditional mutual information of one direction, in bits per channel use.
///
/// The constellations are used as given; `cfg.p1`/`cfg.p2` only matter for
/// Gaussian inputs.
pub fn cond_mi_discrete(
    direction: Direction,
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
) -> Result<f64> {
    check_dims(c1, c2, qz)?;
    let link = Link::new(direction, c1, c2, cfg);
    let kd = link.desired.len();
    let kl = link.local.len();

    let mut h_given_local = 0.0;
    let mut h_given_both = 0.0;
    let mut mix = alloc::vec![0.0; qz.cells()];
    for i in 0..kl {
        mix.iter_mut().for_each(|m| *m = 0.0);
        let mut h_pairs = 0.0;
        for j in 0..kd {
            let p = received_pmf(qz, link.mean(i, j), cfg.noise_var);
            h_pairs += entropy_of(&p);
            mix.iter_mut().zip(&p).for_each(|(m, v)| *m += v);
        }
        mix.iter_mut().for_each(|m| *m /= kd as f64);
        h_given_local += entropy_of(&mix);
        h_given_both += h_pairs / kd as f64;
    }
    let mi = (h_given_local - h_given_both) / kl as f64;
    Ok(mi.max(0.0))
}

/// Both directions: `(I(X₁; Y₂ | X₂), I(X₂; Y₁ | X₁))`.
pub fn rate_pair_discrete(
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
) -> Result<RatePair> {
    Ok(RatePair::new(
        cond_mi_discrete(Direction::OneToTwo, c1, c2, cfg, qz)?,
        cond_mi_discrete(Direction::TwoToOne, c1, c2, cfg, qz)?,
    ))
}
