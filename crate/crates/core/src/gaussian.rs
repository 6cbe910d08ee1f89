//! Conditional mutual information `I(X₁; Y₂ | X₂)` for Gaussian inputs
//! through a 1-D quantizer.
//!
//! Both entropies reduce to one-dimensional Gaussian expectations:
//!
//! - given `X₂ = x₂`, `cX₁ + Z ~ N(0, c²P₁ + σ²)`, so `H(Y₂ | X₂)` averages the
//!   cell-pmf entropy at mean `d·x₂` over `x₂ ~ N(0, P₂)`;
//! - given both inputs only `s = cX₁ + dX₂ ~ N(0, c²P₁ + d²P₂)` matters, so
//!   `H(Y₂ | X₁, X₂)` averages the entropy at mean `s` with noise `σ`.
//!
//! The averages are taken with a Gauss–Hermite rule.

use crate::discrete::axis_pmf;
use crate::error::{Error, Result};
use crate::model::{unquantized_capacity, ChannelConfig, RatePair, UniformQuantizer};
use crate::numerics::{entropy_of, gauss_hermite, Pmf, QuadratureRule};

// The sum `cX₁ + dX₂` spreads over several noise widths at moderate SNR and
// the entropy integrand varies on the noise scale, so low orders undersample it.
pub const DEFAULT_QUAD_ORDER: usize = 128;
pub const MIN_QUAD_ORDER: usize = 16;

/// Cell pmf of a `N(mean, sd²)` sample through a 1-D quantizer.
pub fn gaussian_cell_pmf(qz: &UniformQuantizer, mean: f64, sd: f64) -> Result<Pmf> {
    if !(sd.is_finite() && sd > 0.0) {
        return Err(Error::Precondition("standard deviation must be positive"));
    }
    if qz.is_2d() {
        return Err(Error::DimensionMismatch("gaussian_cell_pmf needs a 1-D quantizer"));
    }
    Pmf::new(axis_pmf(qz.levels(), qz.grain(), mean, sd))
}

fn entropy_at(qz: &UniformQuantizer, mean: f64, sd: f64) -> f64 {
    entropy_of(&axis_pmf(qz.levels(), qz.grain(), mean, sd))
}

pub(crate) fn h_given_local(qz: &UniformQuantizer, cfg: &ChannelConfig, x2: f64) -> f64 {
    let sd = libm::sqrt(cfg.c * cfg.c * cfg.p1 + cfg.noise_var);
    entropy_at(qz, cfg.d * x2, sd)
}

pub(crate) fn h_given_both(qz: &UniformQuantizer, cfg: &ChannelConfig, s: f64) -> f64 {
    entropy_at(qz, s, libm::sqrt(cfg.noise_var))
}

/// Standard deviation of `s = cX₁ + dX₂`.
pub(crate) fn superposition_sd(cfg: &ChannelConfig) -> f64 {
    libm::sqrt(cfg.c * cfg.c * cfg.p1 + cfg.d * cfg.d * cfg.p2)
}

fn mi_with_rule(cfg: &ChannelConfig, qz: &UniformQuantizer, rule: &QuadratureRule) -> f64 {
    let sd2 = libm::sqrt(cfg.p2);
    let sds = superposition_sd(cfg);
    let h1 = rule.expect(|z| h_given_local(qz, cfg, sd2 * z));
    let h2 = rule.expect(|z| h_given_both(qz, cfg, sds * z));
    (h1 - h2).max(0.0)
}

fn check(qz: &UniformQuantizer, quad_order: usize) -> Result<()> {
    if qz.is_2d() {
        return Err(Error::DimensionMismatch("Gaussian inputs are analysed with a 1-D quantizer"));
    }
    if !(MIN_QUAD_ORDER..=crate::numerics::MAX_QUAD_ORDER).contains(&quad_order) {
        return Err(Error::QuadratureOrder(quad_order));
    }
    Ok(())
}

/// `I(X₁; Y₂ | X₂)` in bits for independent Gaussian inputs at powers `P₁`, `P₂`.
pub fn cond_mi_gaussian(cfg: &ChannelConfig, qz: &UniformQuantizer, quad_order: usize) -> Result<f64> {
    check(qz, quad_order)?;
    let rule = gauss_hermite(quad_order)?;
    Ok(mi_with_rule(cfg, qz, &rule))
}

/// Both directions for Gaussian inputs; the reverse link is the swapped channel.
pub fn rate_pair_gaussian(cfg: &ChannelConfig, qz: &UniformQuantizer, quad_order: usize) -> Result<RatePair> {
    check(qz, quad_order)?;
    let rule = gauss_hermite(quad_order)?;
    Ok(RatePair::new(
        mi_with_rule(cfg, qz, &rule),
        mi_with_rule(&cfg.swapped(), qz, &rule),
    ))
}

/// Rate through a fine, wide quantizer, which should approach the
/// unquantized capacity `½log₂(1 + c²P₁/σ²)`.
///
/// Requires the quantizer span `M·q` to cover at least eight standard
/// deviations of the received signal.
pub fn unquantized_limit_check(cfg: &ChannelConfig, m_large: usize, q_small: f64) -> Result<f64> {
    let qz = UniformQuantizer::one_dim(m_large, q_small)?;
    let received_sd = libm::sqrt(cfg.c * cfg.c * cfg.p1 + cfg.d * cfg.d * cfg.p2 + cfg.noise_var);
    if (m_large as f64) * q_small < 8.0 * received_sd {
        return Err(Error::Precondition("quantizer span must cover eight standard deviations"));
    }
    cond_mi_gaussian(cfg, &qz, DEFAULT_QUAD_ORDER)
}

/// Unquantized reference rate for the user-1 link.
pub fn unquantized_rate(cfg: &ChannelConfig) -> f64 {
    unquantized_capacity(cfg).r1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::entropy_bits;
    use proptest::prelude::*;

    fn q1(m: usize, q: f64) -> UniformQuantizer {
        UniformQuantizer::one_dim(m, q).unwrap()
    }

    #[test]
    fn cell_pmf_examples() {
        let p = gaussian_cell_pmf(&q1(2, 1.0), 0.0, 1.0).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5]);
        let p = gaussian_cell_pmf(&q1(8, 1.0), 1e6, 1.0).unwrap();
        assert_eq!(p.probs()[7], 1.0);
        assert_eq!(entropy_bits(&p), 0.0);
        assert!(gaussian_cell_pmf(&q1(8, 1.0), 0.0, 0.0).is_err());
        let q2 = UniformQuantizer::two_dim(8, 1.0).unwrap();
        assert!(gaussian_cell_pmf(&q2, 0.0, 1.0).is_err());
    }

    #[test]
    fn table1_gaussian_rows() {
        let r = cond_mi_gaussian(&ChannelConfig::symmetric(3.0).unwrap(), &q1(8, 1.4), 64).unwrap();
        assert!((r - 0.88916).abs() < 1e-3, "{r}");
        let r = cond_mi_gaussian(&ChannelConfig::symmetric(1.0).unwrap(), &q1(8, 0.95), 64).unwrap();
        assert!((r - 0.46432).abs() < 1e-3, "{r}");
    }

    #[test]
    fn large_grain_saturates_to_sign_channel() {
        let cfg = ChannelConfig::symmetric(3.0).unwrap();
        let r = cond_mi_gaussian(&cfg, &q1(8, 40.0), 64).unwrap();
        assert!((r - 0.37814).abs() < 1e-3, "{r}");
        let sign = cond_mi_gaussian(&cfg, &q1(2, 1.0), 64).unwrap();
        assert!((r - sign).abs() < 1e-6, "{r} vs {sign}");
    }

    #[test]
    fn vanishing_power_gives_vanishing_rate() {
        let cfg = ChannelConfig::new([1.0; 4], 1.0, 1e-9, 3.0).unwrap();
        let r = cond_mi_gaussian(&cfg, &q1(8, 1.0), 64).unwrap();
        assert!(r < 1e-8, "{r}");
        let silent = ChannelConfig::new([1.0; 4], 1.0, 0.0, 3.0).unwrap();
        assert!(cond_mi_gaussian(&silent, &q1(8, 1.0), 64).unwrap() < 1e-12);
    }

    #[test]
    fn fine_quantizer_approaches_capacity() {
        for snr in [1.0, 3.0] {
            let cfg = ChannelConfig::symmetric(snr).unwrap();
            let r = unquantized_limit_check(&cfg, 512, 0.05).unwrap();
            let cap = unquantized_rate(&cfg);
            assert!((r / cap - 1.0).abs() < 0.02, "snr={snr} r={r} cap={cap}");
            let coarse = cond_mi_gaussian(&cfg, &q1(8, 1.4), 64).unwrap();
            assert!(r >= coarse);
        }
        let cfg = ChannelConfig::symmetric(3.0).unwrap();
        assert!(unquantized_limit_check(&cfg, 8, 0.05).is_err());
    }

    #[test]
    fn argument_validation() {
        let cfg = ChannelConfig::symmetric(1.0).unwrap();
        assert_eq!(cond_mi_gaussian(&cfg, &q1(8, 1.0), 8), Err(Error::QuadratureOrder(8)));
        assert_eq!(cond_mi_gaussian(&cfg, &q1(8, 1.0), 257), Err(Error::QuadratureOrder(257)));
        let q2 = UniformQuantizer::two_dim(8, 1.0).unwrap();
        assert!(matches!(cond_mi_gaussian(&cfg, &q2, 64), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        for snr in 1..=7 {
            let cfg = ChannelConfig::symmetric(snr as f64).unwrap();
            for q in [0.3, 1.0, 1.25, 1.55, 1.9, 2.2, 3.0] {
                let a = cond_mi_gaussian(&cfg, &q1(8, q), DEFAULT_QUAD_ORDER).unwrap();
                let b = cond_mi_gaussian(&cfg, &q1(8, q), 2 * DEFAULT_QUAD_ORDER).unwrap();
                assert!((a - b).abs() <= 1e-6, "snr={snr} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetric_pair_is_balanced() {
        let cfg = ChannelConfig::symmetric(2.0).unwrap();
        let r = rate_pair_gaussian(&cfg, &q1(8, 1.0), 64).unwrap();
        assert!((r.r1 - r.r2).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pmf_normalizes(mean in -50.0f64..50.0, sd in 0.01f64..20.0, h in 1usize..40, q in 0.01f64..5.0) {
            let p = gaussian_cell_pmf(&q1(2 * h, q), mean, sd).unwrap();
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn bounded_by_levels_and_capacity(snr in 0.01f64..30.0, q in 0.05f64..4.0, h in 1usize..8) {
            let cfg = ChannelConfig::symmetric(snr).unwrap();
            let m = 2 * h;
            let r = cond_mi_gaussian(&cfg, &q1(m, q), 64).unwrap();
            let bound = (m as f64).log2().min(unquantized_rate(&cfg));
            prop_assert!(r >= 0.0 && r <= bound + 1e-9, "r={} bound={}", r, bound);
        }

        #[test]
        fn nondecreasing_in_power(p in 0.05f64..10.0, dp in 0.0f64..5.0, q in 0.2f64..3.0) {
            let qz = q1(8, q);
            let lo = cond_mi_gaussian(&ChannelConfig::new([1.0; 4], 1.0, p, 2.0).unwrap(), &qz, 64).unwrap();
            let hi = cond_mi_gaussian(&ChannelConfig::new([1.0; 4], 1.0, p + dp, 2.0).unwrap(), &qz, 64).unwrap();
            prop_assert!(hi >= lo - 1e-9, "{} < {}", hi, lo);
        }
    }
}
