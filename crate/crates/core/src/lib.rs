//! Achievable information rates for the Gaussian two-way channel whose
//! receivers apply uniform saturating output quantization.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs:
//!
//! - [`numerics`]: normal CDF, entropy, Gauss–Hermite rules, convex hulls.
//! - [`model`]: constellations, quantizers, channel configuration.
//! - [`discrete`]: exact conditional mutual information for constellation inputs.
//! - [`gaussian`]: conditional mutual information for Gaussian inputs.
//! - [`search`]: grain and rotation sweeps, UD-pair checks, rate regions.
//! - [`oracle`]: Monte Carlo estimators used to cross-check the analytic engines.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod discrete;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod search;

pub use discrete::{cond_mi_discrete, rate_pair_discrete, Direction};
pub use error::{Error, Result};
pub use gaussian::{cond_mi_gaussian, rate_pair_gaussian, DEFAULT_QUAD_ORDER};
pub use model::{ChannelConfig, Constellation, Point, RatePair, UniformQuantizer};
pub use numerics::{entropy_bits, std_normal_cdf, Pmf, RegionPolygon};
pub use search::{SweepResult, UdReport};
