//! Constellations, uniform saturating quantizers and the channel configuration.

use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::error::{Error, Result};

/// A signal point in the complex plane. 1-D signals have `im == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl Point {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Complex product.
    pub fn mul_complex(self, other: Point) -> Point {
        Point::new(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.re * rhs, self.im * rhs)
    }
}

/// `e^{jθ}` for an angle in degrees. Multiples of 90° are exact.
pub fn unit_phasor(theta_deg: f64) -> Point {
    let r = {
        let r = libm::fmod(theta_deg, 360.0);
        if r < 0.0 { r + 360.0 } else { r }
    };
    if r == 0.0 {
        Point::new(1.0, 0.0)
    } else if r == 90.0 {
        Point::new(0.0, 1.0)
    } else if r == 180.0 {
        Point::new(-1.0, 0.0)
    } else if r == 270.0 {
        Point::new(0.0, -1.0)
    } else {
        let rad = theta_deg.to_radians();
        Point::new(libm::cos(rad), libm::sin(rad))
    }
}

/// A finite set of equiprobable, distinct signal points.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Point>,
}

impl Constellation {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConstellation("no points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConstellation("non-finite point"));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::InvalidConstellation("duplicate point"));
            }
        }
        Ok(Self { points })
    }

    /// Scales `points` so that their average power equals `power`.
    pub fn with_power(points: Vec<Point>, power: f64) -> Result<Self> {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidConstellation("power must be positive"));
        }
        let c = Self::new(points)?;
        let current = c.power();
        if current == 0.0 {
            return Err(Error::InvalidConstellation("cannot normalize a zero-power constellation"));
        }
        c.scaled(libm::sqrt(power / current))
    }

    /// A single point: a deterministic input.
    pub fn singleton(p: Point) -> Result<Self> {
        Self::new(alloc::vec![p])
    }

    /// `k`-PAM on the real axis: `±δ, ±3δ, …, ±(k−1)δ` with average power `power`.
    pub fn pam(k: usize, power: f64) -> Result<Self> {
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::InvalidConstellation("PAM size must be even and at least 2"));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidConstellation("power must be positive"));
        }
        // mean of (2i-k+1)^2 over i is (k^2-1)/3
        let kf = k as f64;
        let delta = libm::sqrt(3.0 * power / (kf * kf - 1.0));
        let points = (0..k)
            .map(|i| Point::real((2.0 * i as f64 - kf + 1.0) * delta))
            .collect();
        Self::new(points)
    }

    /// `k`-PSK on the circle of radius `√power`, first point at `phase0_deg`.
    pub fn psk(k: usize, power: f64, phase0_deg: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConstellation("PSK size must be at least 2"));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidConstellation("power must be positive"));
        }
        let radius = libm::sqrt(power);
        let step = 360.0 / k as f64;
        let points = (0..k)
            .map(|i| unit_phasor(phase0_deg + step * i as f64) * radius)
            .collect();
        Self::new(points)
    }

    /// Multiplies every point by `e^{jθ}`.
    pub fn rotate(&self, theta_deg: f64) -> Self {
        let w = unit_phasor(theta_deg);
        Self {
            points: self.points.iter().map(|p| p.mul_complex(w)).collect(),
        }
    }

    /// Multiplies every point by the amplitude factor `amp > 0`.
    pub fn scaled(&self, amp: f64) -> Result<Self> {
        if !(amp.is_finite() && amp > 0.0) {
            return Err(Error::InvalidConstellation("scale must be positive"));
        }
        Ok(Self {
            points: self.points.iter().map(|&p| p * amp).collect(),
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Average power `(1/K) Σ |x|²`.
    pub fn power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// True when every point lies on the real axis (up to rounding left by rotations).
    pub fn is_real(&self) -> bool {
        let scale = libm::sqrt(self.power()).max(1.0);
        self.points.iter().all(|p| libm::fabs(p.im) <= 1e-12 * scale)
    }
}

/// Uniform saturating quantizer, applied independently per dimension.
///
/// `levels` cells on the real axis; `levels2` cells on the imaginary axis,
/// with `levels2 == 0` meaning a 1-D quantizer. Both axes share the grain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformQuantizer {
    levels: usize,
    levels2: usize,
    grain: f64,
}

/// Levels used unless stated otherwise (3-bit converters).
pub const DEFAULT_LEVELS: usize = 8;

/// A quantizer output cell, 1-based per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    One(usize),
    Two(usize, usize),
}

fn check_levels(m: usize) -> Result<()> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidQuantizer("level count must be even and at least 2"));
    }
    Ok(())
}

impl UniformQuantizer {
    pub fn new(levels: usize, levels2: usize, grain: f64) -> Result<Self> {
        check_levels(levels)?;
        if levels2 != 0 {
            check_levels(levels2)?;
        }
        if !(grain.is_finite() && grain > 0.0) {
            return Err(Error::InvalidQuantizer("grain must be positive"));
        }
        Ok(Self { levels, levels2, grain })
    }

    pub fn one_dim(levels: usize, grain: f64) -> Result<Self> {
        Self::new(levels, 0, grain)
    }

    /// Square 2-D quantizer with `levels` cells on each axis.
    pub fn two_dim(levels: usize, grain: f64) -> Result<Self> {
        Self::new(levels, levels, grain)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn levels2(&self) -> usize {
        self.levels2
    }

    pub fn grain(&self) -> f64 {
        self.grain
    }

    pub fn is_2d(&self) -> bool {
        self.levels2 != 0
    }

    /// Total number of output cells.
    pub fn cells(&self) -> usize {
        if self.is_2d() {
            self.levels * self.levels2
        } else {
            self.levels
        }
    }

    /// Finite boundaries `b_i = (i − M/2)·q`, `i = 1..M−1`, on the real axis.
    pub fn boundaries(&self) -> Vec<f64> {
        axis_boundaries(self.levels, self.grain)
    }

    /// Finite boundaries on the imaginary axis (empty for a 1-D quantizer).
    pub fn boundaries2(&self) -> Vec<f64> {
        if self.is_2d() {
            axis_boundaries(self.levels2, self.grain)
        } else {
            Vec::new()
        }
    }

    /// Boundaries with `−∞` and `+∞` attached, so cell `k` is `[e[k-1], e[k])`.
    pub(crate) fn edges(levels: usize, grain: f64) -> Vec<f64> {
        let mut e = Vec::with_capacity(levels + 1);
        e.push(f64::NEG_INFINITY);
        e.extend(axis_boundaries(levels, grain));
        e.push(f64::INFINITY);
        e
    }

    /// 1-based cell of a real value on an axis with `levels` cells.
    fn axis_cell(levels: usize, grain: f64, y: f64) -> usize {
        let half = (levels / 2) as f64;
        // count of boundaries b_i <= y, computed exactly as in `axis_boundaries`
        let (mut lo, mut hi) = (0usize, levels - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if ((mid + 1) as f64 - half) * grain <= y {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo + 1
    }

    /// Cell of a received sample. A 1-D quantizer looks only at the real part.
    pub fn quantize(&self, y: Point) -> Cell {
        let m = Self::axis_cell(self.levels, self.grain, y.re);
        if self.is_2d() {
            Cell::Two(m, Self::axis_cell(self.levels2, self.grain, y.im))
        } else {
            Cell::One(m)
        }
    }

    /// Zero-based flat index of a cell (row-major over `(m, n)`).
    pub fn flat_index(&self, cell: Cell) -> usize {
        match cell {
            Cell::One(m) => m - 1,
            Cell::Two(m, n) => (m - 1) * self.levels2 + (n - 1),
        }
    }
}

fn axis_boundaries(levels: usize, grain: f64) -> Vec<f64> {
    let half = (levels / 2) as f64;
    (1..levels).map(|i| (i as f64 - half) * grain).collect()
}

/// Gains, noise variance and power budgets of the two-way channel:
/// `Ỹ₁ = aX₁ + bX₂ + Z₂`, `Ỹ₂ = cX₁ + dX₂ + Z₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub noise_var: f64,
    pub p1: f64,
    pub p2: f64,
}

impl ChannelConfig {
    /// A zero power budget is allowed and means the user is silent.
    pub fn new(gains: [f64; 4], noise_var: f64, p1: f64, p2: f64) -> Result<Self> {
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidConfig("gains must be finite"));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(Error::InvalidConfig("noise variance must be positive"));
        }
        if !(p1.is_finite() && p1 >= 0.0 && p2.is_finite() && p2 >= 0.0) {
            return Err(Error::InvalidConfig("power budgets must be nonnegative"));
        }
        let [a, b, c, d] = gains;
        Ok(Self { a, b, c, d, noise_var, p1, p2 })
    }

    /// Unit gains, unit noise, both users at power `snr` (linear).
    pub fn symmetric(snr: f64) -> Result<Self> {
        Self::new([1.0; 4], 1.0, snr, snr)
    }

    /// [`ChannelConfig::symmetric`] with the SNR in decibels.
    pub fn symmetric_db(snr_db: f64) -> Result<Self> {
        Self::symmetric(db_to_linear(snr_db))
    }

    /// The same channel seen with the user labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.d,
            b: self.c,
            c: self.b,
            d: self.a,
            noise_var: self.noise_var,
            p1: self.p2,
            p2: self.p1,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Rates in bits per channel use: `r1` from user 1 to user 2, `r2` back.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub const fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Rectangle of the unquantized channel, where each user cancels its own signal.
pub fn unquantized_capacity(cfg: &ChannelConfig) -> RatePair {
    let rate = |g: f64, p: f64| 0.5 * libm::log2(1.0 + g * g * p / cfg.noise_var);
    RatePair::new(rate(cfg.c, cfg.p1), rate(cfg.b, cfg.p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn boundary_examples() {
        let q = UniformQuantizer::one_dim(8, 1.0).unwrap();
        assert_eq!(q.boundaries(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let q = UniformQuantizer::one_dim(8, 1.3).unwrap();
        assert!(close(&q.boundaries(), &[-3.9, -2.6, -1.3, 0.0, 1.3, 2.6, 3.9], 1e-12));
        let q = UniformQuantizer::one_dim(2, 5.0).unwrap();
        assert_eq!(q.boundaries(), vec![0.0]);
        assert!(q.boundaries2().is_empty());
    }

    #[test]
    fn quantizer_validation() {
        assert!(UniformQuantizer::one_dim(7, 1.0).is_err());
        assert!(UniformQuantizer::one_dim(0, 1.0).is_err());
        assert!(UniformQuantizer::one_dim(8, 0.0).is_err());
        assert!(UniformQuantizer::new(8, 3, 1.0).is_err());
        assert!(UniformQuantizer::one_dim(8, f64::NAN).is_err());
    }

    #[test]
    fn quantize_examples() {
        let q = UniformQuantizer::one_dim(8, 1.0).unwrap();
        assert_eq!(q.quantize(Point::real(0.3)), Cell::One(5));
        assert_eq!(q.quantize(Point::real(100.0)), Cell::One(8));
        assert_eq!(q.quantize(Point::real(-100.0)), Cell::One(1));
        assert_eq!(q.quantize(Point::real(0.0)), Cell::One(5));
        let q2 = UniformQuantizer::two_dim(8, 1.0).unwrap();
        assert_eq!(q2.quantize(Point::new(-0.5, 2.4)), Cell::Two(4, 7));
        assert_eq!(q2.flat_index(Cell::Two(4, 7)), 3 * 8 + 6);
        assert_eq!(q2.cells(), 64);
    }

    #[test]
    fn pam_examples() {
        let c = Constellation::pam(8, 1.0).unwrap();
        let delta = 1.0 / 21f64.sqrt();
        assert!((c.points()[4].re - delta).abs() < 1e-15);
        assert!((c.power() - 1.0).abs() < 1e-12);
        let c = Constellation::pam(2, 4.0).unwrap();
        assert_eq!(c.points(), &[Point::real(-2.0), Point::real(2.0)]);
        let c = Constellation::pam(4, 1.0).unwrap();
        assert!((c.points()[2].re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(Constellation::pam(3, 1.0).is_err());
        assert!(Constellation::pam(0, 1.0).is_err());
    }

    #[test]
    fn psk_examples() {
        let c = Constellation::psk(4, 2.0, 45.0).unwrap();
        let want = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        for (p, w) in c.points().iter().zip(want) {
            assert!((p.re - w.0).abs() < 1e-12 && (p.im - w.1).abs() < 1e-12);
        }
        let b = Constellation::psk(2, 1.0, 0.0).unwrap();
        assert_eq!(b.points(), &[Point::new(1.0, 0.0), Point::new(-1.0, 0.0)]);
        assert!(Constellation::psk(1, 1.0, 0.0).is_err());
    }

    #[test]
    fn rotation_examples() {
        let b = Constellation::psk(2, 1.0, 0.0).unwrap();
        let r = b.rotate(90.0);
        assert_eq!(r.points(), &[Point::new(0.0, 1.0), Point::new(0.0, -1.0)]);
        let c = Constellation::psk(8, 3.0, 10.0).unwrap();
        assert_eq!(c.rotate(0.0), c);
        let full = c.rotate(360.0);
        for (p, q) in full.points().iter().zip(c.points()) {
            assert!((p.re - q.re).abs() < 1e-12 && (p.im - q.im).abs() < 1e-12);
        }
        assert!(b.is_real() && !r.is_real());
    }

    #[test]
    fn constellation_validation() {
        assert!(Constellation::new(vec![]).is_err());
        assert!(Constellation::new(vec![Point::real(1.0), Point::real(1.0)]).is_err());
        assert!(Constellation::with_power(vec![Point::real(0.0)], 1.0).is_err());
        let c = Constellation::with_power(vec![Point::new(1.0, 2.0), Point::real(-3.0)], 2.5).unwrap();
        assert!((c.power() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn capacity_examples() {
        let cfg = ChannelConfig::new([1.0; 4], 1.0, 3.0, 1.0).unwrap();
        assert!((unquantized_capacity(&cfg).r1 - 1.0).abs() < 1e-15);
        let silent = ChannelConfig::new([1.0; 4], 1.0, 0.0, 1.0).unwrap();
        assert_eq!(unquantized_capacity(&silent).r1, 0.0);
        let cap = unquantized_capacity(&ChannelConfig::symmetric(1.0).unwrap());
        assert_eq!(cap, RatePair::new(0.5, 0.5));
        assert!(ChannelConfig::new([1.0; 4], 0.0, 1.0, 1.0).is_err());
        assert!(ChannelConfig::new([f64::INFINITY, 1.0, 1.0, 1.0], 1.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn quantize_agrees_with_boundaries(m in (1usize..20).prop_map(|h| 2 * h), q in 0.01f64..5.0, y in -200.0f64..200.0) {
            let qz = UniformQuantizer::one_dim(m, q).unwrap();
            let edges = UniformQuantizer::edges(m, q);
            let Cell::One(k) = qz.quantize(Point::real(y)) else { unreachable!() };
            prop_assert!(k >= 1 && k <= m);
            prop_assert!(edges[k - 1] <= y && y < edges[k]);
        }

        #[test]
        fn quantize_saturates(m in (1usize..20).prop_map(|h| 2 * h), q in 0.01f64..5.0, excess in 0.0f64..1e9) {
            let qz = UniformQuantizer::one_dim(m, q).unwrap();
            let top = *qz.boundaries().last().unwrap();
            prop_assert_eq!(qz.quantize(Point::real(top + excess)), Cell::One(m));
            prop_assert_eq!(qz.quantize(Point::real(-top - excess - 1e-9)), Cell::One(1));
        }

        #[test]
        fn rotation_preserves_power(k in 2usize..16, p in 0.01f64..100.0, theta in -720.0f64..720.0) {
            let c = Constellation::psk(k, p, 0.0).unwrap();
            prop_assert!((c.power() - p).abs() <= 1e-12 * p.max(1.0));
            let r = c.rotate(theta);
            prop_assert!((r.power() - c.power()).abs() <= 1e-12 * p.max(1.0));
        }

        #[test]
        fn pam_meets_power(h in 1usize..16, p in 0.01f64..100.0) {
            let c = Constellation::pam(2 * h, p).unwrap();
            prop_assert!((c.power() - p).abs() <= 1e-9 * p.max(1.0));
            prop_assert!(c.is_real());
        }
    }
}
