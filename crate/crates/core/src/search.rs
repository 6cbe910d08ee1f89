//! Grid searches over the rate engines and the set constructions built on them.

use alloc::vec::Vec;

use crate::discrete::{check_dims, rate_pair_discrete};
use crate::error::{Error, Result};
use crate::model::{Cell, ChannelConfig, Constellation, Point, RatePair, UniformQuantizer};
use crate::numerics::{convex_hull, RegionPolygon};

/// Scalar used to rank grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `r1` alone (the symmetric single-link rate).
    FirstRate,
    /// `r1 + r2`.
    SumRate,
}

impl Objective {
    pub fn eval(self, r: &RatePair) -> f64 {
        match self {
            Objective::FirstRate => r.r1,
            Objective::SumRate => r.sum(),
        }
    }
}

/// Rates evaluated along a parameter grid, with the maximizing entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub rates: Vec<RatePair>,
    pub objective: Objective,
    pub best: usize,
}

impl SweepResult {
    /// Parameter value at the optimum (grain, or angle in degrees).
    pub fn argmax(&self) -> f64 {
        self.grid[self.best]
    }

    pub fn best_rate(&self) -> RatePair {
        self.rates[self.best]
    }

    pub fn best_value(&self) -> f64 {
        self.objective.eval(&self.rates[self.best])
    }

    pub fn values(&self) -> Vec<f64> {
        self.rates.iter().map(|r| self.objective.eval(r)).collect()
    }
}

/// Evaluates `rate_fn` at each grain and keeps the one maximizing `r1`;
/// ties go to the smaller grain.
pub fn grain_sweep<F>(mut rate_fn: F, q_grid: &[f64]) -> Result<SweepResult>
where
    F: FnMut(f64) -> Result<RatePair>,
{
    if q_grid.is_empty() {
        return Err(Error::InvalidGrid("empty grain grid"));
    }
    if q_grid.iter().any(|q| !(q.is_finite() && *q > 0.0)) {
        return Err(Error::InvalidGrid("grains must be positive and finite"));
    }
    if q_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("grain grid must be strictly increasing"));
    }
    let rates = q_grid.iter().map(|&q| rate_fn(q)).collect::<Result<Vec<_>>>()?;
    let objective = Objective::FirstRate;
    let mut best = 0;
    for (i, r) in rates.iter().enumerate() {
        if objective.eval(r) > objective.eval(&rates[best]) {
            best = i;
        }
    }
    Ok(SweepResult {
        grid: q_grid.to_vec(),
        rates,
        objective,
        best,
    })
}

/// Sum rates closer than this count as equal when picking the best angle.
pub const ROTATION_TIE_TOL: f64 = 1e-12;

/// User 1 sends `c`, user 2 sends `c` rotated by each angle of `theta_grid`
/// (degrees). The optimum maximizes the sum rate; ties go to the angle
/// nearest zero.
pub fn rotation_sweep(
    c: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
    theta_grid: &[f64],
) -> Result<SweepResult> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidGrid("empty angle grid"));
    }
    if theta_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("angles must be finite"));
    }
    let rates = theta_grid
        .iter()
        .map(|&t| rate_pair_discrete(c, &c.rotate(t), cfg, qz))
        .collect::<Result<Vec<_>>>()?;
    let objective = Objective::SumRate;
    let mut best = 0;
    for (i, r) in rates.iter().enumerate() {
        let (v, bv) = (objective.eval(r), objective.eval(&rates[best]));
        // rotations that merely relabel points tie up to rounding
        let tie = libm::fabs(v - bv) <= ROTATION_TIE_TOL;
        if (v > bv && !tie) || (tie && libm::fabs(theta_grid[i]) < libm::fabs(theta_grid[best])) {
            best = i;
        }
    }
    Ok(SweepResult {
        grid: theta_grid.to_vec(),
        rates,
        objective,
        best,
    })
}

/// Two distinct input pairs `(i₁, i₂)` (constellation indices of user 1 and
/// user 2) that land in the same noiseless quantizer cell at `receiver`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Collision {
    pub receiver: u8,
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub cell: Cell,
}

/// Outcome of a uniquely-decodable test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdReport {
    pub is_ud: bool,
    pub collisions: Vec<Collision>,
    /// Distinct quantized noiseless sums at receivers 1 and 2.
    pub distinct_outputs: [usize; 2],
}

fn collisions_at(
    receiver: u8,
    c1: &Constellation,
    c2: &Constellation,
    gains: (f64, f64),
    qz: &UniformQuantizer,
    out: &mut Vec<Collision>,
) -> usize {
    let mut cells: Vec<(Cell, (usize, usize))> = Vec::with_capacity(c1.len() * c2.len());
    for (i, &x1) in c1.points().iter().enumerate() {
        for (j, &x2) in c2.points().iter().enumerate() {
            let y: Point = x1 * gains.0 + x2 * gains.1;
            cells.push((qz.quantize(y), (i, j)));
        }
    }
    cells.sort();
    let mut distinct = 0;
    for group in cells.chunk_by(|a, b| a.0 == b.0) {
        distinct += 1;
        for (k, a) in group.iter().enumerate() {
            for b in &group[k + 1..] {
                out.push(Collision {
                    receiver,
                    first: a.1,
                    second: b.1,
                    cell: a.0,
                });
            }
        }
    }
    distinct
}

/// Checks whether the quantized noiseless sums `a·x₁ + b·x₂` (receiver 1) and
/// `c·x₁ + d·x₂` (receiver 2) are one-to-one in `(x₁, x₂)`.
pub fn ud_check(
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
) -> Result<UdReport> {
    check_dims(c1, c2, qz)?;
    let mut collisions = Vec::new();
    let d1 = collisions_at(1, c1, c2, (cfg.a, cfg.b), qz, &mut collisions);
    let d2 = collisions_at(2, c1, c2, (cfg.c, cfg.d), qz, &mut collisions);
    Ok(UdReport {
        is_ud: collisions.is_empty(),
        collisions,
        distinct_outputs: [d1, d2],
    })
}

/// Angles of `theta_grid` at which `(c, c·e^{jθ})` is a UD pair.
pub fn ud_angles(
    c: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
    theta_grid: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for &t in theta_grid {
        if ud_check(c, &c.rotate(t), cfg, qz)?.is_ud {
            out.push(t);
        }
    }
    Ok(out)
}

/// Sum rate of a UD pair with the SNR multiplied by `snr_scale`.
///
/// The constellations and quantizer stay fixed and the noise variance is
/// divided by the scale. Scaling the transmit power against fixed cells
/// instead would move points across boundaries and into the saturating end
/// cells, so a UD pair would not stay UD. In this form the noiseless sums
/// keep their cells and the sum rate climbs towards `log₂(K₁K₂)`. A zero
/// scale means infinite noise and gives zero.
pub fn sum_rate_limit(
    c1: &Constellation,
    c2: &Constellation,
    cfg: &ChannelConfig,
    qz: &UniformQuantizer,
    snr_scale: f64,
) -> Result<f64> {
    if !(snr_scale.is_finite() && snr_scale >= 0.0) {
        return Err(Error::Precondition("SNR scale must be finite and nonnegative"));
    }
    if !ud_check(c1, c2, cfg, qz)?.is_ud {
        return Err(Error::NotUniquelyDecodable);
    }
    if snr_scale == 0.0 {
        return Ok(0.0);
    }
    let scaled = ChannelConfig { noise_var: cfg.noise_var / snr_scale, ..*cfg };
    Ok(rate_pair_discrete(c1, c2, &scaled, qz)?.sum())
}

/// Time-sharing region of the given rate pairs: the convex hull of the pairs,
/// their projections on both axes and the origin.
pub fn achievable_region(rate_pairs: &[RatePair]) -> Result<RegionPolygon> {
    if rate_pairs.is_empty() {
        return Err(Error::Empty("achievable region needs at least one rate pair"));
    }
    let mut pts = Vec::with_capacity(3 * rate_pairs.len() + 1);
    pts.push((0.0, 0.0));
    for r in rate_pairs {
        pts.push((r.r1, r.r2));
        pts.push((r.r1, 0.0));
        pts.push((0.0, r.r2));
    }
    convex_hull(&pts)
}

/// Evenly spaced grid `lo, lo+step, …` up to `hi` (inclusive within half a step).
pub fn linear_grid(lo: f64, step: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && step.is_finite() && hi.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::InvalidGrid("grid needs finite lo <= hi and step > 0"));
    }
    let n = libm::floor((hi - lo) / step + 0.5) as usize;
    // snap to 12 decimals so 0.05·k prints as the grid value it names
    Ok((0..=n)
        .map(|i| libm::round((lo + step * i as f64) * 1e12) / 1e12)
        .collect())
}

/// Grain grid 0.05, 0.10, …, 3.0.
pub fn default_grain_grid() -> Vec<f64> {
    linear_grid(0.05, 0.05, 3.0).expect("static grid")
}

/// Angle grid 0°, 1°, …, 90°.
pub fn default_theta_grid() -> Vec<f64> {
    linear_grid(0.0, 1.0, 90.0).expect("static grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::cond_mi_discrete;
    use crate::gaussian::rate_pair_gaussian;
    use crate::Direction;
    use std::vec;

    fn q1(m: usize, q: f64) -> UniformQuantizer {
        UniformQuantizer::one_dim(m, q).unwrap()
    }

    fn q2(m: usize, q: f64) -> UniformQuantizer {
        UniformQuantizer::two_dim(m, q).unwrap()
    }

    #[test]
    fn grids() {
        let g = default_grain_grid();
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[18], 0.95);
        assert_eq!(g[59], 3.0);
        assert_eq!(default_theta_grid().len(), 91);
        assert!(linear_grid(1.0, 0.0, 2.0).is_err());
        assert!(linear_grid(2.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn grain_sweep_validation_and_ties() {
        assert!(grain_sweep(|_| Ok(RatePair::default()), &[]).is_err());
        assert!(grain_sweep(|_| Ok(RatePair::default()), &[0.2, 0.1]).is_err());
        assert!(grain_sweep(|_| Ok(RatePair::default()), &[0.0, 0.1]).is_err());
        let s = grain_sweep(|_| Ok(RatePair::new(1.0, 1.0)), &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(s.argmax(), 0.1);
    }

    #[test]
    fn gaussian_and_pam_optima_at_snr_1() {
        let cfg = ChannelConfig::symmetric(1.0).unwrap();
        let grid = default_grain_grid();
        let g = grain_sweep(|q| rate_pair_gaussian(&cfg, &q1(8, q), 64), &grid).unwrap();
        assert!((g.argmax() - 0.95).abs() <= 0.05 + 1e-9);
        let pam = Constellation::pam(8, 1.0).unwrap();
        let p = grain_sweep(|q| rate_pair_discrete(&pam, &pam, &cfg, &q1(8, q)), &grid).unwrap();
        assert!((p.argmax() - 0.85).abs() <= 0.05 + 1e-9);
    }

    #[test]
    fn gaussian_optimum_at_snr_3_spans_both_reports() {
        let cfg = ChannelConfig::symmetric(3.0).unwrap();
        let g = grain_sweep(|q| rate_pair_gaussian(&cfg, &q1(8, q), 64), &default_grain_grid()).unwrap();
        assert!((1.25..=1.45).contains(&g.argmax()), "{}", g.argmax());
    }

    #[test]
    fn rotation_sweep_zero_entry_matches_direct() {
        let cfg = ChannelConfig::symmetric_db(6.0).unwrap();
        let c = Constellation::pam(4, cfg.p1).unwrap();
        let qz = q2(8, 1.0);
        let s = rotation_sweep(&c, &cfg, &qz, &[0.0, 45.0, 90.0]).unwrap();
        assert_eq!(s.rates[0], rate_pair_discrete(&c, &c, &cfg, &qz).unwrap());
        assert_eq!(s.argmax(), 90.0);
        assert!(rotation_sweep(&c, &cfg, &qz, &[]).is_err());
    }

    #[test]
    fn rotation_ties_prefer_zero() {
        // a singleton at the origin is rotation invariant
        let c = Constellation::singleton(Point::default()).unwrap();
        let cfg = ChannelConfig::symmetric(1.0).unwrap();
        let s = rotation_sweep(&c, &cfg, &q2(8, 1.0), &[30.0, 0.0, 60.0]).unwrap();
        assert_eq!(s.argmax(), 0.0);
    }

    #[test]
    fn ud_examples() {
        let cfg = ChannelConfig::symmetric(1.0).unwrap();
        let bpsk = Constellation::psk(2, 1.0, 0.0).unwrap();
        let r = ud_check(&bpsk, &bpsk, &cfg, &q1(8, 1.0)).unwrap();
        assert!(!r.is_ud);
        // points: index 0 = +1, index 1 = −1; (+1,−1) and (−1,+1) sum to 0
        assert!(r.collisions.iter().any(|c| c.receiver == 1 && c.first == (0, 1) && c.second == (1, 0)));
        assert!(r.collisions.iter().any(|c| c.receiver == 2));

        let r = ud_check(&bpsk, &bpsk.rotate(90.0), &cfg, &q2(8, 1.0)).unwrap();
        assert!(r.is_ud);
        assert_eq!(r.distinct_outputs, [4, 4]);

        let one = Constellation::singleton(Point::real(0.5)).unwrap();
        assert!(ud_check(&one, &one, &cfg, &q1(8, 1.0)).unwrap().is_ud);

        let err = ud_check(&bpsk, &bpsk.rotate(90.0), &cfg, &q1(8, 1.0));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ud_enumeration_oracle() {
        // independent recount of the four BPSK ⊕ jBPSK sums
        let qz = q2(8, 1.0);
        let mut cells = vec![];
        for x in [1.0, -1.0] {
            for y in [1.0, -1.0] {
                cells.push(qz.quantize(Point::new(x, y)));
            }
        }
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 4);
    }

    #[test]
    fn sum_rate_limit_contract() {
        let cfg = ChannelConfig::symmetric(1.0).unwrap();
        let qz = q2(8, 1.0);
        let bpsk = Constellation::psk(2, 1.0, 0.0).unwrap();
        let rot = bpsk.rotate(90.0);
        assert_eq!(sum_rate_limit(&bpsk, &rot, &cfg, &qz, 0.0).unwrap(), 0.0);
        let s = sum_rate_limit(&bpsk, &rot, &cfg, &qz, 2.0).unwrap();
        assert!(s > 0.0 && s <= 2.0 + 1e-9);
        assert_eq!(
            sum_rate_limit(&bpsk, &bpsk, &cfg, &q1(8, 1.0), 1.0),
            Err(Error::NotUniquelyDecodable)
        );
        assert!(sum_rate_limit(&bpsk, &rot, &cfg, &qz, -1.0).is_err());
    }

    #[test]
    fn ud_sum_rate_climbs_to_alphabet_bound() {
        let cfg = ChannelConfig::symmetric_db(6.0).unwrap();
        let qz = q2(8, 1.0);
        let c = Constellation::psk(4, cfg.p1, 45.0).unwrap();
        let c2 = c.rotate(17.0);
        let mut last = 0.0;
        for db in [0.0, 3.0, 6.0, 10.0, 15.0, 20.0, 24.0] {
            let s = sum_rate_limit(&c, &c2, &cfg, &qz, 10f64.powf(db / 10.0)).unwrap();
            assert!(s >= last - 1e-12 && s <= 4.0 + 1e-9, "{db} dB: {s} after {last}");
            last = s;
        }
        assert!(last > 3.999, "{last}");
    }

    #[test]
    fn region_examples() {
        let r = achievable_region(&[RatePair::new(1.0, 1.0)]).unwrap();
        assert_eq!(r.vertices(), &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);

        let r = achievable_region(&[RatePair::new(1.0, 0.2), RatePair::new(0.2, 1.0)]).unwrap();
        assert!(r.contains((1.0, 0.2), 1e-12) && r.contains((0.2, 1.0), 1e-12));
        assert!(r.contains((0.6, 0.6), 1e-12));
        assert!(!r.contains((0.7, 0.7), 1e-12));

        assert!(achievable_region(&[]).is_err());
    }

    #[test]
    fn swept_region_contains_unrotated_region() {
        let cfg = ChannelConfig::symmetric_db(3.0).unwrap();
        let c = Constellation::psk(4, cfg.p1, 45.0).unwrap();
        let s = rotation_sweep(&c, &cfg, &q2(8, 1.0), &linear_grid(0.0, 5.0, 90.0).unwrap()).unwrap();
        let with = achievable_region(&s.rates).unwrap();
        let without = achievable_region(&s.rates[..1]).unwrap();
        assert!(with.contains_polygon(&without, 1e-12));
    }

    #[test]
    fn rotation_sign_symmetry() {
        let cfg = ChannelConfig::symmetric_db(5.0).unwrap();
        let qz = q2(8, 1.0);
        for c in [
            Constellation::pam(4, cfg.p1).unwrap(),
            Constellation::psk(4, cfg.p1, 45.0).unwrap(),
            Constellation::psk(8, cfg.p1, 0.0).unwrap(),
        ] {
            for t in [7.0, 33.0, 61.0] {
                let plus = rate_pair_discrete(&c, &c.rotate(t), &cfg, &qz).unwrap();
                let minus = rate_pair_discrete(&c, &c.rotate(-t), &cfg, &qz).unwrap();
                assert!((plus.r1 - minus.r1).abs() < 1e-9 && (plus.r2 - minus.r2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn first_rate_objective_is_r1() {
        let cfg = ChannelConfig::symmetric(2.0).unwrap();
        let c = Constellation::pam(4, 2.0).unwrap();
        let s = grain_sweep(|q| rate_pair_discrete(&c, &c, &cfg, &q1(8, q)), &[0.5, 1.0]).unwrap();
        let direct = cond_mi_discrete(Direction::OneToTwo, &c, &c, &cfg, &q1(8, s.argmax())).unwrap();
        assert_eq!(s.best_value(), direct);
    }
}
