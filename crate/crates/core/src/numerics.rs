//! Special functions, entropy, Gauss–Hermite quadrature and planar convex hulls.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Probabilities below this are treated as zero inside entropy sums.
pub const UNDERFLOW_GUARD: f64 = 1e-300;

const PMF_SUM_TOL: f64 = 1e-9;

/// Standard normal CDF Φ(x).
///
/// Evaluated as `erfc(-x/√2)/2`, which keeps full relative precision in the
/// lower tail; the upper tail is accurate in absolute terms.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

/// Probability that a standard normal variable falls in `[lo, hi)`.
///
/// Either bound may be infinite. When the interval lies in the upper half
/// line the difference is taken between upper tails so that mass far to the
/// right does not cancel to zero.
pub fn std_normal_interval(lo: f64, hi: f64) -> f64 {
    let p = if lo >= 0.0 {
        std_normal_cdf(-lo) - std_normal_cdf(-hi)
    } else {
        std_normal_cdf(hi) - std_normal_cdf(lo)
    };
    p.max(0.0)
}

/// Inverse of [`std_normal_cdf`] for `p` in the open unit interval.
///
/// Rational starting point followed by two Halley steps against
/// [`std_normal_cdf`]. Returns ∓∞ at 0 and 1.
#[allow(clippy::excessive_precision)]
pub fn std_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(libm::sqrt(-2.0 * libm::log(p)))
    } else if p > 1.0 - P_LOW {
        -tail(libm::sqrt(-2.0 * libm::log(1.0 - p)))
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        // work in the tail that keeps relative precision
        let e = if x <= 0.0 {
            std_normal_cdf(x) - p
        } else {
            (1.0 - p) - std_normal_cdf(-x)
        };
        let u = e / std_normal_pdf(x);
        if !u.is_finite() {
            break;
        }
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// A probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates nonnegativity and normalization (absolute tolerance 1e-9).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("no entries"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPmf("entries must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if libm::fabs(total - 1.0) > PMF_SUM_TOL {
            return Err(Error::InvalidPmf("entries do not sum to one"));
        }
        Ok(Self { probs })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidPmf("no entries"));
        }
        Self::new(alloc::vec![1.0 / len as f64; len])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// Shannon entropy in bits, with 0·log 0 = 0.
pub fn entropy_bits(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

/// Entropy of raw probabilities that are already known to form a pmf.
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > UNDERFLOW_GUARD)
        .map(|&p| -p * libm::log2(p))
        .sum();
    h.max(0.0)
}

/// Largest supported Gauss–Hermite order.
pub const MAX_QUAD_ORDER: usize = 256;

/// A Gauss–Hermite rule normalized against the standard normal density, so
/// that `Σ wᵢ f(xᵢ) ≈ E[f(Z)]` for `Z ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Approximates `E[f(Z)]`, `Z ~ N(0, 1)`.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the `n`-point Gauss–Hermite rule for the standard normal weight.
///
/// Starting points are the eigenvalues of the Hermite Jacobi matrix; each is
/// then polished by Newton iteration on the orthonormal (physicists') Hermite
/// recurrence, which also yields the weight. Nodes are mapped to the
/// probabilists' scale.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_QUAD_ORDER {
        return Err(Error::QuadratureOrder(n));
    }
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^(-1/4)
    const MAX_ITER: usize = 100;

    let nf = n as f64;
    let mut guesses = jacobi_eigenvalues(n)?;
    guesses.sort_by(|a, b| b.total_cmp(a));
    let half = n.div_ceil(2);
    // physicists' roots, descending
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..half {
        let mut z = guesses[i] * FRAC_1_SQRT_2;
        let mut converged = false;
        let mut pp = 0.0;
        for _ in 0..MAX_ITER {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * libm::sqrt(2.0 / (jf + 1.0)) * p2 - libm::sqrt(jf / (jf + 1.0)) * p3;
            }
            pp = libm::sqrt(2.0 * nf) * p2;
            let step = p1 / pp;
            z -= step;
            if libm::fabs(step) <= 1e-15 * (1.0 + libm::fabs(z)) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Precondition("Gauss-Hermite root iteration did not converge"));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[half - 1] = 0.0;
    }

    let inv_sqrt_pi = 1.0 / libm::sqrt(PI);
    let mut nodes: Vec<f64> = x.iter().rev().map(|&r| SQRT_2 * r).collect();
    let mut weights: Vec<f64> = w.iter().rev().map(|&wi| wi * inv_sqrt_pi).collect();
    // renormalize total mass so constants integrate exactly
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|wi| *wi /= total);
    nodes.dedup();
    if nodes.len() != n {
        return Err(Error::Precondition("Gauss-Hermite roots collided"));
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Eigenvalues of the probabilists' Hermite Jacobi matrix (zero diagonal,
/// off-diagonal `√k`) by implicit QL with Wilkinson shifts.
fn jacobi_eigenvalues(n: usize) -> Result<Vec<f64>> {
    let mut d = alloc::vec![0.0; n];
    // e[i] couples rows i and i+1; the last slot is scratch
    let mut e: Vec<f64> = (1..=n).map(|k| if k < n { libm::sqrt(k as f64) } else { 0.0 }).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = libm::fabs(d[m]) + libm::fabs(d[m + 1]);
                if libm::fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Precondition("Jacobi eigenvalue iteration did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// A convex polygon given by its counterclockwise vertex list.
///
/// Degenerate hulls are allowed: one vertex (a point) or two (a segment).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPolygon {
    vertices: Vec<(f64, f64)>,
}

impl RegionPolygon {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Whether `p` lies inside or on the polygon, up to an absolute slack `tol`.
    pub fn contains(&self, p: (f64, f64), tol: f64) -> bool {
        let v = &self.vertices;
        match v.len() {
            0 => false,
            1 => dist(v[0], p) <= tol,
            2 => segment_dist(v[0], v[1], p) <= tol,
            n => (0..n).all(|i| {
                let a = v[i];
                let b = v[(i + 1) % n];
                let len = dist(a, b);
                cross(a, b, p) >= -tol * len
            }),
        }
    }

    /// Whether every vertex of `other` lies in `self`.
    pub fn contains_polygon(&self, other: &RegionPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|&p| self.contains(p, tol))
    }

    /// Enclosed area (zero for degenerate hulls).
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum::<f64>()
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    libm::hypot(a.0 - b.0, a.1 - b.1)
}

fn segment_dist(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(a, p);
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    dist((a.0 + t * dx, a.1 + t * dy), p)
}

/// Convex hull by Andrew's monotone chain. Collinear boundary points are
/// dropped, so a collinear input yields its two extreme points.
pub fn convex_hull(points: &[(f64, f64)]) -> Result<RegionPolygon> {
    if points.is_empty() {
        return Err(Error::Empty("convex hull needs at least one point"));
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::NonFinite("hull points"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(RegionPolygon { vertices: pts });
    }

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(RegionPolygon { vertices: hull })
}
