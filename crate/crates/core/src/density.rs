//! Continuous two-bidder densities on the unit square and their discretized
//! marginal profit masses.

use std::fmt;

use crate::curve::RevenueCurve;
use crate::error::{AuctionError, Result};

/// Density on `[0,1]^2`, bounded below and Lipschitz in the L1 metric.
pub trait DensityOracle: Sync {
    fn density(&self, x: f64, y: f64) -> f64;

    /// `|phi(p) - phi(q)| <= lipschitz * |p - q|_1`.
    fn lipschitz(&self) -> f64;

    fn min_density(&self) -> f64;

    /// Upper bound on the density. A unit-mass density with constant `l`
    /// varies by at most `2l` across the square, so `1 + 2l` always works.
    fn max_density(&self) -> f64 {
        1.0 + 2.0 * self.lipschitz()
    }

    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Uniform;

impl DensityOracle for Uniform {
    fn density(&self, _x: f64, _y: f64) -> f64 {
        1.0
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }

    fn min_density(&self) -> f64 {
        1.0
    }

    fn max_density(&self) -> f64 {
        1.0
    }

    fn describe(&self) -> String {
        "uniform".into()
    }
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (k, c) in C.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Mixture `floor + (1 - floor) * Beta(a,b)(x) * Beta(a,b)(y)`.
#[derive(Debug, Clone, Copy)]
pub struct ProductBeta {
    a: f64,
    b: f64,
    floor: f64,
    norm: f64,
    lipschitz: f64,
    peak: f64,
}

impl ProductBeta {
    /// Shape parameters must be 1 or at least 2 so that the density stays
    /// Lipschitz up to the boundary; `floor` must lie in `(0, 1]`.
    pub fn new(a: f64, b: f64, floor: f64) -> Result<Self> {
        let ok = |s: f64| s == 1.0 || s >= 2.0;
        if !ok(a) || !ok(b) {
            return Err(AuctionError::Oracle(format!(
                "beta shapes must be 1 or >= 2, got ({a}, {b})"
            )));
        }
        if !(floor > 0.0 && floor <= 1.0) {
            return Err(AuctionError::Oracle(format!("floor must be in (0, 1], got {floor}")));
        }
        let norm = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)).exp();
        let mut me = Self {
            a,
            b,
            floor,
            norm,
            lipschitz: 0.0,
            peak: 0.0,
        };
        let samples = 20_000;
        let (mut peak, mut slope) = (0.0f64, 0.0f64);
        for k in 0..=samples {
            let x = k as f64 / samples as f64;
            peak = peak.max(me.pdf(x));
            slope = slope.max(me.pdf_slope(x).abs());
        }
        me.peak = peak;
        // sampled sup with a safety margin for the gaps between samples
        me.lipschitz = 1.05 * (1.0 - floor) * slope * peak + 1e-12;
        Ok(me)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.norm * x.powf(self.a - 1.0) * (1.0 - x).powf(self.b - 1.0)
    }

    fn pdf_slope(&self, x: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let left = if a == 1.0 { 0.0 } else { (a - 1.0) * x.powf(a - 2.0) * (1.0 - x).powf(b - 1.0) };
        let right = if b == 1.0 { 0.0 } else { (b - 1.0) * x.powf(a - 1.0) * (1.0 - x).powf(b - 2.0) };
        self.norm * (left - right)
    }
}

impl DensityOracle for ProductBeta {
    fn density(&self, x: f64, y: f64) -> f64 {
        self.floor + (1.0 - self.floor) * self.pdf(x) * self.pdf(y)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn min_density(&self) -> f64 {
        self.floor
    }

    fn max_density(&self) -> f64 {
        self.floor + (1.0 - self.floor) * self.peak * self.peak
    }

    fn describe(&self) -> String {
        format!("product-beta(a={}, b={}, floor={})", self.a, self.b, self.floor)
    }
}

/// Mixture `floor + (1 - floor) * N(c, sigma^2 I)` truncated to the square
/// and renormalized.
#[derive(Debug, Clone, Copy)]
pub struct GaussianBump {
    cx: f64,
    cy: f64,
    sigma: f64,
    floor: f64,
    z: f64,
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + k as f64 * h);
    }
    s * h / 3.0
}

impl GaussianBump {
    pub fn new(cx: f64, cy: f64, sigma: f64, floor: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(floor > 0.0 && floor <= 1.0) {
            return Err(AuctionError::Oracle(format!(
                "need sigma > 0 and floor in (0, 1], got sigma={sigma}, floor={floor}"
            )));
        }
        let axis = |c: f64| simpson(|t| (-(t - c).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0, 1.0, 4000);
        let z = axis(cx) * axis(cy);
        Ok(Self { cx, cy, sigma, floor, z })
    }
}

impl DensityOracle for GaussianBump {
    fn density(&self, x: f64, y: f64) -> f64 {
        let r2 = (x - self.cx).powi(2) + (y - self.cy).powi(2);
        self.floor + (1.0 - self.floor) * (-r2 / (2.0 * self.sigma * self.sigma)).exp() / self.z
    }

    fn lipschitz(&self) -> f64 {
        // each partial of exp(-r^2/2s^2) is at most 1/(s sqrt(e))
        (1.0 - self.floor) / (self.z * self.sigma * std::f64::consts::E.sqrt())
    }

    fn min_density(&self) -> f64 {
        self.floor
    }

    fn max_density(&self) -> f64 {
        self.floor + (1.0 - self.floor) / self.z
    }

    fn describe(&self) -> String {
        format!(
            "gaussian-bump(cx={}, cy={}, sigma={}, floor={})",
            self.cx, self.cy, self.sigma, self.floor
        )
    }
}

/// Wraps a closure with caller-supplied constants.
pub struct FnOracle<F> {
    f: F,
    lipschitz: f64,
    min_density: f64,
    name: String,
}

impl<F: Fn(f64, f64) -> f64 + Sync> FnOracle<F> {
    pub fn new(f: F, lipschitz: f64, min_density: f64, name: impl Into<String>) -> Self {
        Self {
            f,
            lipschitz,
            min_density,
            name: name.into(),
        }
    }
}

impl<F> fmt::Debug for FnOracle<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOracle").field("name", &self.name).finish()
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> DensityOracle for FnOracle<F> {
    fn density(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn min_density(&self) -> f64 {
        self.min_density
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Spot-checks the lower bound and the Lipschitz constant on a lattice.
pub fn check_oracle(oracle: &dyn DensityOracle) -> Result<()> {
    let (lam, lo) = (oracle.lipschitz(), oracle.min_density());
    if !(lo > 0.0) || !lam.is_finite() || lam < 0.0 {
        return Err(AuctionError::Oracle(format!(
            "need a positive lower bound and finite Lipschitz constant, got {lo} and {lam}"
        )));
    }
    let k = 48;
    let at = |a: usize| a as f64 / k as f64;
    for a in 0..=k {
        for b in 0..=k {
            let v = oracle.density(at(a), at(b));
            if !v.is_finite() || v < lo * (1.0 - 1e-12) {
                return Err(AuctionError::Oracle(format!(
                    "density {v} at ({}, {}) is below the declared minimum {lo}",
                    at(a),
                    at(b)
                )));
            }
            for (c, d) in [(a + 1, b), (a, b + 1)] {
                if c > k || d > k {
                    continue;
                }
                let diff = (oracle.density(at(c), at(d)) - v).abs();
                if diff > lam / k as f64 * (1.0 + 1e-9) + 1e-12 {
                    return Err(AuctionError::Oracle(format!(
                        "density changes by {diff} over a step of {} near ({}, {}), above the declared Lipschitz constant {lam}",
                        1.0 / k as f64,
                        at(a),
                        at(b)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Cell-integrated marginal profits and posted-price revenues of one bidder
/// on an `n x n` grid of the square.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTables {
    pub n: usize,
    /// Samples per cell along each axis.
    pub sub: usize,
    /// `mass[i * n + j]`: integral of the marginal profit contribution over
    /// cell `(i, j)`, where `i` is this bidder's own axis.
    pub mass: Vec<f64>,
    /// `revenue[i * n + j]`, `i` in `0..=n`: integral over the other
    /// coordinate's cell `j` of the posted-price revenue at own value `i/n`.
    /// Row `n` (price 1) is zero.
    pub revenue: Vec<f64>,
}

impl CellTables {
    pub fn mass(&self, own: usize, other: usize) -> f64 {
        self.mass[own * self.n + other]
    }

    pub fn revenue(&self, own: usize, other: usize) -> f64 {
        self.revenue[own * self.n + other]
    }

    /// Integral over the other coordinate of `max_x x * P(own >= x)`.
    pub fn row_total(&self, other: usize) -> f64 {
        (0..self.n).map(|i| self.mass(i, other)).sum()
    }
}

/// Builds the tables of `bidder` (0 or 1) from `n * sub` samples per axis.
///
/// For every sampled value `y` of the other bidder, the tail mass
/// `T(x) = int_x^1 phi dt` is accumulated by the trapezoid rule,
/// `m(x) = max_{x' >= x} x' T(x')` is taken as a suffix maximum, and cell
/// masses are differences of `m` at cell boundaries, integrated over `y` by
/// the midpoint rule. Differences of a monotone function are never negative.
pub fn cell_tables(oracle: &dyn DensityOracle, bidder: usize, n: usize, sub: usize) -> Result<CellTables> {
    if bidder > 1 {
        return Err(AuctionError::BidderOutOfRange { bidder, bidders: 2 });
    }
    if n < 1 || sub < 1 {
        return Err(AuctionError::InvalidParameter("resolution must be positive".into()));
    }
    let m_total = n * sub;
    let h = 1.0 / m_total as f64;
    let lo = oracle.min_density();
    let mut mass = vec![0.0; n * n];
    let mut revenue = vec![0.0; (n + 1) * n];
    let mut phi = vec![0.0; m_total + 1];
    let mut m_at = vec![0.0; n + 1];
    for l in 0..m_total {
        let other = (l as f64 + 0.5) * h;
        for (k, slot) in phi.iter_mut().enumerate() {
            let own = k as f64 * h;
            let v = if bidder == 0 { oracle.density(own, other) } else { oracle.density(other, own) };
            if !v.is_finite() || v < lo * (1.0 - 1e-12) {
                return Err(AuctionError::Oracle(format!("density {v} below the declared minimum {lo}")));
            }
            *slot = v;
        }
        let j = l / sub;
        let mut tail = 0.0;
        let mut best = 0.0f64;
        for k in (0..=m_total).rev() {
            if k < m_total {
                tail += 0.5 * h * (phi[k] + phi[k + 1]);
            }
            let r = k as f64 * h * tail;
            best = best.max(r);
            if k % sub == 0 {
                let i = k / sub;
                m_at[i] = best;
                revenue[i * n + j] += r * h;
            }
        }
        for i in 0..n {
            mass[i * n + j] += (m_at[i] - m_at[i + 1]).max(0.0) * h;
        }
    }
    Ok(CellTables { n, sub, mass, revenue })
}

/// Convenience wrapper returning one cell's mass. Builds the whole table, so
/// callers needing many cells should use [`cell_tables`].
pub fn cell_mass_continuous(
    oracle: &dyn DensityOracle,
    bidder: usize,
    cell: (usize, usize),
    n: usize,
    sub: usize,
) -> Result<f64> {
    let t = cell_tables(oracle, bidder, n, sub)?;
    let (own, other) = if bidder == 0 { cell } else { (cell.1, cell.0) };
    if own >= n || other >= n {
        return Err(AuctionError::IndexOutOfRange {
            index: vec![cell.0, cell.1],
            shape: vec![n, n],
        });
    }
    Ok(t.mass(own, other))
}

/// Revenue curve of `bidder` at the other bidder's value `fixed`, using the
/// conditional density on that line and `samples` price levels.
pub fn revenue_curve_continuous(
    oracle: &dyn DensityOracle,
    bidder: usize,
    fixed: f64,
    samples: usize,
) -> Result<RevenueCurve<f64>> {
    if bidder > 1 || !(0.0..=1.0).contains(&fixed) || samples < 2 {
        return Err(AuctionError::InvalidParameter("bad curve request".into()));
    }
    let h = 1.0 / samples as f64;
    let phi = |t: f64| if bidder == 0 { oracle.density(t, fixed) } else { oracle.density(fixed, t) };
    let mut tails = vec![0.0; samples + 1];
    for k in (0..samples).rev() {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        tails[k] = tails[k + 1] + 0.5 * h * (phi(a) + phi(b));
    }
    let line = tails[0];
    let points = (0..=samples)
        .map(|k| {
            let price = k as f64 * h;
            let qv = tails[k] / line;
            (qv, price, price * qv)
        })
        .collect();
    Ok(RevenueCurve::from_samples(points))
}
