//! Discrete joint priors over per-bidder value grids, and the marginal profit
//! contribution grids derived from them.

use num_traits::{Signed, Zero};

use crate::error::{AuctionError, Result};
use crate::rational::Q;

/// Per-bidder valuation levels, each strictly increasing and nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueGrid {
    levels: Vec<Vec<Q>>,
}

impl ValueGrid {
    pub fn new(levels: Vec<Vec<Q>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(AuctionError::InvalidGrid("no bidders".into()));
        }
        for (b, lv) in levels.iter().enumerate() {
            if lv.is_empty() {
                return Err(AuctionError::InvalidGrid(format!("bidder {b} has no levels")));
            }
            if lv.iter().any(|v| v.is_negative()) {
                return Err(AuctionError::InvalidGrid(format!("bidder {b} has a negative level")));
            }
            if lv.windows(2).any(|w| w[0] >= w[1]) {
                return Err(AuctionError::InvalidGrid(format!(
                    "bidder {b} levels are not strictly increasing"
                )));
            }
        }
        Ok(Self { levels })
    }

    /// The same integer levels `1..=count` for every bidder.
    pub fn integer(bidders: usize, count: usize) -> Self {
        let lv: Vec<Q> = (1..=count as i64).map(crate::rational::qi).collect();
        Self {
            levels: vec![lv; bidders],
        }
    }

    pub fn bidders(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self, bidder: usize) -> &[Q] {
        &self.levels[bidder]
    }

    pub fn all_levels(&self) -> &[Vec<Q>] {
        &self.levels
    }

    pub fn value(&self, bidder: usize, index: usize) -> &Q {
        &self.levels[bidder][index]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Row-major layout helper: the last bidder varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    shape: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Layout {
    pub fn new(shape: &[usize]) -> Self {
        let mut strides = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            strides,
            len,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn flat(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.shape.len() || index.iter().zip(&self.shape).any(|(i, n)| i >= n) {
            return Err(AuctionError::IndexOutOfRange {
                index: index.to_vec(),
                shape: self.shape.clone(),
            });
        }
        Ok(self.flat_unchecked(index))
    }

    pub fn flat_unchecked(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.shape.len()];
        for (k, s) in self.strides.iter().enumerate() {
            out[k] = flat / s;
            flat %= s;
        }
        out
    }

    /// Flat offsets of the points on the line along `axis` through `flat`,
    /// ordered by increasing coordinate.
    pub fn line(&self, axis: usize, flat: usize) -> impl Iterator<Item = usize> {
        let stride = self.strides[axis];
        let coord = (flat / stride) % self.shape[axis];
        let base = flat - coord * stride;
        (0..self.shape[axis]).map(move |k| base + k * stride)
    }

    /// One representative flat offset (coordinate 0 on `axis`) per line along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let stride = self.strides[axis];
        let n = self.shape[axis];
        (0..self.len)
            .filter(|f| (f / stride) % n == 0)
            .collect()
    }

    /// Iterates over all multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(move |f| self.unflatten(f))
    }
}

/// Dense probability mass over a [`ValueGrid`], kept as exact rationals.
///
/// Masses need not sum to one; `total_mass` is the normalizer used when a
/// probability is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPrior {
    grid: ValueGrid,
    layout: Layout,
    mass: Vec<Q>,
    total: Q,
}

impl JointPrior {
    pub fn new(grid: ValueGrid, mass: Vec<Q>) -> Result<Self> {
        let layout = Layout::new(&grid.shape());
        if mass.len() != layout.len() {
            return Err(AuctionError::InvalidPrior(format!(
                "mass has {} entries, grid has {}",
                mass.len(),
                layout.len()
            )));
        }
        if mass.iter().any(|m| m.is_negative()) {
            return Err(AuctionError::InvalidPrior("negative mass".into()));
        }
        let total: Q = mass.iter().sum();
        if !total.is_positive() {
            return Err(AuctionError::InvalidPrior("total mass must be positive".into()));
        }
        Ok(Self {
            grid,
            layout,
            mass,
            total,
        })
    }

    /// Builds a prior from sparse `(index, mass)` entries; unset points get zero.
    pub fn from_entries(grid: ValueGrid, entries: impl IntoIterator<Item = (Vec<usize>, Q)>) -> Result<Self> {
        let layout = Layout::new(&grid.shape());
        let mut mass = vec![Q::zero(); layout.len()];
        for (idx, m) in entries {
            let f = layout.flat(&idx)?;
            mass[f] += m;
        }
        Self::new(grid, mass)
    }

    pub fn grid(&self) -> &ValueGrid {
        &self.grid
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn shape(&self) -> &[usize] {
        self.layout.shape()
    }

    pub fn bidders(&self) -> usize {
        self.grid.bidders()
    }

    pub fn masses(&self) -> &[Q] {
        &self.mass
    }

    pub fn mass(&self, index: &[usize]) -> Result<&Q> {
        Ok(&self.mass[self.layout.flat(index)?])
    }

    pub fn mass_flat(&self, flat: usize) -> &Q {
        &self.mass[flat]
    }

    pub fn total_mass(&self) -> &Q {
        &self.total
    }

    pub fn is_normalized(&self) -> bool {
        self.total == Q::from_integer(1.into())
    }

    pub fn normalized(&self) -> Self {
        let mass = self.mass.iter().map(|m| m / &self.total).collect();
        Self::new(self.grid.clone(), mass).expect("normalizing a valid prior")
    }

    fn check_bidder(&self, bidder: usize) -> Result<()> {
        if bidder >= self.bidders() {
            return Err(AuctionError::BidderOutOfRange {
                bidder,
                bidders: self.bidders(),
            });
        }
        Ok(())
    }

    /// Revenue of posting the price `v_k` to `bidder` at `point` (coordinate
    /// `k` on the bidder's axis), the others fixed: `v_k * sum_{k' >= k} mass`.
    pub fn suffix_revenue(&self, bidder: usize, point: &[usize]) -> Result<Q> {
        self.check_bidder(bidder)?;
        let flat = self.layout.flat(point)?;
        let k = point[bidder];
        let suffix: Q = self
            .layout
            .line(bidder, flat)
            .skip(k)
            .map(|f| &self.mass[f])
            .sum();
        Ok(self.grid.value(bidder, k) * suffix)
    }

    /// Posted-price revenues `v_k * S(k)` along every line of `bidder`'s axis,
    /// stored at each point's flat offset.
    pub fn suffix_revenues(&self, bidder: usize) -> Result<Vec<Q>> {
        self.check_bidder(bidder)?;
        let mut out = vec![Q::zero(); self.layout.len()];
        for start in self.layout.line_starts(bidder) {
            let line: Vec<usize> = self.layout.line(bidder, start).collect();
            let mut suffix = Q::zero();
            for (k, &f) in line.iter().enumerate().rev() {
                suffix += &self.mass[f];
                out[f] = self.grid.value(bidder, k) * &suffix;
            }
        }
        Ok(out)
    }

    /// Sums out every bidder except `pair`, keeping the pair's order.
    pub fn marginalize(&self, pair: (usize, usize)) -> Result<JointPrior> {
        let (a, b) = pair;
        self.check_bidder(a)?;
        self.check_bidder(b)?;
        if a == b {
            return Err(AuctionError::DuplicateBidder(a));
        }
        let grid = ValueGrid::new(vec![
            self.grid.levels(a).to_vec(),
            self.grid.levels(b).to_vec(),
        ])?;
        let nb = self.shape()[b];
        let mut mass = vec![Q::zero(); self.shape()[a] * nb];
        for (f, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let idx = self.layout.unflatten(f);
            mass[idx[a] * nb + idx[b]] += m;
        }
        JointPrior::new(grid, mass)
    }
}

/// Marginal profit contribution of one bidder at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalProfitGrid {
    bidder: usize,
    layout: Layout,
    values: Vec<Q>,
    total_mass: Q,
}

impl MarginalProfitGrid {
    pub fn bidder(&self) -> usize {
        self.bidder
    }

    pub fn shape(&self) -> &[usize] {
        self.layout.shape()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn get(&self, index: &[usize]) -> &Q {
        &self.values[self.layout.flat_unchecked(index)]
    }

    pub fn at(&self, flat: usize) -> &Q {
        &self.values[flat]
    }

    /// Mass of the prior the grid was computed from; revenues expressed
    /// through this grid are divided by it.
    pub fn total_mass(&self) -> &Q {
        &self.total_mass
    }

    pub fn total(&self) -> Q {
        self.values.iter().sum()
    }

    /// Builds a grid directly from values; used for continuous cell masses.
    pub fn from_values(bidder: usize, shape: &[usize], values: Vec<Q>, total_mass: Q) -> Result<Self> {
        let layout = Layout::new(shape);
        if values.len() != layout.len() {
            return Err(AuctionError::ShapeMismatch {
                expected: shape.to_vec(),
                found: vec![values.len()],
            });
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(AuctionError::InvalidPrior("negative marginal profit".into()));
        }
        Ok(Self {
            bidder,
            layout,
            values,
            total_mass,
        })
    }
}

/// Backward recurrence along the bidder's axis, highest value first:
/// `f(k) = max(v_k * S(k) - sum_{k' > k} f(k'), 0)`.
pub fn mpc_discrete(prior: &JointPrior, bidder: usize) -> Result<MarginalProfitGrid> {
    let revenues = prior.suffix_revenues(bidder)?;
    let layout = prior.layout().clone();
    let mut values = vec![Q::zero(); layout.len()];
    for start in layout.line_starts(bidder) {
        let line: Vec<usize> = layout.line(bidder, start).collect();
        let mut above = Q::zero();
        for &f in line.iter().rev() {
            let candidate = &revenues[f] - &above;
            if candidate.is_positive() {
                above += &candidate;
                values[f] = candidate;
            }
        }
    }
    Ok(MarginalProfitGrid {
        bidder,
        layout,
        values,
        total_mass: prior.total_mass().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    pub(crate) fn uniform22() -> JointPrior {
        JointPrior::new(ValueGrid::integer(2, 2), vec![q(1, 4); 4]).unwrap()
    }

    fn correlated22() -> JointPrior {
        JointPrior::new(ValueGrid::integer(2, 2), vec![q(1, 2), qi(0), qi(0), q(1, 2)]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(ValueGrid::new(vec![vec![qi(1), qi(1)]]).is_err());
        assert!(ValueGrid::new(vec![vec![qi(-1), qi(1)]]).is_err());
        assert!(ValueGrid::new(vec![]).is_err());
        assert!(JointPrior::new(ValueGrid::integer(2, 2), vec![qi(0); 4]).is_err());
        assert!(JointPrior::new(ValueGrid::integer(2, 2), vec![qi(1); 3]).is_err());
    }

    #[test]
    fn suffix_revenue_examples() {
        let p = uniform22();
        assert_eq!(p.suffix_revenue(0, &[0, 0]).unwrap(), q(1, 2));
        assert_eq!(p.suffix_revenue(0, &[1, 0]).unwrap(), q(1, 2));
        assert!(p.suffix_revenue(0, &[2, 0]).is_err());
        assert!(p.suffix_revenue(3, &[0, 0]).is_err());
        let c = correlated22();
        // only (0,0) carries mass in column j=0; the suffix above it is empty
        assert_eq!(c.suffix_revenue(0, &[1, 0]).unwrap(), qi(0));
    }

    #[test]
    fn mpc_uniform() {
        let f = mpc_discrete(&uniform22(), 0).unwrap();
        for j in 0..2 {
            assert_eq!(f.get(&[1, j]), &q(1, 2));
            assert_eq!(f.get(&[0, j]), &qi(0));
        }
    }

    #[test]
    fn mpc_correlated() {
        let f = mpc_discrete(&correlated22(), 0).unwrap();
        assert_eq!(f.get(&[1, 1]), &qi(1));
        assert_eq!(f.get(&[1, 0]), &qi(0));
        assert_eq!(f.get(&[0, 0]), &q(1, 2));
        assert_eq!(f.get(&[0, 1]), &qi(0));
    }

    #[test]
    fn marginalize_uniform_cube() {
        let p = JointPrior::new(ValueGrid::integer(3, 2), vec![q(1, 8); 8]).unwrap();
        let m = p.marginalize((0, 1)).unwrap();
        assert_eq!(m.masses(), uniform22().masses());
        assert!(p.marginalize((1, 1)).is_err());
    }

    #[test]
    fn layout_lines() {
        let l = Layout::new(&[2, 3]);
        assert_eq!(l.line(1, 4).collect::<Vec<_>>(), vec![3, 4, 5]);
        assert_eq!(l.line(0, 4).collect::<Vec<_>>(), vec![1, 4]);
        assert_eq!(l.line_starts(0), vec![0, 1, 2]);
        assert_eq!(l.unflatten(5), vec![1, 2]);
    }
}
