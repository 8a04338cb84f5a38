//! Revenue curves `R(q)` in quantile space, their running maximum seen from
//! `q = 0` (the skyline `R'`) and the upper concave envelope `R̂`.

use std::fmt::Write as _;
use std::ops::{Add, Div, Mul, Sub};

use num_traits::Zero;

use crate::error::{AuctionError, Result};
use crate::priors::JointPrior;
use crate::rational::{to_f64, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint<T> {
    /// Probability of sale at this price.
    pub q: T,
    pub price: T,
    pub r: T,
    pub skyline: T,
    pub hull: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevenueCurve<T> {
    pub points: Vec<CurvePoint<T>>,
}

impl<T> RevenueCurve<T>
where
    T: Clone + PartialOrd + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    /// Builds the curve from `(q, price, R)` samples. Samples are sorted by
    /// `q`, and prices sharing a quantile keep only the highest one; the
    /// envelope is anchored at `(0, 0)`.
    pub fn from_samples(mut samples: Vec<(T, T, T)>) -> Self {
        samples.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("comparable quantiles")
                .then(b.1.partial_cmp(&a.1).expect("comparable prices"))
        });
        samples.dedup_by(|later, earlier| later.0 == earlier.0);
        let mut running: Option<T> = None;
        let skyline: Vec<T> = samples
            .iter()
            .map(|(_, _, r)| {
                let next = match running.take() {
                    Some(m) if m >= *r => m,
                    _ => r.clone(),
                };
                running = Some(next.clone());
                next
            })
            .collect();
        let mut anchored: Vec<(T, T)> = vec![(T::zero(), T::zero())];
        anchored.extend(samples.iter().map(|(q, _, r)| (q.clone(), r.clone())));
        let hull_pts = upper_hull(anchored);
        let points = samples
            .into_iter()
            .zip(skyline)
            .map(|((q, price, r), skyline)| {
                let hull = eval_hull(&hull_pts, &q);
                CurvePoint {
                    q,
                    price,
                    r,
                    skyline,
                    hull,
                }
            })
            .collect();
        Self { points }
    }

    /// `q,R,Rprime,Rhat` rows.
    pub fn to_csv(&self, to_float: impl Fn(&T) -> f64) -> String {
        let mut out = String::from("q,R,Rprime,Rhat\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                to_float(&p.q),
                to_float(&p.r),
                to_float(&p.skyline),
                to_float(&p.hull)
            );
        }
        out
    }
}

fn cross<T>(o: &(T, T), a: &(T, T), b: &(T, T)) -> T
where
    T: Clone + Sub<Output = T> + Mul<Output = T>,
{
    (a.0.clone() - o.0.clone()) * (b.1.clone() - o.1.clone())
        - (a.1.clone() - o.1.clone()) * (b.0.clone() - o.0.clone())
}

/// Upper hull (monotone chain) of points already sorted by x.
fn upper_hull<T>(mut pts: Vec<(T, T)>) -> Vec<(T, T)>
where
    T: Clone + PartialOrd + Zero + Sub<Output = T> + Mul<Output = T>,
{
    pts.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(b.1.partial_cmp(&a.1).unwrap())
    });
    // keep the highest point per abscissa
    pts.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut hull: Vec<(T, T)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) >= T::zero() {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

fn eval_hull<T>(hull: &[(T, T)], x: &T) -> T
where
    T: Clone + PartialOrd + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    for w in hull.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if *x >= a.0 && *x <= b.0 {
            if *x == b.0 {
                return b.1.clone();
            }
            let t = (x.clone() - a.0.clone()) / (b.0.clone() - a.0.clone());
            return a.1.clone() + t * (b.1.clone() - a.1.clone());
        }
    }
    hull.last().map(|p| p.1.clone()).expect("non-empty hull")
}

/// Revenue curve of `bidder` on the line through the other bidders' fixed
/// coordinates, using the conditional distribution on that line.
///
/// `fixed` lists the other bidders' grid indices in bidder order.
pub fn revenue_curve(prior: &JointPrior, bidder: usize, fixed: &[usize]) -> Result<RevenueCurve<Q>> {
    let n = prior.bidders();
    if bidder >= n {
        return Err(AuctionError::BidderOutOfRange { bidder, bidders: n });
    }
    if fixed.len() + 1 != n {
        return Err(AuctionError::InvalidParameter(format!(
            "expected {} fixed coordinates, got {}",
            n - 1,
            fixed.len()
        )));
    }
    let mut point: Vec<usize> = fixed.to_vec();
    point.insert(bidder, 0);
    let start = prior.layout().flat(&point)?;
    let line: Vec<usize> = prior.layout().line(bidder, start).collect();
    let line_mass: Q = line.iter().map(|&f| prior.mass_flat(f)).sum();
    if line_mass.is_zero() {
        return Err(AuctionError::InvalidParameter("line carries no mass".into()));
    }
    let mut suffix = Q::zero();
    let mut samples = Vec::with_capacity(line.len());
    for (k, &f) in line.iter().enumerate().rev() {
        suffix += prior.mass_flat(f);
        let qv = &suffix / &line_mass;
        let price = prior.grid().value(bidder, k).clone();
        let r = &price * &qv;
        samples.push((qv, price, r));
    }
    Ok(RevenueCurve::from_samples(samples))
}

pub fn curve_csv_exact(curve: &RevenueCurve<Q>) -> String {
    curve.to_csv(to_f64)
}
