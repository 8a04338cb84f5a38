use auction_core::continuous::{certify, solve_continuous_with, ContinuousOptions};
use auction_core::density::{DensityOracle, GaussianBump, ProductBeta, Uniform};
use auction_core::mech::verify_truthful;

/// Best revenue from a single posted price to bidder 1, by midpoint
/// integration of the density: a lower bound on the optimum.
fn posted_price_bound(oracle: &dyn DensityOracle) -> f64 {
    let k = 200;
    let h = 1.0 / k as f64;
    let mut marginal = vec![0.0; k];
    for (i, m) in marginal.iter_mut().enumerate() {
        for j in 0..k {
            *m += oracle.density((i as f64 + 0.5) * h, (j as f64 + 0.5) * h) * h * h;
        }
    }
    let total: f64 = marginal.iter().sum();
    (0..k)
        .map(|i| i as f64 * h * marginal[i..].iter().sum::<f64>() / total)
        .fold(0.0, f64::max)
}

fn check(oracle: &dyn DensityOracle, n: usize) {
    let opts = ContinuousOptions {
        resolution: Some(n),
        sub: Some(4),
    };
    let sol = solve_continuous_with(oracle, 0.25, &opts).unwrap();
    let cert = certify(&sol).unwrap();
    assert!(cert.passed(), "{cert:?}");
    assert!(verify_truthful(&sol.grid_mechanism().unwrap()).is_pass());
    let bound = posted_price_bound(oracle);
    assert!(cert.dual + 1e-9 >= bound - 0.01, "dual {} below posted price {}", cert.dual, bound);
    assert!(sol.revenue >= bound - cert.epsilon_budget, "{} vs {}", sol.revenue, bound);
}

#[test]
fn uniform_certifies() {
    check(&Uniform, 30);
}

#[test]
fn product_beta_certifies() {
    check(&ProductBeta::new(2.0, 2.0, 0.3).unwrap(), 30);
    check(&ProductBeta::new(1.0, 2.0, 0.5).unwrap(), 24);
}

#[test]
fn gaussian_bump_certifies() {
    check(&GaussianBump::new(0.7, 0.3, 0.25, 0.2).unwrap(), 30);
}
