use alphagan_core::nn::SeededRng;
use alphagan_core::train::{ks_statistic, wasserstein1_1d};
use proptest::prelude::*;

/// `∫₀¹ |F_a⁻¹(u) − F_b⁻¹(u)| du`, integrating the two step quantile functions
/// piecewise between their breakpoints.
fn quantile_integral(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (n, m) = (sa.len(), sb.len());
    let mut cuts: Vec<(usize, usize)> = (0..=n)
        .map(|i| (i, n))
        .chain((0..=m).map(|j| (j, m)))
        .collect();
    // Exact rational ordering of i/n vs j/m.
    cuts.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0].0 as f64 / w[0].1 as f64, w[1].0 as f64 / w[1].1 as f64);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let qa = sa[((mid * n as f64) as usize).min(n - 1)];
        let qb = sb[((mid * m as f64) as usize).min(m - 1)];
        total += (qa - qb).abs() * (hi - lo);
    }
    total
}

fn ks_brute(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter()
        .chain(b)
        .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
        .fold(0.0, f64::max)
}

fn draws(seed: u64, n: usize, mean: f64) -> Vec<f64> {
    let mut rng = SeededRng::new(seed);
    (0..n).map(|_| rng.normal(mean, 1.0)).collect()
}

#[test]
fn wasserstein_matches_quantile_integral_on_gaussian_draws() {
    let a = draws(11, 1000, 0.0);
    let b = draws(12, 1000, 0.3);
    let fast = wasserstein1_1d(&a, &b).unwrap();
    let oracle = quantile_integral(&a, &b);
    assert!((fast - oracle).abs() < 1e-12, "{fast} vs {oracle}");
}

#[test]
fn ks_matches_brute_force_on_gaussian_draws() {
    let a = draws(21, 700, 0.0);
    let b = draws(22, 1000, 0.1);
    assert_eq!(ks_statistic(&a, &b).unwrap(), ks_brute(&a, &b));
}

proptest! {
    #[test]
    fn wasserstein_unequal_sizes_match_oracle(
        a in prop::collection::vec(-5.0f64..5.0, 1..40),
        b in prop::collection::vec(-5.0f64..5.0, 1..40),
    ) {
        let fast = wasserstein1_1d(&a, &b).unwrap();
        prop_assert!((fast - quantile_integral(&a, &b)).abs() < 1e-10);
    }

    #[test]
    fn ks_with_ties_matches_brute_force(
        a in prop::collection::vec(0i32..6, 1..30),
        b in prop::collection::vec(0i32..6, 1..30),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        prop_assert!((ks_statistic(&a, &b).unwrap() - ks_brute(&a, &b)).abs() < 1e-15);
    }
}
