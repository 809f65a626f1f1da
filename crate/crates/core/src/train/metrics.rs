//! One-dimensional distribution-fit metrics and histogram snapshots.

use serde::{Deserialize, Serialize};

use crate::error::{AganError, Result};

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Wasserstein-1 distance between two empirical samples.
///
/// Equal sizes use the mean absolute difference of order statistics; otherwise
/// the CDF-difference integral `∫ |F_a − F_b| dx` is evaluated exactly.
pub fn wasserstein1_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(AganError::EmptyInput);
    }
    let (sa, sb) = (sorted(a), sorted(b));
    if sa.len() == sb.len() {
        let n = sa.len() as f64;
        return Ok(sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>() / n);
    }
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut prev = sa[0].min(sb[0]);
    let mut total = 0.0;
    while i < sa.len() || j < sb.len() {
        let next = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / na - j as f64 / nb).abs() * (next - prev);
        while i < sa.len() && sa[i] == next {
            i += 1;
        }
        while j < sb.len() && sb[j] == next {
            j += 1;
        }
        prev = next;
    }
    Ok(total)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`,
/// evaluated after each distinct value of the merged sample.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(AganError::EmptyInput);
    }
    let (sa, sb) = (sorted(a), sorted(b));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] == x {
            i += 1;
        }
        while j < sb.len() && sb[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub real_count: usize,
    pub generated_count: usize,
}

pub const HISTOGRAM_BINS: usize = 30;

/// Equal-width histogram of both samples over the pooled range.
pub fn histogram(real: &[f64], generated: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if real.is_empty() && generated.is_empty() {
        return Err(AganError::EmptyInput);
    }
    if bins == 0 {
        return Err(AganError::InvalidArgument("zero histogram bins".into()));
    }
    let pooled = real.iter().chain(generated);
    let (mut lo, mut hi) = pooled.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
        (l.min(x), h.max(x))
    });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(AganError::NumericOverflow(
            "non-finite histogram sample".into(),
        ));
    }
    if hi == lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|k| HistogramBin {
            bin_left: lo + k as f64 * width,
            bin_right: if k + 1 == bins {
                hi
            } else {
                lo + (k + 1) as f64 * width
            },
            real_count: 0,
            generated_count: 0,
        })
        .collect();
    let index = |x: f64| (((x - lo) / width) as usize).min(bins - 1);
    for &x in real {
        out[index(x)].real_count += 1;
    }
    for &x in generated {
        out[index(x)].generated_count += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wasserstein_trivial_cases() {
        assert_eq!(
            wasserstein1_1d(&[0.3, -1.0, 2.0], &[2.0, 0.3, -1.0]).unwrap(),
            0.0
        );
        assert_eq!(wasserstein1_1d(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(wasserstein1_1d(&[], &[1.0]).is_err());
        // Unequal sizes: point mass at 0 vs {0, 2} moves half the mass by 2.
        assert!((wasserstein1_1d(&[0.0], &[0.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ks_trivial_cases() {
        assert_eq!(
            ks_statistic(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(),
            0.0
        );
        assert_eq!(ks_statistic(&[0.0, 0.5], &[3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert!(ks_statistic(&[1.0], &[]).is_err());
    }

    #[test]
    fn histogram_counts_everything() {
        let real = [0.0, 0.1, 0.5, 1.0];
        let gen = [0.2, 0.9, 1.0];
        let h = histogram(&real, &gen, HISTOGRAM_BINS).unwrap();
        assert_eq!(h.len(), 30);
        assert_eq!(h.iter().map(|b| b.real_count).sum::<usize>(), 4);
        assert_eq!(h.iter().map(|b| b.generated_count).sum::<usize>(), 3);
        assert_eq!(h[0].bin_left, 0.0);
        assert_eq!(h[29].bin_right, 1.0);
        assert_eq!(h[29].real_count, 1);
    }
}
