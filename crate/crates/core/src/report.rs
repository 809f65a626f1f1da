//! CSV emission with 17 significant digits so reruns compare byte-for-byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::grad::GradientSweepRow;
use crate::saddle::DStarRow;
use crate::train::{HistogramBin, MetricsRecord};

/// Formats a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub const METRICS_HEADER: &str = "epoch,d_loss,g_loss,wasserstein1,ks_stat,d_flatness";
pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,real_count,generated_count";
pub const DSTAR_HEADER: &str = "symbol,alpha,d_star";
pub const GRADIENT_HEADER: &str = "family,alpha,pr,pg,d,grad";

fn table<T>(header: &str, rows: &[T], line: impl Fn(&T) -> String) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", line(r));
    }
    out
}

pub fn metrics_csv(rows: &[MetricsRecord]) -> String {
    table(METRICS_HEADER, rows, |m| {
        format!(
            "{},{},{},{},{},{}",
            m.epoch,
            fmt_f64(m.d_loss),
            fmt_f64(m.g_loss),
            fmt_f64(m.wasserstein1),
            fmt_f64(m.ks_stat),
            fmt_f64(m.d_flatness)
        )
    })
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    table(HISTOGRAM_HEADER, bins, |b| {
        format!(
            "{},{},{},{}",
            fmt_f64(b.bin_left),
            fmt_f64(b.bin_right),
            b.real_count,
            b.generated_count
        )
    })
}

pub fn dstar_csv(rows: &[DStarRow]) -> String {
    table(DSTAR_HEADER, rows, |r| {
        format!("{},{},{}", r.symbol, fmt_f64(r.alpha), fmt_f64(r.d_star))
    })
}

pub fn gradient_csv(rows: &[GradientSweepRow]) -> String {
    table(GRADIENT_HEADER, rows, |r| {
        format!(
            "{},{},{},{},{},{}",
            r.family,
            fmt_f64(r.alpha),
            fmt_f64(r.scenario.pr),
            fmt_f64(r.scenario.pg),
            fmt_f64(r.scenario.d),
            fmt_f64(r.grad_value)
        )
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_roundtrip() {
        for x in [0.1, -std::f64::consts::LN_2, 1e-300, 123456.789, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s
                .split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn metrics_header_and_row() {
        let m = MetricsRecord {
            epoch: 3,
            d_loss: 0.5,
            g_loss: -0.5,
            wasserstein1: 0.25,
            ks_stat: 0.125,
            d_flatness: 0.0,
        };
        let csv = metrics_csv(&[m]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(METRICS_HEADER));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("3,5.0000000000000000e-1,"));
    }
}
