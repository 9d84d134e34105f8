//! Empirical tail diagnostics: mean excess, log survival and Zipf (log rank) curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{ensure_finite, line_fit, quantile_sorted, sorted};

/// Points backed by fewer exceedances than this are dropped from the mean-excess curve.
pub const DEFAULT_MIN_EXCEEDANCES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanExcessPoint {
    pub u: f64,
    pub e: f64,
    pub exceedances: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
}

/// `e(u) = E[X - u | X > u]` for each threshold with enough exceedances.
pub fn mean_excess(
    samples: &[f64],
    thresholds: &[f64],
    min_exceedances: usize,
) -> Result<Vec<MeanExcessPoint>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    ensure_finite(samples, "samples")?;
    let xs = sorted(samples);
    // suffix[i] = sum of xs[i..]
    let mut suffix = vec![0.0; xs.len() + 1];
    for i in (0..xs.len()).rev() {
        suffix[i] = suffix[i + 1] + xs[i];
    }
    let min_count = min_exceedances.max(1);
    Ok(thresholds
        .iter()
        .filter_map(|&u| {
            let first = xs.partition_point(|&x| x <= u);
            let count = xs.len() - first;
            (count >= min_count).then(|| MeanExcessPoint {
                u,
                e: suffix[first] / count as f64 - u,
                exceedances: count,
            })
        })
        .collect())
}

/// Empirical percentiles of `samples` at each level in `levels_pct` (0..=100).
pub fn percentile_thresholds(samples: &[f64], levels_pct: &[f64]) -> Vec<f64> {
    let xs = sorted(samples);
    levels_pct
        .iter()
        .map(|p| quantile_sorted(&xs, p / 100.0))
        .collect()
}

/// Least-squares slope of `e(u)` against `u` with thresholds at integer
/// percentiles `lo_pct..=hi_pct`.
pub fn mean_excess_slope(samples: &[f64], lo_pct: u32, hi_pct: u32) -> Result<f64> {
    let levels: Vec<f64> = (lo_pct..=hi_pct).map(f64::from).collect();
    let thresholds = percentile_thresholds(samples, &levels);
    let pts = mean_excess(samples, &thresholds, DEFAULT_MIN_EXCEEDANCES)?;
    let us: Vec<f64> = pts.iter().map(|p| p.u).collect();
    let es: Vec<f64> = pts.iter().map(|p| p.e).collect();
    Ok(line_fit(&us, &es)?.0)
}

fn descending(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    ensure_finite(samples, "samples")?;
    if let Some(bad) = samples.iter().find(|&&x| x <= 0.0) {
        return Err(Error::Domain(format!(
            "log-scale diagnostics need positive values, found {bad}"
        )));
    }
    let mut v = samples.to_vec();
    // stable, so tied values keep their input order
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// `(ln k, ln x_[k])` for `k = 1..N`, where `x_[1]` is the largest value.
pub fn zipf_points(samples: &[f64]) -> Result<Vec<CurvePoint>> {
    Ok(descending(samples)?
        .iter()
        .enumerate()
        .map(|(i, &x)| CurvePoint {
            x: ((i + 1) as f64).ln(),
            y: x.ln(),
        })
        .collect())
}

/// `(ln x, ln S(x))` in ascending `x`, with the empirical survival at the
/// k-th largest value taken as `S(x_[k]) = k / N`. The maximum therefore
/// plots at `1/N` and the minimum at 1.
pub fn log_survival_points(samples: &[f64]) -> Result<Vec<CurvePoint>> {
    let desc = descending(samples)?;
    let n = desc.len() as f64;
    Ok(desc
        .iter()
        .enumerate()
        .rev()
        .map(|(i, &x)| CurvePoint {
            x: x.ln(),
            y: ((i + 1) as f64 / n).ln(),
        })
        .collect())
}

/// Slope of `ln x_[k]` on `ln k` over the order statistics above `min_value`.
pub fn zipf_tail_slope(samples: &[f64], min_value: f64) -> Result<f64> {
    let pts = zipf_points(samples)?;
    let cut = min_value.ln();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        pts.iter().filter(|p| p.y > cut).map(|p| (p.x, p.y)).unzip();
    line_fit(&xs, &ys).map(|(slope, _)| slope)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// Percentile levels at which mean-excess thresholds are placed.
    pub threshold_percentiles: Vec<f64>,
    pub min_exceedances: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            threshold_percentiles: (1..=99).map(f64::from).collect(),
            min_exceedances: DEFAULT_MIN_EXCEEDANCES,
        }
    }
}

/// The three diagnostic curves for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostics {
    pub mean_excess: Vec<MeanExcessPoint>,
    pub log_survival: Vec<CurvePoint>,
    pub zipf: Vec<CurvePoint>,
}

impl TailDiagnostics {
    pub fn compute(samples: &[f64], cfg: &DiagnosticsConfig) -> Result<Self> {
        let thresholds = percentile_thresholds(samples, &cfg.threshold_percentiles);
        Ok(Self {
            mean_excess: mean_excess(samples, &thresholds, cfg.min_exceedances)?,
            log_survival: log_survival_points(samples)?,
            zipf: zipf_points(samples)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tailmodel::{gpd_sample, GpdParams};

    #[test]
    fn single_exceedance() {
        let pts = mean_excess(&[5.0], &[1.0], 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].e, 4.0);
        assert_eq!(pts[0].exceedances, 1);
        assert!(mean_excess(&[5.0], &[1.0], DEFAULT_MIN_EXCEEDANCES)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(mean_excess(&[], &[1.0], 1).is_err());
    }

    #[test]
    fn exponential_mean_excess_is_flat() {
        let p = GpdParams::new(0.0, 1.0, 0.0).unwrap();
        let s = gpd_sample(&p, 100_000, 1).unwrap();
        let thr = percentile_thresholds(&s, &[10.0, 30.0, 50.0, 70.0, 90.0]);
        for pt in mean_excess(&s, &thr, DEFAULT_MIN_EXCEEDANCES).unwrap() {
            assert!((pt.e - 1.0).abs() < 0.05, "{pt:?}");
        }
        assert!(mean_excess_slope(&s, 5, 80).unwrap().abs() < 0.05);
    }

    #[test]
    fn gpd_mean_excess_slope() {
        let p = GpdParams::new(0.58, 74.28, 0.25).unwrap();
        let s = gpd_sample(&p, 100_000, 2).unwrap();
        let slope = mean_excess_slope(&s, 5, 80).unwrap();
        let expected = 0.58 / 0.42;
        assert!((slope / expected - 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn zipf_small_example() {
        let pts = zipf_points(&[1.0, 10.0, 100.0]).unwrap();
        let expect = [(1f64, 100f64), (2.0, 10.0), (3.0, 1.0)];
        for (p, (k, x)) in pts.iter().zip(expect) {
            assert!((p.x - k.ln()).abs() < 1e-15 && (p.y - x.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn zipf_ties_take_consecutive_ranks() {
        let pts = zipf_points(&[5.0, 5.0]).unwrap();
        assert_eq!(pts[0].x, 0.0);
        assert_eq!(pts[1].x, 2f64.ln());
        assert_eq!(pts[0].y, pts[1].y);
    }

    #[test]
    fn non_positive_values_are_rejected() {
        assert!(matches!(zipf_points(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(
            log_survival_points(&[-1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn survival_small_example() {
        let pts = log_survival_points(&[2.0, 1.0, 3.0]).unwrap();
        let expect = [(1.0f64, 1.0f64), (2.0, 2.0 / 3.0), (3.0, 1.0 / 3.0)];
        for (p, (x, s)) in pts.iter().zip(expect) {
            assert!((p.x - x.ln()).abs() < 1e-15 && (p.y - s.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn deep_tail_zipf_slope_is_minus_kappa() {
        // ln x_[k] ~ -kappa ln k once x >> sigma / kappa
        let p = GpdParams::new(0.58, 74.28, 0.25).unwrap();
        let s = gpd_sample(&p, 100_000, 3).unwrap();
        let slope = zipf_tail_slope(&s, 1_000.0).unwrap();
        assert!((slope + 0.58).abs() < 0.1, "slope {slope}");
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn zipf_values_non_increasing(v in proptest::collection::vec(0.001f64..1e6, 1..200)) {
                let pts = zipf_points(&v).unwrap();
                prop_assert!(pts.windows(2).all(|w| w[0].y >= w[1].y));
            }

            #[test]
            fn survival_non_increasing_in_x(v in proptest::collection::vec(0.001f64..1e6, 1..200)) {
                let pts = log_survival_points(&v).unwrap();
                prop_assert!(pts.windows(2).all(|w| w[0].x <= w[1].x && w[0].y >= w[1].y));
                prop_assert!(pts.last().unwrap().y <= 0.0);
                prop_assert!(pts[0].y == 0.0);
            }
        }
    }
}
