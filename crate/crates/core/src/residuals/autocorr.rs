use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ensure_finite;

/// Default lag window: one day of hourly lags.
pub const DEFAULT_MAX_LAG: usize = 24;

/// Normalized sample autocorrelation
/// `rho[m] = sum_n e[n+m] e[n] / sum_n e[n]^2` for `m = 0..=max_lag`.
///
/// The sums run over the raw series with no per-lag correction. With
/// `mean_subtract` the series is centered first.
pub fn autocorr(e: &[f64], max_lag: usize, mean_subtract: bool) -> Result<Vec<f64>> {
    ensure_finite(e, "residual")?;
    if max_lag >= e.len() {
        return Err(Error::InvalidParameter(format!(
            "max lag {max_lag} must be below the series length {}",
            e.len()
        )));
    }
    let centered: Vec<f64>;
    let e = if mean_subtract {
        let m = e.iter().sum::<f64>() / e.len() as f64;
        centered = e.iter().map(|v| v - m).collect();
        &centered[..]
    } else {
        e
    };
    let denom: f64 = e.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate(
            "autocorrelation of an all-zero series is undefined".into(),
        ));
    }
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for m in 1..=max_lag {
        let s: f64 = e[m..].iter().zip(e).map(|(a, b)| a * b).sum();
        rho.push(s / denom);
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceFilter {
    /// Every nonzero lag counts.
    Off,
    /// Only lags with `|rho[m]| > tau` count toward the numerator.
    Threshold(f64),
}

/// Conventional 95% band for a white series of length `n`.
pub fn default_threshold(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}

/// Share of absolute autocorrelation mass at nonzero lags,
/// `sum_{m != 0} |rho[m]| / sum_m |rho[m]|`. The filter only restricts the
/// numerator.
pub fn correlation_energy(rho: &[f64], filter: SignificanceFilter) -> f64 {
    let denom: f64 = rho.iter().map(|r| r.abs()).sum();
    if denom == 0.0 {
        return 0.0;
    }
    let num: f64 = rho
        .iter()
        .skip(1)
        .map(|r| r.abs())
        .filter(|a| match filter {
            SignificanceFilter::Off => true,
            SignificanceFilter::Threshold(t) => *a > t,
        })
        .sum();
    num / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alternating_series() {
        let r = autocorr(&[1.0, -1.0, 1.0, -1.0], 1, false).unwrap();
        assert_eq!(r, vec![1.0, -0.75]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            autocorr(&[0.0; 5], 2, false),
            Err(Error::Degenerate(_))
        ));
        assert!(autocorr(&[1.0, 2.0], 2, false).is_err());
        assert!(autocorr(&[1.0, f64::NAN, 2.0], 1, false).is_err());
        assert!(autocorr(&[3.0; 5], 2, true).is_err());
    }

    #[test]
    fn energy_examples() {
        assert_eq!(
            correlation_energy(&[1.0, 0.0, 0.0], SignificanceFilter::Off),
            0.0
        );
        assert!((correlation_energy(&[1.0, 0.25], SignificanceFilter::Off) - 0.2).abs() < 1e-15);
        assert_eq!(
            correlation_energy(&[1.0, 0.25], SignificanceFilter::Threshold(0.3)),
            0.0
        );
        assert!(
            (correlation_energy(&[1.0, -0.25], SignificanceFilter::Threshold(0.1)) - 0.2).abs()
                < 1e-15
        );
    }

    #[test]
    fn mean_subtraction_matches_manual() {
        let e = [2.0, 4.0, 3.0, 7.0, 5.0];
        let c: Vec<f64> = e.iter().map(|v| v - 4.2).collect();
        let a = autocorr(&e, 3, true).unwrap();
        let b = autocorr(&c, 3, false).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn bounded_and_scale_free(
            e in prop::collection::vec(-10.0f64..10.0, 30..80),
            c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
        ) {
            prop_assume!(e.iter().any(|v| v.abs() > 1e-6));
            let r = autocorr(&e, 10, false).unwrap();
            prop_assert_eq!(r[0], 1.0);
            prop_assert!(r.iter().all(|v| v.abs() <= 1.0 + 1e-12));
            let s: Vec<f64> = e.iter().map(|v| v * c).collect();
            let rs = autocorr(&s, 10, false).unwrap();
            for (a, b) in r.iter().zip(&rs) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            for f in [SignificanceFilter::Off, SignificanceFilter::Threshold(0.2)] {
                let g = correlation_energy(&r, f);
                prop_assert!((0.0..=1.0).contains(&g));
            }
        }
    }
}
