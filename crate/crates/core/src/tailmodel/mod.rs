//! Generalized Pareto load model.
//!
//! Density with shape `kappa`, scale `sigma` and lower bound `theta`:
//!
//! ```text
//! f(x) = (1/sigma) * (1 + kappa (x - theta)/sigma)^(-(1 + 1/kappa))
//! ```
//!
//! `kappa = 0` is the exponential limit `exp(-(x - theta)/sigma)/sigma`. For
//! `kappa < 0` the support is bounded above by `theta - sigma/kappa`.

mod diagnostics;
mod fit;

pub use diagnostics::{
    log_survival_points, mean_excess, mean_excess_slope, percentile_thresholds, zipf_points,
    zipf_tail_slope, CurvePoint, DiagnosticsConfig, MeanExcessPoint, TailDiagnostics,
    DEFAULT_MIN_EXCEEDANCES,
};
pub use fit::{fit_gpd_mle, GpdFit, ThetaPolicy, KAPPA_BOUNDS, MAX_ITERATIONS};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Below this |kappa| the exponential-limit formulas are used.
pub(crate) const KAPPA_ZERO: f64 = 1e-12;

/// Parameters of a generalized Pareto distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    pub kappa: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl GpdParams {
    pub fn new(kappa: f64, sigma: f64, theta: f64) -> Result<Self> {
        let p = Self {
            kappa,
            sigma,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa and theta must be finite, got {self:?}"
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Upper end of the support (`+inf` unless `kappa < 0`).
    pub fn upper_bound(&self) -> f64 {
        if self.kappa < -KAPPA_ZERO {
            self.theta - self.sigma / self.kappa
        } else {
            f64::INFINITY
        }
    }

    /// Mean, when finite (`kappa < 1`).
    pub fn mean(&self) -> Option<f64> {
        (self.kappa < 1.0).then(|| self.theta + self.sigma / (1.0 - self.kappa))
    }

    /// `ln(1 + kappa z) / kappa`, continuous through `kappa = 0`.
    fn log_term(&self, z: f64) -> f64 {
        if self.kappa.abs() < KAPPA_ZERO {
            z
        } else {
            (self.kappa * z).ln_1p() / self.kappa
        }
    }

    /// `ln f(x)`; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.theta) / self.sigma;
        if z < 0.0 || x > self.upper_bound() {
            return f64::NEG_INFINITY;
        }
        if self.kappa.abs() >= KAPPA_ZERO && 1.0 + self.kappa * z <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let l1p = if self.kappa.abs() < KAPPA_ZERO {
            0.0
        } else {
            (self.kappa * z).ln_1p()
        };
        -self.sigma.ln() - l1p - self.log_term(z)
    }
}

/// Probability density. Points outside the support have zero density.
pub fn gpd_pdf(x: f64, p: &GpdParams) -> Result<f64> {
    p.validate()?;
    Ok(p.ln_pdf(x).exp())
}

/// Cumulative distribution function.
pub fn gpd_cdf(x: f64, p: &GpdParams) -> Result<f64> {
    p.validate()?;
    let z = (x - p.theta) / p.sigma;
    if z <= 0.0 {
        return Ok(0.0);
    }
    if x >= p.upper_bound() {
        return Ok(1.0);
    }
    Ok(-(-p.log_term(z)).exp_m1())
}

/// Survival function `1 - F(x)`, accurate in the far tail.
pub fn gpd_sf(x: f64, p: &GpdParams) -> Result<f64> {
    p.validate()?;
    let z = (x - p.theta) / p.sigma;
    if z <= 0.0 {
        return Ok(1.0);
    }
    if x >= p.upper_bound() {
        return Ok(0.0);
    }
    Ok((-p.log_term(z)).exp())
}

/// Inverse CDF. `q = 1` yields `f64::INFINITY` when the support is unbounded.
pub fn gpd_quantile(q: f64, p: &GpdParams) -> Result<f64> {
    p.validate()?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile level {q} outside [0, 1]")));
    }
    if q == 1.0 {
        return Ok(p.upper_bound());
    }
    // -ln(1 - q)
    let e = -(-q).ln_1p();
    let z = if p.kappa.abs() < KAPPA_ZERO {
        e
    } else {
        (p.kappa * e).exp_m1() / p.kappa
    };
    Ok(p.theta + p.sigma * z)
}

/// Draws `n` values by inversion from a generator seeded with `seed`.
pub fn gpd_sample(p: &GpdParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be at least 1".into(),
        ));
    }
    let mut rng = rng::stream(seed, &[]);
    Ok(sample_with(p, n, &mut rng))
}

pub(crate) fn sample_with<R: Rng + ?Sized>(p: &GpdParams, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            // u in [0, 1) so the quantile is always finite
            gpd_quantile(u, p).expect("validated parameters")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table_params() -> GpdParams {
        GpdParams::new(0.58, 74.28, 0.25).unwrap()
    }

    #[test]
    fn density_at_lower_bound_is_inverse_scale() {
        for kappa in [-0.3, 0.0, 0.58, 1.5] {
            let p = GpdParams::new(kappa, 74.28, 0.25).unwrap();
            assert_relative_eq!(
                gpd_pdf(0.25, &p).unwrap(),
                1.0 / 74.28,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn exponential_limit() {
        let p = GpdParams::new(0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(
            gpd_pdf(1.0, &p).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        let near = GpdParams::new(1e-9, 1.0, 0.0).unwrap();
        assert_relative_eq!(
            gpd_pdf(1.0, &near).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn outside_support_has_zero_density() {
        let p = table_params();
        assert_eq!(gpd_pdf(0.0, &p).unwrap(), 0.0);
        let bounded = GpdParams::new(-0.5, 2.0, 0.0).unwrap();
        assert_eq!(bounded.upper_bound(), 4.0);
        assert_eq!(gpd_pdf(4.5, &bounded).unwrap(), 0.0);
        assert_eq!(gpd_cdf(4.5, &bounded).unwrap(), 1.0);
    }

    #[test]
    fn invalid_scale_is_rejected() {
        assert!(matches!(
            GpdParams::new(0.1, 0.0, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        let bad = GpdParams {
            kappa: 0.1,
            sigma: -1.0,
            theta: 0.0,
        };
        assert!(gpd_pdf(1.0, &bad).is_err());
    }

    #[test]
    fn cdf_at_theta_is_zero() {
        assert_eq!(gpd_cdf(0.25, &table_params()).unwrap(), 0.0);
    }

    #[test]
    fn median_closed_form() {
        let p = table_params();
        let expected = 0.25 + 74.28 * (2f64.powf(0.58) - 1.0) / 0.58;
        assert_relative_eq!(
            gpd_quantile(0.5, &p).unwrap(),
            expected,
            max_relative = 1e-13
        );
        assert!((expected - 63.6).abs() < 0.05);
    }

    #[test]
    fn unit_quantile_is_unbounded_for_positive_shape() {
        assert_eq!(gpd_quantile(1.0, &table_params()).unwrap(), f64::INFINITY);
        assert!(matches!(
            gpd_quantile(1.5, &table_params()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gpd_quantile(-0.1, &table_params()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = table_params();
        assert_eq!(
            gpd_sample(&p, 100, 9).unwrap(),
            gpd_sample(&p, 100, 9).unwrap()
        );
        assert_ne!(
            gpd_sample(&p, 100, 9).unwrap(),
            gpd_sample(&p, 100, 10).unwrap()
        );
        assert!(gpd_sample(&p, 0, 1).is_err());
    }

    #[test]
    fn sample_median_matches_quantile() {
        let p = table_params();
        let mut s = gpd_sample(&p, 1_000_000, 42).unwrap();
        s.sort_by(f64::total_cmp);
        let med = 0.5 * (s[499_999] + s[500_000]);
        let exact = gpd_quantile(0.5, &p).unwrap();
        assert!((med / exact - 1.0).abs() < 0.01, "median {med} vs {exact}");
        assert!(s[0] >= p.theta);
    }

    #[test]
    fn exponential_sample_mean() {
        let p = GpdParams::new(0.0, 1.0, 0.0).unwrap();
        let s = gpd_sample(&p, 1_000_000, 3).unwrap();
        let m = s.iter().sum::<f64>() / s.len() as f64;
        assert!((m - 1.0).abs() < 0.005, "mean {m}");
    }

    #[test]
    fn bounded_samples_stay_in_support() {
        let p = GpdParams::new(-0.3, 2.0, 1.0).unwrap();
        let ub = p.upper_bound();
        assert!(gpd_sample(&p, 10_000, 5)
            .unwrap()
            .iter()
            .all(|&x| x >= 1.0 && x <= ub));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantile_inverts_cdf(
                kappa in prop_oneof![Just(0.0), -0.9f64..3.0],
                sigma in 0.01f64..500.0,
                theta in -10.0f64..10.0,
                q in 0.001f64..0.999,
            ) {
                let p = GpdParams::new(kappa, sigma, theta).unwrap();
                let x = gpd_quantile(q, &p).unwrap();
                let back = gpd_quantile(gpd_cdf(x, &p).unwrap(), &p).unwrap();
                prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1e-300) + 1e-12 * sigma);
            }

            #[test]
            fn cdf_and_sf_complement(
                kappa in -0.9f64..3.0,
                sigma in 0.1f64..100.0,
                q in 0.0f64..1.0,
            ) {
                let p = GpdParams::new(kappa, sigma, 0.0).unwrap();
                let x = gpd_quantile(q, &p).unwrap();
                if x.is_finite() {
                    let s = gpd_cdf(x, &p).unwrap() + gpd_sf(x, &p).unwrap();
                    prop_assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
