//! Residual diagnostics: normality via Shapiro-Wilk and whiteness via the
//! sample autocorrelation and its correlation energy.

mod autocorr;
mod shapiro;
mod sweep;

pub use autocorr::{
    autocorr, correlation_energy, default_threshold, SignificanceFilter, DEFAULT_MAX_LAG,
};
pub use shapiro::{shapiro_wilk, ShapiroWilk, MAX_N as SW_MAX_N, MIN_N as SW_MIN_N};
pub use sweep::{sweep_normality, GammaMode, SweepConfig, SweepLevel, SweepResult};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub n: usize,
    pub rho: Vec<f64>,
    pub gamma: f64,
    pub sw_stat: f64,
    pub sw_p_value: f64,
    pub sw_pass: bool,
}

/// Autocorrelation up to `max_lag`, correlation energy under `filter`, and
/// the Shapiro-Wilk test at `alpha`.
pub fn residual_report(
    e: &[f64],
    max_lag: usize,
    filter: SignificanceFilter,
    alpha: f64,
) -> Result<ResidualReport> {
    let rho = autocorr(e, max_lag, false)?;
    let gamma = correlation_energy(&rho, filter);
    let sw = shapiro_wilk(e, alpha)?;
    Ok(ResidualReport {
        n: e.len(),
        rho,
        gamma,
        sw_stat: sw.w,
        sw_p_value: sw.p_value,
        sw_pass: sw.pass,
    })
}
