use serde::{Deserialize, Serialize};

use super::{default_threshold, residual_report, SignificanceFilter, DEFAULT_MAX_LAG};
use crate::error::Result;
use crate::scaling::{aggregate_backtests, AggConfig, SkippedLevel};
use crate::synth::Population;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// All nonzero lags count.
    Literal,
    /// Only lags beyond the 95% white-noise band `1.96/sqrt(N)` count.
    Thresholded,
}

impl GammaMode {
    pub fn filter(self, n: usize) -> SignificanceFilter {
        match self {
            Self::Literal => SignificanceFilter::Off,
            Self::Thresholded => SignificanceFilter::Threshold(default_threshold(n)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub agg: AggConfig,
    pub alpha: f64,
    pub max_lag: usize,
    pub gamma: GammaMode,
}

impl SweepConfig {
    pub fn new(agg: AggConfig) -> Self {
        Self {
            agg,
            alpha: 0.05,
            max_lag: DEFAULT_MAX_LAG,
            gamma: GammaMode::Literal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub n_customers: usize,
    pub replicates: usize,
    pub pass_fraction: f64,
    pub mean_gamma: f64,
    /// Per-replicate (gamma, Shapiro-Wilk p-value).
    pub series: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub levels: Vec<SweepLevel>,
    /// Pass fraction expected of Gaussian residuals, `1 - alpha`.
    pub reference_pass: f64,
    pub skipped: Vec<SkippedLevel>,
}

/// Backtests random aggregates at each level and reports the share of
/// residual series that pass Shapiro-Wilk and their mean correlation energy.
pub fn sweep_normality(population: &Population, cfg: &SweepConfig) -> Result<SweepResult> {
    let (cells, skipped) = aggregate_backtests(population, &cfg.agg)?;
    let mut levels: Vec<SweepLevel> = Vec::new();
    let mut current = None;
    for cell in &cells {
        let e = cell.backtest.residuals();
        let report = residual_report(&e, cfg.max_lag, cfg.gamma.filter(e.len()), cfg.alpha)?;
        if current != Some(cell.level_index) {
            current = Some(cell.level_index);
            levels.push(SweepLevel {
                n_customers: cell.n_customers,
                replicates: 0,
                pass_fraction: 0.0,
                mean_gamma: 0.0,
                series: Vec::new(),
            });
        }
        let level = levels.last_mut().expect("pushed above");
        level.replicates += 1;
        level.pass_fraction += f64::from(u8::from(report.sw_pass));
        level.mean_gamma += report.gamma;
        level.series.push((report.gamma, report.sw_p_value));
    }
    for l in &mut levels {
        l.pass_fraction /= l.replicates as f64;
        l.mean_gamma /= l.replicates as f64;
    }
    Ok(SweepResult {
        levels,
        reference_pass: 1.0 - cfg.alpha,
        skipped,
    })
}
