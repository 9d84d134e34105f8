//! Forecast error as a function of aggregate size.
//!
//! The error of a day-ahead forecast on an aggregate of mean load `W` is
//! modeled as `cv(W) = sqrt(beta0 / W^p + beta1)`: a reducible term that
//! averages out with aggregation and an irreducible floor `sqrt(beta1)`.

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecaster::{backtest, Backtest, ForecasterConfig};
use crate::rng;
use crate::synth::Population;

/// Coefficient of variation of the forecast error, in percent:
/// `100 * RMSE / mean(actual)`.
pub fn cv(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::Contract(format!(
            "{} actual values but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(Error::UndefinedMetric(format!(
            "mean actual load is {mean}, cv needs a positive mean"
        )));
    }
    let mse = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        / n;
    Ok(100.0 * mse.sqrt() / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregationPoint {
    /// Mean hourly aggregate load over the evaluation window, kWh.
    pub w_kwh: f64,
    pub cv_pct: f64,
    pub n_customers: usize,
    pub replicate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggConfig {
    /// Customer counts per aggregate.
    pub levels: Vec<usize>,
    pub replicates: usize,
    pub forecaster: ForecasterConfig,
    /// Share of the history used for fitting; the rest is forecast
    /// out of sample. Normality tests need at most 5000 residual hours.
    pub train_fraction: f64,
    pub seed: u64,
}

impl AggConfig {
    pub fn new(levels: Vec<usize>, seed: u64) -> Self {
        Self {
            levels,
            replicates: 20,
            forecaster: ForecasterConfig::default(),
            train_fraction: 2.0 / 3.0,
            seed,
        }
    }

    fn train_days(&self, n_days: usize) -> Result<usize> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        let t = (n_days as f64 * self.train_fraction).round() as usize;
        if t == 0 || t >= n_days {
            return Err(Error::InsufficientData {
                required: 2,
                available: n_days,
            });
        }
        Ok(t)
    }
}

/// Out-of-sample backtest of one aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct AggCell {
    pub level_index: usize,
    pub n_customers: usize,
    pub replicate: usize,
    pub members: Vec<usize>,
    pub backtest: Backtest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedLevel {
    pub n_customers: usize,
    pub reason: String,
}

/// Customer subsets for one level. When `level * replicates` fits in the
/// population the replicates are disjoint slices of one permutation;
/// otherwise each replicate is an independent draw without replacement.
pub fn draw_subsets(
    population: usize,
    level: usize,
    replicates: usize,
    seed: u64,
    level_index: usize,
) -> Vec<Vec<usize>> {
    let li = level_index as u64;
    let mut out: Vec<Vec<usize>> = if level * replicates <= population {
        let mut perm: Vec<usize> = (0..population).collect();
        perm.shuffle(&mut rng::stream(seed, &[li]));
        perm.chunks(level)
            .take(replicates)
            .map(<[usize]>::to_vec)
            .collect()
    } else {
        (0..replicates)
            .map(|r| {
                let mut rng = rng::stream(seed, &[li, r as u64 + 1]);
                index::sample(&mut rng, population, level).into_vec()
            })
            .collect()
    };
    for s in &mut out {
        s.sort_unstable();
    }
    out
}

/// Runs the forecaster on every (level, replicate) aggregate. Levels larger
/// than the population are reported as skipped. Cells run in parallel; the
/// output order is level-major and does not depend on scheduling.
pub fn aggregate_backtests(
    population: &Population,
    cfg: &AggConfig,
) -> Result<(Vec<AggCell>, Vec<SkippedLevel>)> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter(
            "replicates must be at least 1".into(),
        ));
    }
    let train_days = cfg.train_days(population.n_days())?;
    let n = population.n_customers();
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for (li, &level) in cfg.levels.iter().enumerate() {
        if level == 0 || level > n {
            skipped.push(SkippedLevel {
                n_customers: level,
                reason: format!("level {level} is outside 1..={n} customers"),
            });
            continue;
        }
        for (r, members) in draw_subsets(n, level, cfg.replicates, cfg.seed, li)
            .into_iter()
            .enumerate()
        {
            jobs.push((li, level, r, members));
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|(level_index, n_customers, replicate, members)| {
            let history = population.aggregate(&members)?;
            let bt = backtest(&history, train_days, &cfg.forecaster)?;
            Ok(AggCell {
                level_index,
                n_customers,
                replicate,
                members,
                backtest: bt,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cells, skipped))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggCurve {
    pub points: Vec<AggregationPoint>,
    pub skipped: Vec<SkippedLevel>,
}

pub fn build_agg_curve(population: &Population, cfg: &AggConfig) -> Result<AggCurve> {
    let (cells, skipped) = aggregate_backtests(population, cfg)?;
    let points = cells
        .iter()
        .map(|c| {
            Ok(AggregationPoint {
                w_kwh: c.backtest.mean_load(),
                cv_pct: c.backtest.cv()?,
                n_customers: c.n_customers,
                replicate: c.replicate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AggCurve { points, skipped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub beta0: f64,
    pub beta1: f64,
    pub p: f64,
    /// Sum of squared residuals in cv units.
    pub sse: f64,
}

/// Curve value `sqrt(beta0 / W^p + beta1)`, percent.
pub fn eval_scaling(law: &ScalingLaw, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!("load W must be positive, got {w}")));
    }
    Ok((law.beta0 / w.powf(law.p) + law.beta1).sqrt())
}

/// Load at which the reducible and irreducible terms are equal,
/// `beta0 / beta1`.
pub fn critical_load(law: &ScalingLaw) -> Result<f64> {
    if !(law.beta1 > 0.0) {
        return Err(Error::UndefinedMetric(
            "critical load needs a positive irreducible term".into(),
        ));
    }
    Ok(law.beta0 / law.beta1)
}

/// Error floor `sqrt(beta1)`, percent.
pub fn irreducible_error(law: &ScalingLaw) -> f64 {
    law.beta1.sqrt()
}

fn sse(ws: &[f64], cvs: &[f64], beta0: f64, beta1: f64, p: f64) -> f64 {
    ws.iter()
        .zip(cvs)
        .map(|(w, c)| {
            let r = c - (beta0 / w.powf(p) + beta1).sqrt();
            r * r
        })
        .sum()
}

fn check_points(ws: &[f64], cvs: &[f64], p: f64) -> Result<()> {
    if ws.len() != cvs.len() {
        return Err(Error::Contract("W and cv lengths differ".into()));
    }
    if ws.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            available: ws.len(),
        });
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "exponent p must be positive, got {p}"
        )));
    }
    if let Some(w) = ws.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::Domain(format!("load W must be positive, got {w}")));
    }
    if let Some(c) = cvs.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
        return Err(Error::Domain(format!("cv must be non-negative, got {c}")));
    }
    if ws.iter().all(|&w| w == ws[0]) {
        return Err(Error::Unidentifiable(
            "all points share one load W; beta0 and beta1 cannot be separated".into(),
        ));
    }
    Ok(())
}

/// Non-negative least squares of `cv^2` on `W^-p`: the unconstrained line
/// if both coefficients are non-negative, otherwise the best boundary fit.
fn linearized(ws: &[f64], cvs: &[f64], p: f64) -> (f64, f64) {
    let xs: Vec<f64> = ws.iter().map(|w| w.powf(-p)).collect();
    let ys: Vec<f64> = cvs.iter().map(|c| c * c).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    if slope >= 0.0 && icpt >= 0.0 {
        return (slope, icpt);
    }
    let lsq = |b0: f64, b1: f64| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - b0 * x - b1;
                r * r
            })
            .sum()
    };
    let sx2: f64 = xs.iter().map(|x| x * x).sum();
    let through_origin = (xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / sx2).max(0.0);
    let candidates = [(0.0, my.max(0.0)), (through_origin, 0.0), (0.0, 0.0)];
    candidates
        .into_iter()
        .min_by(|a, b| lsq(a.0, a.1).total_cmp(&lsq(b.0, b.1)))
        .expect("non-empty")
}

/// Fits the law at a fixed exponent. For `p = 1` the fit is the closed-form
/// non-negative linear least squares of `cv^2` on `1/W`; other exponents use
/// [`fit_scaling_law_nonlinear`] started from the linearized estimate.
pub fn fit_scaling_law(points: &[AggregationPoint], p: f64) -> Result<ScalingLaw> {
    let ws: Vec<f64> = points.iter().map(|q| q.w_kwh).collect();
    let cvs: Vec<f64> = points.iter().map(|q| q.cv_pct).collect();
    fit_scaling_law_xy(&ws, &cvs, p)
}

pub fn fit_scaling_law_xy(ws: &[f64], cvs: &[f64], p: f64) -> Result<ScalingLaw> {
    check_points(ws, cvs, p)?;
    if p == 1.0 {
        let (beta0, beta1) = linearized(ws, cvs, p);
        return Ok(ScalingLaw {
            beta0,
            beta1,
            p,
            sse: sse(ws, cvs, beta0, beta1, p),
        });
    }
    fit_scaling_law_nonlinear(ws, cvs, p, None)
}

pub const NONLINEAR_MAX_ITERATIONS: usize = 200;
const NONLINEAR_REL_TOL: f64 = 1e-12;

/// Levenberg-Marquardt least squares in cv space with
/// `beta0 = a^2`, `beta1 = b^2` so both stay non-negative. Starts from
/// `init` or the linearized fit and stops when the relative SSE change of an
/// accepted step falls below 1e-12 or after 200 iterations.
pub fn fit_scaling_law_nonlinear(
    ws: &[f64],
    cvs: &[f64],
    p: f64,
    init: Option<(f64, f64)>,
) -> Result<ScalingLaw> {
    check_points(ws, cvs, p)?;
    let xs: Vec<f64> = ws.iter().map(|w| w.powf(-p)).collect();
    let (b0, b1) = init.unwrap_or_else(|| linearized(ws, cvs, p));
    // keep both parameters off zero so the gradient is informative
    let floor = 1e-8 * cvs.iter().map(|c| c * c).fold(0.0, f64::max).max(1e-300);
    let mut a = b0.max(floor).sqrt();
    let mut b = b1.max(floor).sqrt();
    let eval = |a: f64, b: f64| sse(ws, cvs, a * a, b * b, p);
    let mut cur = eval(a, b);
    let mut lambda = 1e-3;
    for _ in 0..NONLINEAR_MAX_ITERATIONS {
        if cur == 0.0 {
            break;
        }
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, c) in xs.iter().zip(cvs) {
            let m = (a * a * x + b * b).sqrt();
            if m == 0.0 {
                continue;
            }
            let da = a * x / m;
            let db = b / m;
            let r = c - m;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let (haa, hbb) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
            let det = haa * hbb - jab * jab;
            if det > 0.0 {
                let sa = (hbb * ga - jab * gb) / det;
                let sb = (haa * gb - jab * ga) / det;
                let next = eval(a + sa, b + sb);
                if next <= cur {
                    let rel = (cur - next) / cur;
                    a += sa;
                    b += sb;
                    cur = next;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if rel < NONLINEAR_REL_TOL {
                        return Ok(ScalingLaw {
                            beta0: a * a,
                            beta1: b * b,
                            p,
                            sse: cur,
                        });
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(ScalingLaw {
        beta0: a * a,
        beta1: b * b,
        p,
        sse: cur,
    })
}

/// SSE of the best constant-cv fit, the null model for the curve.
pub fn constant_fit_sse(cvs: &[f64]) -> f64 {
    let m = cvs.iter().sum::<f64>() / cvs.len() as f64;
    cvs.iter().map(|c| (c - m) * (c - m)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub beta0: f64,
    pub beta1: f64,
    pub p: f64,
    pub w_star: Option<f64>,
    pub irreducible_pct: f64,
    pub sse: f64,
}

impl From<&ScalingLaw> for LawSummary {
    fn from(l: &ScalingLaw) -> Self {
        Self {
            beta0: l.beta0,
            beta1: l.beta1,
            p: l.p,
            w_star: critical_load(l).ok(),
            irreducible_pct: irreducible_error(l),
            sse: l.sse,
        }
    }
}

impl LawSummary {
    pub fn law(&self) -> ScalingLaw {
        ScalingLaw {
            beta0: self.beta0,
            beta1: self.beta1,
            p: self.p,
            sse: self.sse,
        }
    }
}
