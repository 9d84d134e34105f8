//! Scalar ARX model for the daily total:
//! `p_{d+1} = sum_k a_k p_k + sum_r b_r t_r (+ c)` with `k = d+1-K..d` and
//! `r = d+1-K..d+1`, fitted by least squares on one-step-ahead errors.

use serde::{Deserialize, Serialize};

use super::LoadHistory;
use crate::error::{Error, Result};
use crate::linalg::{self, Design, RankPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArxConfig {
    pub k: usize,
    pub intercept: bool,
    /// Include the K+1 temperature terms.
    pub exogenous: bool,
    pub rank_policy: RankPolicy,
}

impl ArxConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            intercept: true,
            exogenous: true,
            rank_policy: RankPolicy::Strict,
        }
    }

    pub fn regressors(&self) -> usize {
        self.k + if self.exogenous { self.k + 1 } else { 0 } + usize::from(self.intercept)
    }

    /// Twice the regressor count.
    pub fn min_days(&self) -> usize {
        2 * self.regressors()
    }

    fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.k).map(|i| lag_name("p", i)).collect();
        if self.exogenous {
            names.extend((0..=self.k).map(|j| exog_name("t", j)));
        }
        if self.intercept {
            names.push("intercept".into());
        }
        names
    }
}

pub(super) fn lag_name(var: &str, i: usize) -> String {
    if i == 0 {
        format!("{var}[d]")
    } else {
        format!("{var}[d-{i}]")
    }
}

pub(super) fn exog_name(var: &str, j: usize) -> String {
    match j {
        0 => format!("{var}[d+1]"),
        1 => format!("{var}[d]"),
        _ => format!("{var}[d-{}]", j - 1),
    }
}

/// Fitted total-power model. `lag_coefs[i]` multiplies the total `i+1` days
/// before the forecast day; `exog_coefs[j]` the daily mean temperature `j`
/// days before it (`j = 0` is the forecast day itself).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArxModel {
    pub k: usize,
    pub lag_coefs: Vec<f64>,
    pub exog_coefs: Vec<f64>,
    pub intercept: Option<f64>,
}

impl ArxModel {
    pub(crate) fn predict_at(&self, totals: &[f64], temps: &[f64], target: usize) -> f64 {
        let mut y = self.intercept.unwrap_or(0.0);
        for (i, a) in self.lag_coefs.iter().enumerate() {
            y += a * totals[target - 1 - i];
        }
        for (j, b) in self.exog_coefs.iter().enumerate() {
            y += b * temps[target - j];
        }
        y
    }

    fn row(&self, totals: &[f64], temps: &[f64], target: usize, out: &mut Vec<f64>) {
        fill_row(
            self.k,
            !self.exog_coefs.is_empty(),
            self.intercept.is_some(),
            totals,
            temps,
            target,
            out,
        );
    }

    /// Training residuals `p_j - p_hat_j` for `j = K..days`.
    pub fn training_residuals(&self, history: &LoadHistory) -> Result<Vec<f64>> {
        let totals = history.decompose()?.totals;
        let temps = history.daily_mean_temp();
        Ok((self.k..totals.len())
            .map(|j| totals[j] - self.predict_at(&totals, temps, j))
            .collect())
    }

    /// Coefficients in design-column order, used by the optimality checks.
    pub fn coefficient_vector(&self) -> Vec<f64> {
        let mut v = self.lag_coefs.clone();
        v.extend(&self.exog_coefs);
        v.extend(self.intercept);
        v
    }

    /// Training sum of squared errors with the given design-order coefficients.
    pub fn training_sse_with(&self, history: &LoadHistory, coefs: &[f64]) -> Result<f64> {
        let totals = history.decompose()?.totals;
        let temps = history.daily_mean_temp();
        let mut row = Vec::new();
        Ok((self.k..totals.len())
            .map(|j| {
                self.row(&totals, temps, j, &mut row);
                let r = totals[j] - linalg::dot(&row, coefs);
                r * r
            })
            .sum())
    }
}

fn fill_row(
    k: usize,
    exogenous: bool,
    intercept: bool,
    totals: &[f64],
    temps: &[f64],
    target: usize,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.extend((0..k).map(|i| totals[target - 1 - i]));
    if exogenous {
        out.extend((0..=k).map(|j| temps[target - j]));
    }
    if intercept {
        out.push(1.0);
    }
}

pub fn fit_total_arx(history: &LoadHistory, cfg: &ArxConfig) -> Result<ArxModel> {
    let totals = history.decompose()?.totals;
    fit_decomposed(history, &totals, cfg)
}

pub(super) fn fit_decomposed(
    history: &LoadHistory,
    totals: &[f64],
    cfg: &ArxConfig,
) -> Result<ArxModel> {
    if cfg.k == 0 {
        return Err(Error::InvalidParameter(
            "model order K must be at least 1".into(),
        ));
    }
    let days = totals.len();
    if days < cfg.min_days() {
        return Err(Error::InsufficientData {
            required: cfg.min_days(),
            available: days,
        });
    }
    let temps = history.daily_mean_temp();
    let mut design = Design::new(cfg.column_names());
    let mut target = Vec::with_capacity(days - cfg.k);
    let mut row = Vec::with_capacity(cfg.regressors());
    for j in cfg.k..days {
        fill_row(
            cfg.k,
            cfg.exogenous,
            cfg.intercept,
            totals,
            temps,
            j,
            &mut row,
        );
        design.push_row(&row);
        target.push(totals[j]);
    }
    let ls = linalg::solve(&design, &[target], cfg.rank_policy)?;
    let c = &ls.coefs[0];
    let lag_coefs = c[..cfg.k].to_vec();
    let exog_coefs = if cfg.exogenous {
        c[cfg.k..2 * cfg.k + 1].to_vec()
    } else {
        Vec::new()
    };
    let intercept = cfg.intercept.then(|| c[c.len() - 1]);
    Ok(ArxModel {
        k: cfg.k,
        lag_coefs,
        exog_coefs,
        intercept,
    })
}

/// Forecast from windows passed oldest-first: the last `K` totals and the
/// `K+1` daily mean temperatures ending with the forecast day.
pub fn predict_total(model: &ArxModel, totals: &[f64], temps: &[f64]) -> Result<f64> {
    let k = model.k;
    if totals.len() != k {
        return Err(Error::Contract(format!(
            "expected {k} totals in the window, got {}",
            totals.len()
        )));
    }
    // models without temperature terms ignore the temperature window
    let temps_ok = temps.len() == k + 1 || (model.exog_coefs.is_empty() && temps.is_empty());
    if !temps_ok {
        return Err(Error::Contract(format!(
            "expected {} temperatures in the window, got {}",
            k + 1,
            temps.len()
        )));
    }
    // index k is the forecast day in both windows
    Ok(model.predict_at(totals, temps, k))
}
