//! Day-ahead load forecaster.
//!
//! A day's 24 hourly loads `x_d` are split into the daily total `p_d` and the
//! normalized shape `u_d = x_d / p_d`. The next total is forecast by a scalar
//! ARX model on past totals and daily mean temperatures, the next shape by a
//! vector ARX model on past shapes and hourly temperatures, and the forecast
//! profile is their product.
//!
//! Lag orientation: windows are always passed oldest-first; coefficient
//! vectors are stored most-recent-first, so `lag_coefs[0]` multiplies day `d`
//! and `exog_coefs[0]` multiplies the temperature of the forecast day `d+1`.

mod arx;
mod cv;
mod varx;

pub use arx::{fit_total_arx, predict_total, ArxConfig, ArxModel};
pub use cv::{cross_validate_order, CvConfig, CvOutcome, CvScore, TIE_TOLERANCE};
pub use varx::{fit_shape_varx, predict_shape, VarxConfig, VarxModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RankPolicy;
use crate::scaling;

pub const HOURS: usize = 24;
pub type Hourly = [f64; HOURS];

/// Tag written into saved models describing coefficient order.
pub const LAG_ORIENTATION: &str = "most_recent_first";

/// One day of hourly consumption (kWh per hour).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyProfile {
    pub day: usize,
    hours: Hourly,
}

impl DailyProfile {
    pub fn new(day: usize, hours: Hourly) -> Result<Self> {
        if let Some(h) = hours.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain(format!(
                "day {day} hour {h}: load {} must be finite and non-negative",
                hours[h]
            )));
        }
        Ok(Self { day, hours })
    }

    pub fn hours(&self) -> &Hourly {
        &self.hours
    }

    pub fn total(&self) -> f64 {
        self.hours.iter().sum()
    }
}

/// Non-negative hourly weights summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeDay(Hourly);

impl ShapeDay {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(weights: Hourly) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0))
            || (sum - 1.0).abs() > Self::SUM_TOLERANCE
        {
            return Err(Error::Domain(format!(
                "shape weights must be non-negative and sum to 1 (sum {sum})"
            )));
        }
        Ok(Self(weights))
    }

    pub fn uniform() -> Self {
        Self([1.0 / HOURS as f64; HOURS])
    }

    /// Projects a raw prediction onto the simplex: negatives clamp to zero and
    /// the rest is renormalized. A prediction with no positive mass becomes
    /// the uniform shape.
    pub fn from_raw(raw: &Hourly) -> Self {
        let mut w = [0.0; HOURS];
        for (o, &r) in w.iter_mut().zip(raw) {
            *o = if r.is_finite() { r.max(0.0) } else { 0.0 };
        }
        let sum: f64 = w.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Self::uniform();
        }
        for o in &mut w {
            *o /= sum;
        }
        Self(w)
    }

    pub fn weights(&self) -> &Hourly {
        &self.0
    }
}

/// Splits a day into its total and its normalized shape.
pub fn decompose_day(x: &DailyProfile) -> Result<(f64, ShapeDay)> {
    let p = x.total();
    if p <= 0.0 {
        return Err(Error::Degenerate(format!(
            "day {} has no consumption",
            x.day
        )));
    }
    let mut u = [0.0; HOURS];
    for (o, v) in u.iter_mut().zip(x.hours()) {
        *o = v / p;
    }
    Ok((p, ShapeDay(u)))
}

/// Consumption history with aligned temperatures. The temperature series
/// may run one day past the last consumption day; that extra day is the
/// forecast day's temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadHistory {
    days: Vec<DailyProfile>,
    daily_mean_temp: Vec<f64>,
    hourly_temp: Vec<Hourly>,
}

impl LoadHistory {
    /// Daily mean temperatures are the means of the hourly temperatures.
    pub fn new(days: Vec<DailyProfile>, hourly_temp: Vec<Hourly>) -> Result<Self> {
        let daily = hourly_temp
            .iter()
            .map(|t| t.iter().sum::<f64>() / HOURS as f64)
            .collect();
        Self::with_daily_temps(days, daily, hourly_temp)
    }

    pub fn with_daily_temps(
        days: Vec<DailyProfile>,
        daily_mean_temp: Vec<f64>,
        hourly_temp: Vec<Hourly>,
    ) -> Result<Self> {
        if daily_mean_temp.len() != hourly_temp.len() {
            return Err(Error::Contract(format!(
                "{} daily temperatures but {} hourly temperature days",
                daily_mean_temp.len(),
                hourly_temp.len()
            )));
        }
        let n = days.len();
        if hourly_temp.len() != n && hourly_temp.len() != n + 1 {
            return Err(Error::Contract(format!(
                "temperature series must cover {n} or {} days, got {}",
                n + 1,
                hourly_temp.len()
            )));
        }
        let finite = daily_mean_temp.iter().all(|t| t.is_finite())
            && hourly_temp.iter().flatten().all(|t| t.is_finite());
        if !finite {
            return Err(Error::Domain("temperatures must be finite".into()));
        }
        Ok(Self {
            days,
            daily_mean_temp,
            hourly_temp,
        })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn days(&self) -> &[DailyProfile] {
        &self.days
    }

    pub fn daily_mean_temp(&self) -> &[f64] {
        &self.daily_mean_temp
    }

    pub fn hourly_temp(&self) -> &[Hourly] {
        &self.hourly_temp
    }

    pub fn has_next_day_temp(&self) -> bool {
        self.hourly_temp.len() == self.days.len() + 1
    }

    /// The first `n` days, keeping the temperature of day `n` when known.
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.days.len());
        let t = (n + 1).min(self.hourly_temp.len());
        Self {
            days: self.days[..n].to_vec(),
            daily_mean_temp: self.daily_mean_temp[..t].to_vec(),
            hourly_temp: self.hourly_temp[..t].to_vec(),
        }
    }

    /// Appends a forecast-day temperature to a history that lacks one.
    pub fn with_next_day_temp(mut self, hourly: Hourly) -> Result<Self> {
        if self.has_next_day_temp() {
            return Err(Error::Contract(
                "history already has a next-day temperature".into(),
            ));
        }
        if hourly.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("temperatures must be finite".into()));
        }
        self.daily_mean_temp
            .push(hourly.iter().sum::<f64>() / HOURS as f64);
        self.hourly_temp.push(hourly);
        Ok(self)
    }

    pub fn decompose(&self) -> Result<Decomposed> {
        let mut totals = Vec::with_capacity(self.days.len());
        let mut shapes = Vec::with_capacity(self.days.len());
        for d in &self.days {
            let (p, u) = decompose_day(d)?;
            totals.push(p);
            shapes.push(u.0);
        }
        Ok(Decomposed { totals, shapes })
    }
}

/// Totals and shapes of every day in a history.
#[derive(Debug, Clone)]
pub struct Decomposed {
    pub totals: Vec<f64>,
    pub shapes: Vec<Hourly>,
}

/// How the model order K is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderSelection {
    Fixed(usize),
    CrossValidated {
        candidates: Vec<usize>,
        folds: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecasterConfig {
    pub order: OrderSelection,
    /// Intercept in the total-power model.
    pub intercept: bool,
    /// Temperature inputs in both models.
    pub exogenous: bool,
    pub total_rank_policy: RankPolicy,
    pub shape_rank_policy: RankPolicy,
}

impl Default for ForecasterConfig {
    fn default() -> Self {
        Self {
            order: OrderSelection::Fixed(1),
            intercept: true,
            exogenous: true,
            total_rank_policy: RankPolicy::Strict,
            shape_rank_policy: RankPolicy::DropCollinear,
        }
    }
}

impl ForecasterConfig {
    pub fn arx(&self, k: usize) -> ArxConfig {
        ArxConfig {
            k,
            intercept: self.intercept,
            exogenous: self.exogenous,
            rank_policy: self.total_rank_policy,
        }
    }

    pub fn varx(&self, k: usize) -> VarxConfig {
        VarxConfig {
            k,
            exogenous: self.exogenous,
            rank_policy: self.shape_rank_policy,
        }
    }

    /// Days of history both models need at order `k`.
    pub fn min_days(&self, k: usize) -> usize {
        self.arx(k).min_days().max(self.varx(k).min_days())
    }
}

/// Fitted pair of total and shape models sharing one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayAheadForecaster {
    pub k: usize,
    pub lag_orientation: String,
    pub total: ArxModel,
    pub shape: VarxModel,
}

/// Forecast for the day after a history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayAheadForecast {
    /// Output of the total-power model, unclamped.
    pub total: f64,
    pub shape: ShapeDay,
    /// `max(total, 0) * shape`.
    pub profile: DailyProfile,
}

impl DayAheadForecaster {
    /// Fits both models at order `k`.
    pub fn fit_order(history: &LoadHistory, k: usize, cfg: &ForecasterConfig) -> Result<Self> {
        let dec = history.decompose()?;
        Self::fit_decomposed(history, &dec, k, cfg)
    }

    /// Fits both models, choosing K as configured.
    pub fn fit(history: &LoadHistory, cfg: &ForecasterConfig) -> Result<Self> {
        let k = match &cfg.order {
            OrderSelection::Fixed(k) => *k,
            OrderSelection::CrossValidated { candidates, folds } => {
                let cv_cfg = CvConfig {
                    folds: *folds,
                    ..CvConfig::new(cfg.clone())
                };
                cross_validate_order(history, candidates, &cv_cfg)?.best_k
            }
        };
        Self::fit_order(history, k, cfg)
    }

    pub(crate) fn fit_decomposed(
        history: &LoadHistory,
        dec: &Decomposed,
        k: usize,
        cfg: &ForecasterConfig,
    ) -> Result<Self> {
        let total = arx::fit_decomposed(history, &dec.totals, &cfg.arx(k))?;
        let shape = varx::fit_decomposed(history, &dec.shapes, &cfg.varx(k))?;
        Ok(Self {
            k,
            lag_orientation: LAG_ORIENTATION.to_string(),
            total,
            shape,
        })
    }

    /// Forecast of day `target` from the days before it, using `history`'s
    /// decomposition and the temperatures up to and including `target`.
    pub(crate) fn forecast_index(
        &self,
        history: &LoadHistory,
        dec: &Decomposed,
        target: usize,
    ) -> Result<DayAheadForecast> {
        let k = self.k;
        if target < k || target > dec.totals.len() || target >= history.hourly_temp.len() {
            return Err(Error::Contract(format!(
                "cannot forecast day {target}: need {k} earlier days and its temperature"
            )));
        }
        let total = self
            .total
            .predict_at(&dec.totals, &history.daily_mean_temp, target);
        let shape = ShapeDay::from_raw(&self.shape.predict_raw_at(
            &dec.shapes,
            &history.hourly_temp,
            target,
        ));
        let scale = total.max(0.0);
        let mut hours = [0.0; HOURS];
        for (o, w) in hours.iter_mut().zip(shape.weights()) {
            *o = scale * w;
        }
        Ok(DayAheadForecast {
            total,
            shape,
            profile: DailyProfile::new(target, hours)?,
        })
    }

    /// One-step-ahead forecasts of days `k..n` of `history` with the model
    /// held fixed.
    pub fn in_sample(&self, history: &LoadHistory) -> Result<Backtest> {
        let dec = history.decompose()?;
        evaluate_range(self, history, &dec, self.k, history.len())
    }

    /// Forecast for the day after the last day of `history`.
    pub fn forecast_next(&self, history: &LoadHistory) -> Result<DayAheadForecast> {
        if !history.has_next_day_temp() {
            return Err(Error::Contract(
                "history has no temperature for the forecast day".into(),
            ));
        }
        let dec = history.decompose()?;
        self.forecast_index(history, &dec, history.len())
    }
}

/// `x_{d+1} = p_{d+1} * u_{d+1}` from separately fitted models.
pub fn forecast_day(
    total: &ArxModel,
    shape: &VarxModel,
    history: &LoadHistory,
) -> Result<DayAheadForecast> {
    if total.k != shape.k {
        return Err(Error::Contract(format!(
            "total model has K={} but shape model has K={}",
            total.k, shape.k
        )));
    }
    DayAheadForecaster {
        k: total.k,
        lag_orientation: LAG_ORIENTATION.to_string(),
        total: total.clone(),
        shape: shape.clone(),
    }
    .forecast_next(history)
}

/// One-step-ahead out-of-sample evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Backtest {
    pub k: usize,
    /// Index of the first evaluated day.
    pub first_day: usize,
    /// Hourly actual loads over the evaluation days, day-major.
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
}

impl Backtest {
    pub fn residuals(&self) -> Vec<f64> {
        self.actual
            .iter()
            .zip(&self.predicted)
            .map(|(a, p)| a - p)
            .collect()
    }

    /// Coefficient of variation of the error, percent.
    pub fn cv(&self) -> Result<f64> {
        scaling::cv(&self.actual, &self.predicted)
    }

    /// Mean hourly load over the evaluation window.
    pub fn mean_load(&self) -> f64 {
        self.actual.iter().sum::<f64>() / self.actual.len() as f64
    }
}

/// Fits on the first `train_days` days, then forecasts each later day from
/// the true history before it with the model held fixed.
pub fn backtest(
    history: &LoadHistory,
    train_days: usize,
    cfg: &ForecasterConfig,
) -> Result<Backtest> {
    if train_days >= history.len() {
        return Err(Error::InsufficientData {
            required: train_days + 1,
            available: history.len(),
        });
    }
    let dec = history.decompose()?;
    let train = history.prefix(train_days);
    let model = match &cfg.order {
        OrderSelection::Fixed(k) => {
            let train_dec = Decomposed {
                totals: dec.totals[..train_days].to_vec(),
                shapes: dec.shapes[..train_days].to_vec(),
            };
            DayAheadForecaster::fit_decomposed(&train, &train_dec, *k, cfg)?
        }
        OrderSelection::CrossValidated { .. } => DayAheadForecaster::fit(&train, cfg)?,
    };
    evaluate_range(&model, history, &dec, train_days, history.len())
}

pub(crate) fn evaluate_range(
    model: &DayAheadForecaster,
    history: &LoadHistory,
    dec: &Decomposed,
    from: usize,
    to: usize,
) -> Result<Backtest> {
    let mut actual = Vec::with_capacity((to - from) * HOURS);
    let mut predicted = Vec::with_capacity((to - from) * HOURS);
    for j in from..to {
        let f = model.forecast_index(history, dec, j)?;
        actual.extend_from_slice(history.days[j].hours());
        predicted.extend_from_slice(f.profile.hours());
    }
    Ok(Backtest {
        k: model.k,
        first_day: from,
        actual,
        predicted,
    })
}
