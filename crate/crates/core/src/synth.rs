//! Seeded synthetic customer populations.
//!
//! Every customer shares one temperature record. Customer `i` has a size
//! `s_i` (mean hourly load, kWh) drawn from a generalized Pareto
//! distribution, and its load in day `d`, hour `h` is
//!
//! ```text
//! x = s_i * (base[h] + beta * (T_dh - T_mean) + c_dh + n_idh),  clamped at 0
//! ```
//!
//! where `base` has mean one, `c_dh` is an hourly shock shared by every
//! customer and `n_idh` is the customer's own noise. Both noise terms have
//! constant variance across hours and may follow an AR(1) in hour order.
//! Each customer, the shared shock and the weather draw from separate
//! streams, so the output does not depend on generation order.

use std::f64::consts::PI;

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecaster::{DailyProfile, Hourly, LoadHistory, HOURS};
use crate::rng;
use crate::tailmodel::{self, GpdParams};

const STREAM_WEATHER: u64 = 1;
const STREAM_COMMON: u64 = 2;
const STREAM_SIZES: u64 = 3;
const STREAM_CUSTOMER: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// Centered unit exponential, `Exp(1) - 1`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Standard deviation relative to the customer size.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureModel {
    pub mean_c: f64,
    pub seasonal_amplitude_c: f64,
    pub period_days: f64,
    /// Day of the seasonal maximum.
    pub peak_day: f64,
    pub diurnal_amplitude_c: f64,
    /// Hour of the diurnal maximum.
    pub peak_hour: f64,
    /// Day-to-day weather noise, applied to whole days.
    pub daily_sd_c: f64,
    /// Independent hour-level noise.
    pub hourly_sd_c: f64,
}

impl Default for TemperatureModel {
    fn default() -> Self {
        Self {
            mean_c: 16.0,
            seasonal_amplitude_c: 7.0,
            period_days: 365.0,
            peak_day: 200.0,
            diurnal_amplitude_c: 5.0,
            peak_hour: 15.0,
            daily_sd_c: 2.5,
            hourly_sd_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_customers: usize,
    pub n_days: usize,
    pub start_date: NaiveDate,
    /// Relative hourly pattern; rescaled to mean one.
    pub base_shape: Vec<f64>,
    pub temperature: TemperatureModel,
    /// Load change per degree of deviation from the mean temperature,
    /// relative to the customer size.
    pub temp_sensitivity: f64,
    pub noise: NoiseModel,
    /// Standard deviation of the shared hourly shock relative to size.
    pub common_noise_scale: f64,
    /// AR(1) coefficient of both noise terms in hour order (0 = white).
    pub noise_ar1: f64,
    pub customer_size: GpdParams,
    pub seed: u64,
}

/// A typical residential double-peak day.
pub const DEFAULT_BASE_SHAPE: [f64; HOURS] = [
    0.70, 0.64, 0.61, 0.60, 0.62, 0.70, 0.88, 1.05, 1.02, 0.94, 0.90, 0.90, 0.92, 0.93, 0.95, 1.00,
    1.12, 1.32, 1.52, 1.58, 1.50, 1.35, 1.10, 0.85,
];

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_customers: 2000,
            n_days: 600,
            start_date: NaiveDate::from_ymd_opt(2013, 1, 1).expect("valid date"),
            base_shape: DEFAULT_BASE_SHAPE.to_vec(),
            temperature: TemperatureModel::default(),
            temp_sensitivity: 0.01,
            noise: NoiseModel {
                kind: NoiseKind::Gaussian,
                scale: 0.15,
            },
            common_noise_scale: 0.03,
            noise_ar1: 0.0,
            customer_size: GpdParams {
                kappa: 0.1,
                sigma: 0.35,
                theta: 0.5,
            },
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_customers == 0 {
            return Err(Error::Config("n_customers must be at least 1".into()));
        }
        if self.n_days < 30 {
            return Err(Error::Config(format!(
                "n_days must be at least 30, got {}",
                self.n_days
            )));
        }
        if self.base_shape.len() != HOURS {
            return Err(Error::Config(format!(
                "base_shape needs {HOURS} entries, got {}",
                self.base_shape.len()
            )));
        }
        if self
            .base_shape
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::Config(
                "base_shape entries must be non-negative".into(),
            ));
        }
        if self.base_shape.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config("base_shape is all zero".into()));
        }
        if !(self.noise.scale >= 0.0 && self.common_noise_scale >= 0.0) {
            return Err(Error::Config("noise scales must be non-negative".into()));
        }
        if !(self.noise_ar1 > -1.0 && self.noise_ar1 < 1.0) {
            return Err(Error::Config("noise_ar1 must lie in (-1, 1)".into()));
        }
        if !(self.temperature.period_days > 0.0) {
            return Err(Error::Config("temperature period must be positive".into()));
        }
        self.customer_size
            .validate()
            .map_err(|e| Error::Config(format!("customer_size: {e}")))?;
        Ok(())
    }

    fn normalized_base(&self) -> Hourly {
        let mean = self.base_shape.iter().sum::<f64>() / HOURS as f64;
        let mut b = [0.0; HOURS];
        for (o, v) in b.iter_mut().zip(&self.base_shape) {
            *o = v / mean;
        }
        b
    }
}

/// Customers sharing one temperature record.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub start_date: NaiveDate,
    hourly_temp: Vec<Hourly>,
    /// `customers[i][d]` is customer `i`'s load on day `d`.
    customers: Vec<Vec<Hourly>>,
    sizes: Option<Vec<f64>>,
}

impl Population {
    pub fn new(
        start_date: NaiveDate,
        hourly_temp: Vec<Hourly>,
        customers: Vec<Vec<Hourly>>,
    ) -> Result<Self> {
        if customers.is_empty() {
            return Err(Error::InsufficientData {
                required: 1,
                available: 0,
            });
        }
        let n_days = customers[0].len();
        if customers.iter().any(|c| c.len() != n_days) {
            return Err(Error::Contract(
                "customers cover different numbers of days".into(),
            ));
        }
        if hourly_temp.len() != n_days {
            return Err(Error::Contract(format!(
                "temperature covers {} days, loads cover {n_days}",
                hourly_temp.len()
            )));
        }
        Ok(Self {
            start_date,
            hourly_temp,
            customers,
            sizes: None,
        })
    }

    /// Builds a population from per-customer histories. Temperatures are
    /// taken from the first history; all histories must cover the same days.
    pub fn from_histories(start_date: NaiveDate, histories: &[LoadHistory]) -> Result<Self> {
        let first = histories.first().ok_or(Error::InsufficientData {
            required: 1,
            available: 0,
        })?;
        let n = first.len();
        let temps = first.hourly_temp()[..n].to_vec();
        let customers = histories
            .iter()
            .map(|h| h.days().iter().map(|d| *d.hours()).collect())
            .collect();
        Self::new(start_date, temps, customers)
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len()
    }

    pub fn n_days(&self) -> usize {
        self.hourly_temp.len()
    }

    pub fn hourly_temp(&self) -> &[Hourly] {
        &self.hourly_temp
    }

    /// Drawn customer sizes, for generated populations.
    pub fn sizes(&self) -> Option<&[f64]> {
        self.sizes.as_deref()
    }

    pub fn customer_loads(&self, i: usize) -> &[Hourly] {
        &self.customers[i]
    }

    pub fn customer(&self, i: usize) -> Result<LoadHistory> {
        self.aggregate(&[i])
    }

    /// Hour-by-hour sum of the listed customers, summed in the given order.
    pub fn aggregate(&self, members: &[usize]) -> Result<LoadHistory> {
        if let Some(&bad) = members.iter().find(|&&i| i >= self.customers.len()) {
            return Err(Error::NotFound(format!("customer {bad}")));
        }
        let days = (0..self.n_days())
            .map(|d| {
                let mut h = [0.0; HOURS];
                for &i in members {
                    for (o, v) in h.iter_mut().zip(&self.customers[i][d]) {
                        *o += v;
                    }
                }
                DailyProfile::new(d, h)
            })
            .collect::<Result<Vec<_>>>()?;
        LoadHistory::new(days, self.hourly_temp.clone())
    }
}

fn temperature_series(cfg: &SynthConfig) -> Vec<Hourly> {
    let t = &cfg.temperature;
    let mut rng = rng::stream(cfg.seed, &[STREAM_WEATHER]);
    (0..cfg.n_days)
        .map(|d| {
            let seasonal =
                t.seasonal_amplitude_c * (2.0 * PI * (d as f64 - t.peak_day) / t.period_days).cos();
            let daily: f64 = t.daily_sd_c * rng.sample::<f64, _>(StandardNormal);
            let mut out = [0.0; HOURS];
            for (h, o) in out.iter_mut().enumerate() {
                let diurnal =
                    t.diurnal_amplitude_c * (2.0 * PI * (h as f64 - t.peak_hour) / 24.0).cos();
                let hourly: f64 = t.hourly_sd_c * rng.sample::<f64, _>(StandardNormal);
                *o = t.mean_c + seasonal + diurnal + daily + hourly;
            }
            out
        })
        .collect()
}

/// Zero-mean unit-variance AR(1) sequence of length `n`.
fn noise_sequence<R: Rng>(rng: &mut R, kind: NoiseKind, ar1: f64, n: usize) -> Vec<f64> {
    let innov_scale = (1.0 - ar1 * ar1).sqrt();
    let draw = |rng: &mut R| -> f64 {
        match kind {
            NoiseKind::Gaussian => rng.sample(StandardNormal),
            NoiseKind::Exponential => rng.sample::<f64, _>(Exp1) - 1.0,
        }
    };
    let mut out = Vec::with_capacity(n);
    let mut prev = draw(rng);
    out.push(prev);
    for _ in 1..n {
        prev = ar1 * prev + innov_scale * draw(rng);
        out.push(prev);
    }
    out
}

pub fn synth_population(cfg: &SynthConfig) -> Result<Population> {
    cfg.validate()?;
    let temps = temperature_series(cfg);
    let base = cfg.normalized_base();
    let hours = cfg.n_days * HOURS;

    let common = noise_sequence(
        &mut rng::stream(cfg.seed, &[STREAM_COMMON]),
        NoiseKind::Gaussian,
        cfg.noise_ar1,
        hours,
    );
    let sizes = tailmodel::sample_with(
        &cfg.customer_size,
        cfg.n_customers,
        &mut rng::stream(cfg.seed, &[STREAM_SIZES]),
    );

    // deterministic part per day-hour, shared by all customers
    let mut shared = vec![0.0; hours];
    for d in 0..cfg.n_days {
        for h in 0..HOURS {
            let dev = temps[d][h] - cfg.temperature.mean_c;
            shared[d * HOURS + h] = base[h]
                + cfg.temp_sensitivity * dev
                + cfg.common_noise_scale * common[d * HOURS + h];
        }
    }

    let customers: Vec<Vec<Hourly>> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &size)| {
            let mut rng = rng::stream(cfg.seed, &[STREAM_CUSTOMER, i as u64]);
            let own = noise_sequence(&mut rng, cfg.noise.kind, cfg.noise_ar1, hours);
            (0..cfg.n_days)
                .map(|d| {
                    let mut day = [0.0; HOURS];
                    for (h, o) in day.iter_mut().enumerate() {
                        let k = d * HOURS + h;
                        *o = (size * (shared[k] + cfg.noise.scale * own[k])).max(0.0);
                    }
                    day
                })
                .collect()
        })
        .collect();

    let mut pop = Population::new(cfg.start_date, temps, customers)?;
    pop.sizes = Some(sizes);
    Ok(pop)
}
