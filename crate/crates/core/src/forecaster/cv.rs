//! Rolling-origin selection of the model order K.
//!
//! The last `validation_fraction` of the history is cut into `folds`
//! contiguous blocks. Fold `f` trains on every day before its block and
//! scores one-step-ahead forecasts inside it with the CV error metric. An
//! order is scored by the mean over folds; the lowest score wins and ties
//! go to the smaller K. Scores closer than [`TIE_TOLERANCE`] (relative, with
//! the same absolute floor in percent) count as ties, so rounding noise
//! between equally good orders does not decide the choice.

use serde::{Deserialize, Serialize};

use super::{evaluate_range, DayAheadForecaster, Decomposed, ForecasterConfig, LoadHistory};
use crate::error::{Error, Result};

pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub validation_fraction: f64,
    /// Model settings other than the order.
    pub forecaster: ForecasterConfig,
}

impl CvConfig {
    pub fn new(forecaster: ForecasterConfig) -> Self {
        Self {
            folds: 5,
            validation_fraction: 0.3,
            forecaster,
        }
    }
}

impl Default for CvConfig {
    fn default() -> Self {
        Self::new(ForecasterConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvScore {
    pub k: usize,
    /// Mean validation CV (percent); `None` when the order was skipped.
    pub mean_cv: Option<f64>,
    /// Why the order was skipped.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub best_k: usize,
    pub scores: Vec<CvScore>,
}

impl CvOutcome {
    pub fn warnings(&self) -> impl Iterator<Item = String> + '_ {
        self.scores.iter().filter_map(|s| {
            s.skipped
                .as_ref()
                .map(|why| format!("K={} skipped: {why}", s.k))
        })
    }
}

pub fn cross_validate_order(
    history: &LoadHistory,
    candidates: &[usize],
    cfg: &CvConfig,
) -> Result<CvOutcome> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate orders".into()));
    }
    if cfg.folds == 0 {
        return Err(Error::InvalidParameter(
            "at least one fold is required".into(),
        ));
    }
    if !(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "validation fraction {} outside (0, 1)",
            cfg.validation_fraction
        )));
    }
    let n = history.len();
    let block = (n as f64 * cfg.validation_fraction).floor() as usize / cfg.folds;
    if block == 0 {
        return Err(Error::InsufficientData {
            required: (cfg.folds as f64 / cfg.validation_fraction).ceil() as usize,
            available: n,
        });
    }
    let first_origin = n - cfg.folds * block;
    let dec = history.decompose()?;

    let mut ks: Vec<usize> = candidates.to_vec();
    ks.sort_unstable();
    ks.dedup();

    let mut scores = Vec::with_capacity(ks.len());
    for &k in &ks {
        let need = cfg.forecaster.min_days(k);
        if k == 0 {
            scores.push(skip(k, "order must be at least 1".into()));
            continue;
        }
        if first_origin < need {
            scores.push(skip(
                k,
                format!("needs {need} training days, first fold has {first_origin}"),
            ));
            continue;
        }
        match score_order(history, &dec, k, cfg, first_origin, block) {
            Ok(v) => scores.push(CvScore {
                k,
                mean_cv: Some(v),
                skipped: None,
            }),
            Err(e) => scores.push(skip(k, e.to_string())),
        }
    }

    let mut best: Option<(usize, f64)> = None;
    for s in &scores {
        if let Some(v) = s.mean_cv {
            if best.is_none_or(|(_, b)| v < b - TIE_TOLERANCE * b.abs().max(1.0)) {
                best = Some((s.k, v));
            }
        }
    }
    match best {
        Some((best_k, _)) => Ok(CvOutcome { best_k, scores }),
        None => Err(Error::InsufficientData {
            required: cfg.forecaster.min_days(ks[0]) + cfg.folds * block,
            available: n,
        }),
    }
}

fn skip(k: usize, why: String) -> CvScore {
    CvScore {
        k,
        mean_cv: None,
        skipped: Some(why),
    }
}

fn score_order(
    history: &LoadHistory,
    dec: &Decomposed,
    k: usize,
    cfg: &CvConfig,
    first_origin: usize,
    block: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for f in 0..cfg.folds {
        let origin = first_origin + f * block;
        let train = history.prefix(origin);
        let train_dec = Decomposed {
            totals: dec.totals[..origin].to_vec(),
            shapes: dec.shapes[..origin].to_vec(),
        };
        let model = DayAheadForecaster::fit_decomposed(&train, &train_dec, k, &cfg.forecaster)?;
        total += evaluate_range(&model, history, dec, origin, origin + block)?.cv()?;
    }
    Ok(total / cfg.folds as f64)
}
