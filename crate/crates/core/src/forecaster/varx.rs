//! Vector ARX model for the daily shape:
//! `u_{d+1} = sum_k C_k u_k + sum_r h_r t_r` with 24x24 coefficient matrices
//! and hourly temperature vectors `t_r`.
//!
//! Each output hour is its own least-squares regression on the shared design,
//! so one factorization serves all 24 rows. There is no separate intercept:
//! every shape sums to one, which makes a constant column a linear
//! combination of the lagged-shape columns.

use serde::{Deserialize, Serialize};

use super::arx::{exog_name, lag_name};
use super::{Hourly, LoadHistory, ShapeDay, HOURS};
use crate::error::{Error, Result};
use crate::linalg::{self, Design, RankPolicy};

pub type Matrix24 = [[f64; HOURS]; HOURS];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarxConfig {
    pub k: usize,
    pub exogenous: bool,
    pub rank_policy: RankPolicy,
}

impl VarxConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            exogenous: true,
            rank_policy: RankPolicy::DropCollinear,
        }
    }

    pub fn regressors(&self) -> usize {
        HOURS * (self.k + if self.exogenous { self.k + 1 } else { 0 })
    }

    /// Twice the per-row regressor count.
    pub fn min_days(&self) -> usize {
        2 * self.regressors()
    }

    fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.regressors());
        for i in 0..self.k {
            let base = lag_name("u", i);
            names.extend((0..HOURS).map(|h| format!("{base}[{h}]")));
        }
        if self.exogenous {
            for j in 0..=self.k {
                let base = exog_name("T", j);
                names.extend((0..HOURS).map(|h| format!("{base}[{h}]")));
            }
        }
        names
    }
}

/// Fitted shape model. `lag_mats[i]` multiplies the shape `i+1` days before
/// the forecast day; `exog_mats[j]` the hourly temperatures `j` days before
/// it. Row `h` of each matrix produces output hour `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarxModel {
    pub k: usize,
    pub lag_mats: Vec<Matrix24>,
    pub exog_mats: Vec<Matrix24>,
    /// Design columns judged collinear and fixed at zero.
    pub dropped_columns: Vec<String>,
}

impl VarxModel {
    pub(crate) fn predict_raw_at(
        &self,
        shapes: &[Hourly],
        temps: &[Hourly],
        target: usize,
    ) -> Hourly {
        let mut out = [0.0; HOURS];
        for (i, m) in self.lag_mats.iter().enumerate() {
            mat_vec_acc(m, &shapes[target - 1 - i], &mut out);
        }
        for (j, m) in self.exog_mats.iter().enumerate() {
            mat_vec_acc(m, &temps[target - j], &mut out);
        }
        out
    }
}

fn mat_vec_acc(m: &Matrix24, v: &Hourly, out: &mut Hourly) {
    for (o, row) in out.iter_mut().zip(m) {
        *o += linalg::dot(row, v);
    }
}

pub fn fit_shape_varx(history: &LoadHistory, cfg: &VarxConfig) -> Result<VarxModel> {
    let shapes = history.decompose()?.shapes;
    fit_decomposed(history, &shapes, cfg)
}

pub(super) fn fit_decomposed(
    history: &LoadHistory,
    shapes: &[Hourly],
    cfg: &VarxConfig,
) -> Result<VarxModel> {
    if cfg.k == 0 {
        return Err(Error::InvalidParameter(
            "model order K must be at least 1".into(),
        ));
    }
    let days = shapes.len();
    if days < cfg.min_days() {
        return Err(Error::InsufficientData {
            required: cfg.min_days(),
            available: days,
        });
    }
    let temps = history.hourly_temp();
    let names = cfg.column_names();
    let mut design = Design::new(names.clone());
    let mut targets: Vec<Vec<f64>> = (0..HOURS)
        .map(|_| Vec::with_capacity(days - cfg.k))
        .collect();
    let mut row = Vec::with_capacity(cfg.regressors());
    for j in cfg.k..days {
        row.clear();
        for i in 0..cfg.k {
            row.extend_from_slice(&shapes[j - 1 - i]);
        }
        if cfg.exogenous {
            for jj in 0..=cfg.k {
                row.extend_from_slice(&temps[j - jj]);
            }
        }
        design.push_row(&row);
        for (h, t) in targets.iter_mut().enumerate() {
            t.push(shapes[j][h]);
        }
    }
    let ls = linalg::solve(&design, &targets, cfg.rank_policy)?;

    let block = |b: usize| -> Matrix24 {
        let mut m = [[0.0; HOURS]; HOURS];
        for (h, row) in m.iter_mut().enumerate() {
            row.copy_from_slice(&ls.coefs[h][b * HOURS..(b + 1) * HOURS]);
        }
        m
    };
    let lag_mats = (0..cfg.k).map(block).collect();
    let exog_mats = if cfg.exogenous {
        (0..=cfg.k).map(|j| block(cfg.k + j)).collect()
    } else {
        Vec::new()
    };
    Ok(VarxModel {
        k: cfg.k,
        lag_mats,
        exog_mats,
        dropped_columns: ls.dropped.iter().map(|&c| names[c].clone()).collect(),
    })
}

/// Shape forecast from windows passed oldest-first: the last `K` shapes and
/// the `K+1` hourly temperature vectors ending with the forecast day. The
/// raw linear prediction is clamped at zero and renormalized.
pub fn predict_shape(model: &VarxModel, shapes: &[ShapeDay], temps: &[Hourly]) -> Result<ShapeDay> {
    let k = model.k;
    if shapes.len() != k {
        return Err(Error::Contract(format!(
            "expected {k} shapes in the window, got {}",
            shapes.len()
        )));
    }
    let temps_ok = temps.len() == k + 1 || (model.exog_mats.is_empty() && temps.is_empty());
    if !temps_ok {
        return Err(Error::Contract(format!(
            "expected {} hourly temperature vectors, got {}",
            k + 1,
            temps.len()
        )));
    }
    let s: Vec<Hourly> = shapes.iter().map(|u| *u.weights()).collect();
    Ok(ShapeDay::from_raw(&model.predict_raw_at(&s, temps, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecaster::DailyProfile;

    fn flat_history(days: usize) -> LoadHistory {
        let d = (0..days)
            .map(|i| DailyProfile::new(i, [1.0 + (i % 3) as f64; HOURS]).unwrap())
            .collect();
        LoadHistory::new(d, vec![[12.0; HOURS]; days]).unwrap()
    }

    #[test]
    fn constant_shape_without_exog() {
        let h = flat_history(60);
        let cfg = VarxConfig {
            k: 1,
            exogenous: false,
            rank_policy: RankPolicy::DropCollinear,
        };
        let m = fit_shape_varx(&h, &cfg).unwrap();
        assert_eq!(m.dropped_columns.len(), HOURS - 1);
        let u = predict_shape(&m, &[ShapeDay::uniform()], &[]).unwrap();
        for w in u.weights() {
            assert!((w - 1.0 / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_shape_is_singular_under_strict_policy() {
        let h = flat_history(60);
        let cfg = VarxConfig {
            k: 1,
            exogenous: false,
            rank_policy: RankPolicy::Strict,
        };
        assert!(matches!(
            fit_shape_varx(&h, &cfg),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn forced_negative_prediction_is_projected() {
        let mut c = [[0.0; HOURS]; HOURS];
        for (h, row) in c.iter_mut().enumerate() {
            row[h] = if h < 12 { -3.0 } else { 1.0 };
        }
        let m = VarxModel {
            k: 1,
            lag_mats: vec![c],
            exog_mats: vec![],
            dropped_columns: vec![],
        };
        let u = predict_shape(&m, &[ShapeDay::uniform()], &[]).unwrap();
        assert!(u.weights()[..12].iter().all(|&w| w == 0.0));
        assert!((u.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_length_checks() {
        let m = VarxModel {
            k: 2,
            lag_mats: vec![[[0.0; HOURS]; HOURS]; 2],
            exog_mats: vec![[[0.0; HOURS]; HOURS]; 3],
            dropped_columns: vec![],
        };
        assert!(predict_shape(&m, &[ShapeDay::uniform()], &[[0.0; HOURS]; 3]).is_err());
        assert!(predict_shape(&m, &[ShapeDay::uniform(); 2], &[[0.0; HOURS]; 2]).is_err());
    }
}
