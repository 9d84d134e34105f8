#![allow(dead_code)]

pub mod trees;

use std::f64::consts::PI;

use feeder_stats::forecaster::{ArxModel, DailyProfile, Hourly, LoadHistory, VarxModel, HOURS};
use feeder_stats::rng;
use feeder_stats::scaling::{eval_scaling, ScalingLaw};
use feeder_stats::synth::DEFAULT_BASE_SHAPE;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn base_shape() -> Hourly {
    let s: f64 = DEFAULT_BASE_SHAPE.iter().sum();
    DEFAULT_BASE_SHAPE.map(|v| v / s)
}

/// Planted total-load model: `a` lag coefficients most recent first,
/// `b` temperature coefficients forecast day first, intercept `c`.
#[derive(Debug, Clone)]
pub struct PlantedArx {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
    pub weather_sd: f64,
}

impl PlantedArx {
    pub fn k2() -> Self {
        Self {
            a: vec![0.5, 0.3],
            b: vec![0.1, 0.05, 0.02],
            c: 0.0,
            weather_sd: 6.0,
        }
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }
}

/// Daily mean temperatures with a seasonal cycle and weather noise of the
/// given standard deviation.
pub fn daily_temps(n: usize, weather_sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, &[101]);
    (0..n)
        .map(|d| 15.0 + 8.0 * (2.0 * PI * d as f64 / 365.0).sin() + weather_sd * normal(&mut rng))
        .collect()
}

pub struct PlantedData {
    pub history: LoadHistory,
    pub totals: Vec<f64>,
    pub temps: Vec<f64>,
}

/// Totals from the planted ARX with innovation noise of
/// `noise_frac * mean level`, spread over a fixed daily shape. Hourly
/// temperatures equal the daily mean. Optional multiplicative hourly
/// noise perturbs the shape.
pub fn planted_arx_history(
    m: &PlantedArx,
    n: usize,
    noise_frac: f64,
    shape_noise: f64,
    seed: u64,
) -> PlantedData {
    let k = m.a.len();
    let temps = daily_temps(n, m.weather_sd, seed);
    let mut rng = rng::stream(seed, &[102]);
    let level = {
        let tm = 15.0;
        (m.c + tm * m.b.iter().sum::<f64>()) / (1.0 - m.a.iter().sum::<f64>())
    };
    let sd = noise_frac * level;
    let burn = 200;
    let mut p = vec![level; k];
    let mut t_ext = vec![15.0; burn];
    t_ext.extend_from_slice(&temps);
    for j in k..burn + n {
        let mut v = m.c + sd * normal(&mut rng);
        for (i, a) in m.a.iter().enumerate() {
            v += a * p[j - 1 - i];
        }
        for (r, b) in m.b.iter().enumerate() {
            if j >= r {
                v += b * t_ext[j - r];
            }
        }
        p.push(v);
    }
    let totals = p[burn..].to_vec();
    let u = base_shape();
    let days = totals
        .iter()
        .enumerate()
        .map(|(d, &p)| {
            let mut h = [0.0; HOURS];
            for (o, w) in h.iter_mut().zip(&u) {
                *o = p * w * (1.0 + shape_noise * normal(&mut rng));
            }
            DailyProfile::new(d, h).unwrap()
        })
        .collect();
    let history = LoadHistory::with_daily_temps(
        days,
        temps.clone(),
        temps.iter().map(|&t| [t; HOURS]).collect(),
    )
    .unwrap();
    PlantedData {
        history,
        totals,
        temps,
    }
}

pub type Mat = [[f64; HOURS]; HOURS];

/// Planted shape model
/// `u[d+1] = C u[d] + H0 t[d+1] + H1 t[d] + eps` with
/// `C = 0.9 I + 0.1/24 J` and zero column-sum `H`, so shapes stay on the
/// simplex. Hourly temperature anomalies are independent across hours.
pub struct PlantedVarx {
    pub c: Mat,
    pub h0: Mat,
    pub h1: Mat,
}

impl PlantedVarx {
    pub fn new(seed: u64) -> Self {
        let mut rng = rng::stream(seed, &[201]);
        let mut c = [[0.1 / HOURS as f64; HOURS]; HOURS];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] += 0.9;
        }
        let mut zero_sum = |scale: f64| -> Mat {
            let mut m = [[0.0; HOURS]; HOURS];
            for j in 0..HOURS {
                let col: Vec<f64> = (0..HOURS).map(|_| normal(&mut rng)).collect();
                let mean = col.iter().sum::<f64>() / HOURS as f64;
                for i in 0..HOURS {
                    m[i][j] = scale * (col[i] - mean);
                }
            }
            m
        };
        let h0 = zero_sum(5e-5);
        let h1 = zero_sum(2.5e-5);
        Self { c, h0, h1 }
    }

    /// Coefficient blocks in fitted order: lag, then temperatures forecast
    /// day first.
    pub fn blocks(&self) -> [&Mat; 3] {
        [&self.c, &self.h0, &self.h1]
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.blocks()
            .iter()
            .flat_map(|b| b.iter().flatten().copied())
            .collect()
    }
}

fn mat_vec(m: &Mat, v: &Hourly) -> Hourly {
    std::array::from_fn(|i| m[i].iter().zip(v).map(|(a, b)| a * b).sum())
}

/// History whose shapes follow the planted model and whose totals are a
/// constant 240 kWh. `noise` is the innovation sd relative to the mean
/// weight 1/24 and is projected to zero sum.
pub fn planted_varx_history(m: &PlantedVarx, n: usize, noise: f64, seed: u64) -> LoadHistory {
    let mut rng = rng::stream(seed, &[202]);
    let hourly: Vec<Hourly> = (0..n)
        .map(|_| std::array::from_fn(|_| 10.0 * normal(&mut rng)))
        .collect();
    let mut u = base_shape();
    let mut shapes = vec![u];
    for d in 1..n {
        let a = mat_vec(&m.c, &u);
        let b = mat_vec(&m.h0, &hourly[d]);
        let c = mat_vec(&m.h1, &hourly[d - 1]);
        let eps: Vec<f64> = (0..HOURS)
            .map(|_| noise / HOURS as f64 * normal(&mut rng))
            .collect();
        let eps_mean = eps.iter().sum::<f64>() / HOURS as f64;
        u = std::array::from_fn(|h| a[h] + b[h] + c[h] + eps[h] - eps_mean);
        assert!(u.iter().all(|&w| w > 0.0), "planted shape left the simplex");
        shapes.push(u);
    }
    let days = shapes
        .iter()
        .enumerate()
        .map(|(d, u)| DailyProfile::new(d, u.map(|w| 240.0 * w)).unwrap())
        .collect();
    LoadHistory::new(days, hourly).unwrap()
}

/// Mean loads of an aggregation study: 20 replicates at each customer count,
/// 0.85 kWh per home.
pub fn study_design() -> Vec<f64> {
    [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000]
        .iter()
        .flat_map(|&n| std::iter::repeat_n(0.85 * n as f64, 20))
        .collect()
}

/// Law values at `ws` with multiplicative Gaussian noise of relative size `rel`.
pub fn noisy_points(law: &ScalingLaw, ws: &[f64], rel: f64, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, &[0]);
    ws.iter()
        .map(|&w| eval_scaling(law, w).unwrap() * (1.0 + rel * normal(&mut r)))
        .collect()
}

pub fn arx_stacked(m: &ArxModel) -> Vec<f64> {
    m.lag_coefs.iter().chain(&m.exog_coefs).copied().collect()
}

pub fn varx_stacked(m: &VarxModel) -> Vec<f64> {
    m.lag_mats
        .iter()
        .chain(&m.exog_mats)
        .flat_map(|b| b.iter().flatten().copied())
        .collect()
}

/// Relative l2 distance between stacked coefficient vectors.
pub fn rel_l2(est: &[f64], truth: &[f64]) -> f64 {
    let num: f64 = est.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = truth.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
