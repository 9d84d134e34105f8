//! Shapiro-Wilk normality test using Royston's polynomial approximations
//! for the coefficients and the null distribution of W (3 <= n <= 5000).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::ensure_finite;

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p_value: f64,
    pub pass: bool,
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Coefficients for the lower half of the order statistics, largest
/// magnitude first; the full vector is antisymmetric.
fn half_coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![0.5f64.sqrt()];
    }
    let norm = std_normal();
    let an25 = n as f64 + 0.25;
    let m: Vec<f64> = (1..=half)
        .map(|i| norm.inverse_cdf((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

fn p_value(w: f64, n: usize) -> f64 {
    if n == 3 {
        let pw = 6.0 / PI * (w.sqrt().asin() - (0.75f64).sqrt().asin());
        return pw.clamp(0.0, 1.0);
    }
    let an = n as f64;
    let w1 = (1.0 - w).ln();
    let (y, m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if w1 >= gamma {
            return 0.0;
        }
        (-(gamma - w1).ln(), poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (w1, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    std_normal().sf((y - m) / s)
}

/// W statistic, its p-value and whether normality is retained at `alpha`
/// (`p > alpha`).
pub fn shapiro_wilk(sample: &[f64], alpha: f64) -> Result<ShapiroWilk> {
    let n = sample.len();
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "Shapiro-Wilk needs {MIN_N} to {MAX_N} values, got {n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha {alpha} outside (0, 1)"
        )));
    }
    ensure_finite(sample, "sample")?;
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    if x[0] == x[n - 1] {
        return Err(Error::Degenerate("constant sample".into()));
    }
    let half = half_coefficients(n);
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut ssx = 0.0;
    for v in &x {
        ssx += (v - mean) * (v - mean);
    }
    let mut sax = 0.0;
    let mut ssa = 0.0;
    for (i, a) in half.iter().enumerate() {
        sax += a * (x[n - 1 - i] - x[i]);
        ssa += 2.0 * a * a;
    }
    let w = (sax * sax / (ssa * ssx)).min(1.0);
    let p = p_value(w, n);
    Ok(ShapiroWilk {
        w,
        p_value: p,
        pass: p > alpha,
    })
}
