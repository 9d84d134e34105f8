//! Dense least squares through Householder QR with column pivoting.
//!
//! The design is factored once and any number of right-hand sides are solved
//! against it, which is how the 24 shape rows share one factorization.

use crate::error::{Error, Result};

/// Relative threshold on |R_kk| / |R_00| below which a column counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// What to do when the design matrix is rank deficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankPolicy {
    /// Fail with [`Error::Singular`] naming the dependent columns.
    #[default]
    Strict,
    /// Zero the coefficients of dependent columns (basic solution) and report them.
    DropCollinear,
}

/// Row-major dense matrix with named columns.
#[derive(Debug, Clone)]
pub struct Design {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    names: Vec<String>,
}

impl Design {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            rows: 0,
            cols: names.len(),
            data: Vec::new(),
            names,
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.cols, "design row width");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Solution of `min ||X b - y||` for each right-hand side.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// One coefficient vector per right-hand side, in design column order.
    pub coefs: Vec<Vec<f64>>,
    pub rank: usize,
    /// Indices of columns judged linearly dependent (coefficients fixed at zero).
    pub dropped: Vec<usize>,
}

/// Solves the least-squares problem for every vector in `targets`.
pub fn solve(design: &Design, targets: &[Vec<f64>], policy: RankPolicy) -> Result<LeastSquares> {
    let m = design.rows;
    let n = design.cols;
    if n == 0 {
        return Err(Error::InvalidParameter("design has no columns".into()));
    }
    if m == 0 {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    for t in targets {
        if t.len() != m {
            return Err(Error::Contract(format!(
                "target length {} does not match {} design rows",
                t.len(),
                m
            )));
        }
    }

    // column-major working copy
    let mut a = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            a[j * m + i] = design.data[i * n + j];
        }
    }
    let mut b: Vec<Vec<f64>> = targets.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);
    let mut diag = Vec::with_capacity(steps);
    let mut rank = 0;
    let mut r00 = 0.0_f64;

    for k in 0..steps {
        // pivot on the largest remaining column norm
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let col = &a[j * m + k..(j + 1) * m];
            let s: f64 = col.iter().map(|v| v * v).sum();
            if s > best_norm {
                best_norm = s;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                a.swap(k * m + i, best * m + i);
            }
            perm.swap(k, best);
        }
        let norm = best_norm.sqrt();
        if k == 0 {
            r00 = norm;
        }
        if norm == 0.0 || norm <= RANK_TOLERANCE * r00 {
            break;
        }

        let x0 = a[k * m + k];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place of the column
        a[k * m + k] = x0 - alpha;
        let vnorm2: f64 = a[k * m + k..(k + 1) * m].iter().map(|v| v * v).sum();
        if vnorm2 > 0.0 {
            for j in (k + 1)..n {
                let dot: f64 = (k..m).map(|i| a[k * m + i] * a[j * m + i]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    a[j * m + i] -= f * a[k * m + i];
                }
            }
            for t in b.iter_mut() {
                let dot: f64 = (k..m).map(|i| a[k * m + i] * t[i]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    t[i] -= f * a[k * m + i];
                }
            }
        }
        diag.push(alpha);
        rank = k + 1;
    }

    let mut dropped: Vec<usize> = perm[rank..].to_vec();
    dropped.sort_unstable();
    if !dropped.is_empty() && policy == RankPolicy::Strict {
        return Err(Error::Singular {
            columns: dropped.iter().map(|&j| design.names[j].clone()).collect(),
        });
    }

    let coefs = b
        .iter()
        .map(|qtb| {
            // back substitution on the leading rank x rank block of R
            let mut z = vec![0.0; rank];
            for i in (0..rank).rev() {
                let mut s = qtb[i];
                for j in (i + 1)..rank {
                    s -= a[j * m + i] * z[j];
                }
                z[i] = s / diag[i];
            }
            let mut out = vec![0.0; n];
            for (i, zi) in z.into_iter().enumerate() {
                out[perm[i]] = zi;
            }
            out
        })
        .collect();

    Ok(LeastSquares {
        coefs,
        rank,
        dropped,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(rows: &[&[f64]]) -> Design {
        let mut d = Design::new((0..rows[0].len()).map(|j| format!("c{j}")).collect());
        for r in rows {
            d.push_row(r);
        }
        d
    }

    #[test]
    fn exact_fit_recovers_coefficients() {
        let d = design(&[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]);
        let y = vec![1.0, 3.0, 5.0, 7.0];
        let ls = solve(&d, &[y], RankPolicy::Strict).unwrap();
        assert!((ls.coefs[0][0] - 1.0).abs() < 1e-12);
        assert!((ls.coefs[0][1] - 2.0).abs() < 1e-12);
        assert_eq!(ls.rank, 2);
    }

    #[test]
    fn overdetermined_matches_normal_equations() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [0.1, 0.9, 2.2, 2.8, 4.1];
        let d = design(
            &xs.iter()
                .map(|&x| [1.0, x])
                .collect::<Vec<_>>()
                .iter()
                .map(|r| &r[..])
                .collect::<Vec<_>>(),
        );
        let ls = solve(&d, &[ys.to_vec()], RankPolicy::Strict).unwrap();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert!((ls.coefs[0][1] - slope).abs() < 1e-12);
        assert!((ls.coefs[0][0] - (my - slope * mx)).abs() < 1e-12);
    }

    #[test]
    fn strict_policy_names_dependent_column() {
        let d = design(&[&[1.0, 2.0, 0.0], &[1.0, 2.0, 1.0], &[1.0, 2.0, 5.0]]);
        let err = solve(&d, &[vec![1.0, 2.0, 3.0]], RankPolicy::Strict).unwrap_err();
        match err {
            Error::Singular { columns } => assert_eq!(columns.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn drop_policy_returns_basic_solution() {
        let d = design(&[&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]]);
        let ls = solve(&d, &[vec![0.5, 0.5, 0.5]], RankPolicy::DropCollinear).unwrap();
        assert_eq!(ls.rank, 1);
        assert_eq!(ls.dropped.len(), 1);
        let pred = dot(d.row(0), &ls.coefs[0]);
        assert!((pred - 0.5).abs() < 1e-14);
    }
}
