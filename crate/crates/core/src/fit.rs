//! Small polynomial least-squares fits used for limit acceleration and
//! extrapolation to `s → 1⁺`.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    /// Coefficients in the original variable, constant term first.
    pub coefficients: Vec<f64>,
    /// Linear weights with `intercept = Σ w_i y_i`.
    pub intercept_weights: Vec<f64>,
    /// Root-mean-square residual.
    pub rms: f64,
    /// Largest absolute residual.
    pub max_residual: f64,
}

impl PolyFit {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    /// Intercept error induced by per-point errors.
    pub fn propagate(&self, errors: &[f64]) -> f64 {
        self.intercept_weights
            .iter()
            .zip(errors)
            .map(|(w, e)| w.abs() * e)
            .sum()
    }
}

/// Least-squares fit of `y ≈ Σ_{i≤degree} c_i x^i`.
///
/// The abscissae are rescaled to `[−1, 1]`-ish magnitude before forming the
/// normal equations; with degree ≤ 3 that keeps them well conditioned.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    let n = xs.len();
    if n != ys.len() || n < degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "degree-{degree} fit needs at least {} points, got {n}",
            degree + 1
        )));
    }
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let m = degree + 1;
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            let u = x / scale;
            (0..m).map(|i| u.powi(i as i32)).collect()
        })
        .collect();
    let mut normal = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..m {
            rhs[i] += row[i] * y;
            for j in 0..m {
                normal[i][j] += row[i] * row[j];
            }
        }
    }
    let beta = solve(normal.clone(), rhs)?;
    let mut e0 = vec![0.0; m];
    e0[0] = 1.0;
    let z = solve(normal, e0)?;
    let intercept_weights = rows
        .iter()
        .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum())
        .collect();
    let residuals: Vec<f64> = rows
        .iter()
        .zip(ys)
        .map(|(row, y)| y - row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let coefficients = beta
        .iter()
        .enumerate()
        .map(|(i, b)| b / scale.powi(i as i32))
        .collect();
    Ok(PolyFit {
        coefficients,
        intercept_weights,
        rms,
        max_residual,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let norm = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        if a[pivot][col].abs() <= 1e-13 * norm {
            return Err(Error::InvalidArgument("singular least-squares system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}
