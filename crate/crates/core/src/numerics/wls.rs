//! Weighted linear least squares by Householder QR.

use nalgebra::{DMatrix, DVector};

use super::summation::compensated_sum;
use crate::error::{Error, Result};

/// Relative size of a diagonal entry of R below which the column is treated
/// as linearly dependent on its predecessors.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WlsSolution {
    pub params: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub residual_chi2: f64,
}

impl WlsSolution {
    pub fn sigmas(&self) -> DVector<f64> {
        self.covariance.diagonal().map(|v| v.max(0.0).sqrt())
    }
}

/// Minimizes `sum_i ((y_i - (design * params)_i) / sigma_i)^2`.
///
/// Rows are whitened by `1/sigma`, columns are scaled to unit norm and the
/// result is factorized with Householder QR; the scaling is undone on the
/// parameters and the covariance.
pub fn weighted_linear_least_squares(
    design: &DMatrix<f64>,
    y: &DVector<f64>,
    sigma: &DVector<f64>,
) -> Result<WlsSolution> {
    let (n, p) = design.shape();
    if p == 0 || n < p {
        return Err(Error::Invalid(format!(
            "least squares needs n >= p >= 1, got n = {n}, p = {p}"
        )));
    }
    if y.len() != n || sigma.len() != n {
        return Err(Error::Invalid(format!(
            "length mismatch: design has {n} rows, y has {}, sigma has {}",
            y.len(),
            sigma.len()
        )));
    }
    if let Some(i) = sigma.iter().position(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::domain(
            "weighted_linear_least_squares",
            "sigma",
            sigma[i],
            "every uncertainty must be finite and > 0",
        ));
    }

    let mut a = design.clone();
    let mut b = y.clone();
    for i in 0..n {
        let w = 1.0 / sigma[i];
        a.row_mut(i).scale_mut(w);
        b[i] *= w;
    }

    let mut col_scale = DVector::zeros(p);
    for j in 0..p {
        let norm = a.column(j).norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Singular {
                column: j,
                name: format!("column {j}"),
            });
        }
        col_scale[j] = norm;
        a.column_mut(j).unscale_mut(norm);
    }

    let qr = a.qr();
    let r = qr.r();
    let max_diag = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    for j in 0..p {
        if r[(j, j)].abs() <= RANK_TOL * max_diag {
            return Err(Error::Singular {
                column: j,
                name: format!("column {j}"),
            });
        }
    }

    let qtb = qr.q().transpose() * &b;
    let scaled = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Singular {
            column: p - 1,
            name: format!("column {}", p - 1),
        })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Singular {
            column: p - 1,
            name: format!("column {}", p - 1),
        })?;
    let scaled_cov = &r_inv * r_inv.transpose();

    let params = scaled.component_div(&col_scale);
    let mut covariance = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            covariance[(i, j)] = scaled_cov[(i, j)] / (col_scale[i] * col_scale[j]);
        }
    }
    // symmetrize exactly
    for i in 0..p {
        for j in 0..i {
            let m = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
            covariance[(i, j)] = m;
            covariance[(j, i)] = m;
        }
    }

    let fitted = design * &params;
    let residual_chi2 = compensated_sum((0..n).map(|i| {
        let r = (y[i] - fitted[i]) / sigma[i];
        r * r
    }));

    Ok(WlsSolution {
        params,
        covariance,
        residual_chi2,
    })
}
