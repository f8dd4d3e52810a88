//! Regression of 16-point error on 8-point error across the catalog,
//! break points between fitted lines, and table reproduction.

mod golden;
mod tables;

use serde::Serialize;

use crate::catalog::{self, Registry};
use crate::error::{Error, Result};
use crate::scaler::{scale_entry, ScalingMethod};

pub use golden::{Golden, MetricRow, Tolerance, ToleranceKind};
pub use tables::{reproduce_all, reproduce_table, table_ids, Cell, Format, Row, TableDoc, Value};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorPoint {
    pub id: String,
    /// `‖Ĉ_8 − C_8‖_F`
    pub x: f64,
    /// `‖Ĉ_16 − C_16‖_F` under the chosen method.
    pub y: f64,
}

/// Least-squares line `y = m·x + b` with goodness-of-fit statistics.
///
/// `chi2` is the residual sum of squares and `rmse` uses `n − 2` degrees of
/// freedom; the other variants are kept for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub m_hat: f64,
    pub b_hat: f64,
    pub chi2: f64,
    pub rmse: f64,
    pub n: usize,
    /// `Σ r² / ŷ`
    pub chi2_pearson: f64,
    /// `Σ r² / σ̂²` with `σ̂² = SSE / (n − 2)`.
    pub chi2_scaled: f64,
    /// `sqrt(SSE / n)`
    pub rmse_n: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.m_hat * x + self.b_hat
    }

    /// Same line with slope and intercept rounded to `decimals` places.
    pub fn rounded(&self, decimals: i32) -> LinearFit {
        let f = 10f64.powi(decimals);
        LinearFit {
            m_hat: (self.m_hat * f).round() / f,
            b_hat: (self.b_hat * f).round() / f,
            ..*self
        }
    }
}

pub fn fit(points: &[ErrorPoint]) -> Result<LinearFit> {
    // a canonical order makes the floating-point sums independent of input order
    let mut sorted: Vec<&ErrorPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let points = sorted;
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateFit("at least three points are required"));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.y).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.x - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.x - mx) * (p.y - my)).sum();
    if sxx <= f64::EPSILON * (1.0 + mx * mx) * nf {
        return Err(Error::DegenerateFit("all x values are equal"));
    }
    let m_hat = sxy / sxx;
    let b_hat = my - m_hat * mx;
    let mut sse = 0.0;
    let mut pearson = 0.0;
    for p in &points {
        let fitted = m_hat * p.x + b_hat;
        let r = p.y - fitted;
        sse += r * r;
        pearson += r * r / fitted;
    }
    let sigma2 = sse / (nf - 2.0);
    Ok(LinearFit {
        m_hat,
        b_hat,
        chi2: sse,
        rmse: sigma2.sqrt(),
        n,
        chi2_pearson: pearson,
        chi2_scaled: if sigma2 > 0.0 { sse / sigma2 } else { 0.0 },
        rmse_n: (sse / nf).sqrt(),
    })
}

/// Abscissa where the two fitted lines cross.
pub fn break_point(a: &LinearFit, b: &LinearFit) -> Result<f64> {
    let dm = b.m_hat - a.m_hat;
    if dm.abs() <= 1e-12 * (1.0 + a.m_hat.abs().max(b.m_hat.abs())) {
        return Err(Error::ParallelLines);
    }
    Ok((a.b_hat - b.b_hat) / dm)
}

/// 8-point and 16-point errors of every catalog member under `method`.
pub fn error_points(registry: &Registry, method: ScalingMethod) -> Result<Vec<ErrorPoint>> {
    registry
        .entries()
        .iter()
        .map(|e| {
            Ok(ErrorPoint {
                id: e.id.clone(),
                x: catalog::frobenius_error(e)?,
                y: scale_entry(e, 16, method)?.frobenius_error()?,
            })
        })
        .collect()
}

pub fn fit_method(registry: &Registry, method: ScalingMethod) -> Result<LinearFit> {
    fit(&error_points(registry, method)?)
}
