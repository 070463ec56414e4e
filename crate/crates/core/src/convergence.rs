//! Convergence-order estimation.

use serde::Serialize;

use crate::error::{config, Result};

/// Least-squares slope of `ln error` against `ln h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    pub order: f64,
    /// Fitted `ln C` in `error ≈ C·h^order`.
    pub log_constant: f64,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: f64,
}

pub fn fit_order(steps: &[f64], errors: &[f64]) -> Result<OrderFit> {
    if steps.len() != errors.len() {
        return config("step and error lists differ in length");
    }
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .filter(|(h, e)| **h > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return config("order fit needs at least two positive (step, error) pairs");
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return config("order fit needs at least two distinct step sizes");
    }
    let order = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(OrderFit { order, log_constant: my - order * mx, r_squared })
}
