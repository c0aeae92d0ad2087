//! Least-squares power-law fit of the relative error against N:
//! |xi| ~ N^(-alpha), fitted on log-log axes.

use crate::CliError;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    /// RMS of the log-log fit residuals.
    pub residual_rms: f64,
    pub points_used: usize,
    /// Rows whose xi sign differs from the large-N branch (zero-crossing
    /// artifacts); excluded and counted.
    pub excluded_sign_changes: usize,
    pub excluded_missing: usize,
    pub sign_change_flagged: bool,
}

/// Fit alpha from (N, xi) pairs. Rows with missing xi are dropped; rows
/// whose sign disagrees with the largest-N row are zero-crossing
/// artifacts of the energy origin and are excluded from the fit.
pub fn fit_alpha(points: &[(f64, Option<f64>)]) -> Result<AlphaFit, CliError> {
    let mut usable: Vec<(f64, f64)> = Vec::new();
    let mut excluded_missing = 0usize;
    for &(n, xi) in points {
        match xi {
            Some(x) if x != 0.0 && x.is_finite() && n > 0.0 => usable.push((n, x)),
            _ => excluded_missing += 1,
        }
    }
    if usable.is_empty() {
        return Err(CliError::Param("no usable xi values".into()));
    }
    usable.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let branch_sign = usable.last().unwrap().1.signum();
    let before = usable.len();
    usable.retain(|&(_, x)| x.signum() == branch_sign);
    let excluded_sign_changes = before - usable.len();

    let mut distinct: Vec<f64> = usable.iter().map(|p| p.0).collect();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(CliError::Param(format!(
            "insufficient data: {} distinct N values after exclusions (need 4)",
            distinct.len()
        )));
    }

    let xs: Vec<f64> = usable.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.1.abs().ln()).collect();
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let det = m * sxx - sx * sx;
    if det == 0.0 {
        return Err(CliError::Param("degenerate N grid".into()));
    }
    let slope = (m * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / m;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    Ok(AlphaFit {
        alpha: -slope,
        residual_rms: (ss / m).sqrt(),
        points_used: usable.len(),
        excluded_sign_changes,
        excluded_missing,
        sign_change_flagged: excluded_sign_changes > 0,
    })
}
