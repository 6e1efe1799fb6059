//! Zero-mean, unit-variance column scaling.

use alloc::vec::Vec;

use super::FeatureError;
use crate::math::sqrt;

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizationStats {
    /// Fits on `rows`. A column whose values are all identical gets
    /// `std = 0` exactly.
    pub fn fit(rows: &[Vec<f64>], width: usize) -> Self {
        let n = rows.len() as f64;
        let mut mean = Vec::with_capacity(width);
        let mut std = Vec::with_capacity(width);
        for j in 0..width {
            if rows.is_empty() {
                mean.push(0.0);
                std.push(0.0);
                continue;
            }
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let constant = rows.iter().all(|r| r[j] == rows[0][j]);
            let s = if constant {
                0.0
            } else {
                sqrt(rows.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n)
            };
            mean.push(m);
            std.push(s);
        }
        Self { mean, std }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    /// `(x - mean) / std`, with zero-variance columns mapped to 0.
    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if row.len() != self.width() {
            return Err(FeatureError::ColumnMismatch { matrix: row.len(), stats: self.width() });
        }
        Ok(row
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&x, (&m, &s))| if s == 0.0 { 0.0 } else { (x - m) / s })
            .collect())
    }

    pub fn apply(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FeatureError> {
        rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

/// Standardizes `rows`. Without `stats` the rows are a training split and
/// the statistics are fitted on them; with `stats` they are applied as is.
pub fn standardize(
    rows: &[Vec<f64>],
    width: usize,
    stats: Option<&StandardizationStats>,
) -> Result<(Vec<Vec<f64>>, StandardizationStats), FeatureError> {
    if let Some(bad) = rows.iter().find(|r| r.len() != width) {
        return Err(FeatureError::ColumnMismatch { matrix: bad.len(), stats: width });
    }
    let stats = match stats {
        Some(s) => {
            if s.width() != width {
                return Err(FeatureError::ColumnMismatch { matrix: width, stats: s.width() });
            }
            s.clone()
        }
        None => StandardizationStats::fit(rows, width),
    };
    Ok((stats.apply(rows)?, stats))
}
