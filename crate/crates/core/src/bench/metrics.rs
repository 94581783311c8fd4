//! Pointwise error statistics over a test set.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::pairwise_sum;

/// Entries with `|truth|` below this are left out of the relative metrics.
pub const RELATIVE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mse: f64,
    pub max_ae: f64,
    /// NaN when every entry was skipped.
    pub mre: f64,
    pub max_re: f64,
    /// Seconds.
    pub ex_time: f64,
    pub test_count: usize,
    pub skipped_rel: usize,
}

pub fn error_metrics(truth: &[f64], approx: &[f64], ex_time: Duration) -> Result<ErrorReport> {
    if truth.len() != approx.len() || truth.is_empty() {
        return Err(Error::Dimension(format!(
            "metrics need equal non-empty vectors, got {} and {}",
            truth.len(),
            approx.len()
        )));
    }
    let abs: Vec<f64> = truth.iter().zip(approx).map(|(t, a)| (t - a).abs()).collect();
    let sq: Vec<f64> = abs.iter().map(|e| e * e).collect();
    let rel: Vec<f64> = truth
        .iter()
        .zip(&abs)
        .filter(|(t, _)| t.abs() >= RELATIVE_FLOOR)
        .map(|(t, e)| e / t.abs())
        .collect();
    let n = truth.len() as f64;
    let (mre, max_re) = if rel.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            pairwise_sum(&rel) / rel.len() as f64,
            rel.iter().copied().fold(0.0, f64::max),
        )
    };
    Ok(ErrorReport {
        mse: pairwise_sum(&sq) / n,
        max_ae: abs.iter().copied().fold(0.0, f64::max),
        mre,
        max_re,
        ex_time: ex_time.as_secs_f64(),
        test_count: truth.len(),
        skipped_rel: truth.len() - rel.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_vectors() {
        let r = error_metrics(&[1.0, -2.0, 3.0], &[1.0, -2.0, 3.0], Duration::ZERO).unwrap();
        assert_eq!((r.mse, r.max_ae, r.mre, r.max_re), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.test_count, 3);
    }

    #[test]
    fn hand_examples() {
        let r = error_metrics(&[2.0], &[1.0], Duration::ZERO).unwrap();
        assert_eq!((r.mse, r.max_ae, r.mre, r.max_re), (1.0, 1.0, 0.5, 0.5));
        let r = error_metrics(&[1.0, -1.0], &[1.1, -1.1], Duration::from_millis(5)).unwrap();
        assert_relative_eq!(r.mse, 0.01, max_relative = 1e-12);
        assert_relative_eq!(r.max_ae, 0.1, max_relative = 1e-12);
        assert_relative_eq!(r.mre, 0.1, max_relative = 1e-12);
        assert_relative_eq!(r.max_re, 0.1, max_relative = 1e-12);
        assert_relative_eq!(r.ex_time, 0.005);
    }

    #[test]
    fn zero_truth_is_skipped() {
        let r = error_metrics(&[0.0, 2.0], &[0.5, 2.0], Duration::ZERO).unwrap();
        assert_eq!(r.skipped_rel, 1);
        assert_eq!(r.mre, 0.0);
        assert_eq!(r.max_ae, 0.5);
        let r = error_metrics(&[0.0], &[0.5], Duration::ZERO).unwrap();
        assert!(r.mre.is_nan());
    }

    #[test]
    fn length_mismatch() {
        assert!(error_metrics(&[1.0], &[1.0, 2.0], Duration::ZERO).is_err());
        assert!(error_metrics(&[], &[], Duration::ZERO).is_err());
    }
}
