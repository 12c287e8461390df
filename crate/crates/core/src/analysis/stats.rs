use serde::Serialize;

use crate::error::{Error, Result};

/// Median of an already sorted slice.
fn sorted_median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("median of no values".into()));
    }
    Ok(sorted_median(&sorted_copy(values)))
}

/// First and third quartiles by the median-of-halves rule: the lower and
/// upper halves exclude the middle element when the count is odd, and a
/// single value is its own quartiles.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::InsufficientData("quartiles of no values".into()));
    }
    let v = sorted_copy(values);
    if v.len() == 1 {
        return Ok((v[0], v[0]));
    }
    let half = v.len() / 2;
    Ok((sorted_median(&v[..half]), sorted_median(&v[v.len() - half..])))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1); zero for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean: f64,
    pub std: f64,
}

pub fn summarize_values(values: &[f64]) -> Result<Summary> {
    let (q1, q3) = quartiles(values)?;
    Ok(Summary {
        n: values.len(),
        median: median(values)?,
        q1,
        q3,
        mean: mean(values),
        std: std_dev(values),
    })
}
