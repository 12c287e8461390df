//! Scaling collapse of fidelity-versus-pulse-rate curves onto
//! `u = (Δt · σ^c)⁻¹`, with `Δt` the time between pulses in seconds and `σ`
//! the noise amplitude in Hz.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fit::{exponential_fit, ExponentialFit};
use super::stats::mean;
use super::sweep::SweepRow;
use crate::error::{Error, Result};

/// Search interval for the exponent when it is not given.
pub const EXPONENT_RANGE: (f64, f64) = (0.3, 1.0);
const GRID_STEP: f64 = 0.005;
const RESIDUAL_SAMPLES: usize = 200;

/// Mean fidelity of one (amplitude, pulse count) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub amplitude_hz: f64,
    pub pulses: usize,
    /// Time between pulses in seconds.
    pub interval_s: f64,
    pub mean_fidelity: f64,
}

impl CurvePoint {
    pub fn u(&self, c: f64) -> f64 {
        1.0 / (self.interval_s * self.amplitude_hz.powf(c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub exponent: f64,
    /// RMS spread between the per-amplitude curves at `exponent`.
    pub collapse_residual: f64,
    /// The same spread with `c = 0`, i.e. against pulse rate alone.
    pub unrescaled_residual: f64,
    /// Whether `exponent` came out of the search rather than the caller.
    pub searched: bool,
    pub amplitudes_hz: Vec<f64>,
    pub points: Vec<CurvePoint>,
    /// `F∞ − A·exp(−k·u)` through all points at `exponent`; `None` if the fit failed.
    pub exponential: Option<ExponentialFit>,
}

/// Averages fidelities per (amplitude, pulse count). Rows without noise or
/// without pulses have no finite `u` and are dropped.
pub fn curve_points(rows: &[SweepRow]) -> Result<Vec<CurvePoint>> {
    let mut groups: BTreeMap<(u64, usize), (f64, Vec<f64>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.amplitude_hz > 0.0 && r.pulses > 0) {
        let entry = groups
            .entry((r.amplitude_hz.to_bits(), r.pulses))
            .or_insert((r.duration, Vec::new()));
        if entry.0 != r.duration {
            return Err(Error::InvalidParameter(
                "rows with equal amplitude and pulse count disagree on the sweep duration".into(),
            ));
        }
        entry.1.push(r.fidelity);
    }
    Ok(groups
        .into_iter()
        .map(|((bits, pulses), (duration, values))| CurvePoint {
            amplitude_hz: f64::from_bits(bits),
            pulses,
            interval_s: duration / pulses as f64,
            mean_fidelity: mean(&values),
        })
        .collect())
}

fn curves(points: &[CurvePoint]) -> BTreeMap<u64, Vec<&CurvePoint>> {
    let mut by_amp: BTreeMap<u64, Vec<&CurvePoint>> = BTreeMap::new();
    for p in points {
        by_amp.entry(p.amplitude_hz.to_bits()).or_default().push(p);
    }
    by_amp
}

fn interpolate(nodes: &[(f64, f64)], u: f64) -> f64 {
    let k = nodes.partition_point(|&(x, _)| x < u);
    if k == 0 {
        return nodes[0].1;
    }
    if k == nodes.len() {
        return nodes[k - 1].1;
    }
    let (x0, y0) = nodes[k - 1];
    let (x1, y1) = nodes[k];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (u - x0) / (x1 - x0)
}

/// Root-mean-square spread between the piecewise-linear per-amplitude
/// curves: the population variance across curves, averaged over evenly
/// spaced `u` in their common range. Infinite when the curves do not overlap.
pub fn collapse_residual(points: &[CurvePoint], c: f64) -> Result<f64> {
    let by_amp = curves(points);
    if by_amp.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "a collapse needs at least two noise amplitudes, got {}",
            by_amp.len()
        )));
    }
    let lines: Vec<Vec<(f64, f64)>> = by_amp
        .values()
        .map(|ps| {
            let mut nodes: Vec<(f64, f64)> = ps.iter().map(|p| (p.u(c), p.mean_fidelity)).collect();
            nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
            nodes
        })
        .collect();
    let lo = lines.iter().map(|l| l[0].0).fold(f64::NEG_INFINITY, f64::max);
    let hi = lines.iter().map(|l| l[l.len() - 1].0).fold(f64::INFINITY, f64::min);
    if !(lo <= hi) {
        return Ok(f64::INFINITY);
    }
    let m = lines.len() as f64;
    let total: f64 = (0..RESIDUAL_SAMPLES)
        .map(|k| {
            let u = lo + (hi - lo) * k as f64 / (RESIDUAL_SAMPLES - 1) as f64;
            let values: Vec<f64> = lines.iter().map(|l| interpolate(l, u)).collect();
            let mu = values.iter().sum::<f64>() / m;
            values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / m
        })
        .sum();
    Ok((total / RESIDUAL_SAMPLES as f64).sqrt())
}

/// Grid search on [`EXPONENT_RANGE`] refined by golden-section search
/// around the best grid point. Ties go to the smaller exponent.
fn search_exponent(points: &[CurvePoint]) -> Result<f64> {
    let (a, b) = EXPONENT_RANGE;
    let n = ((b - a) / GRID_STEP).round() as usize;
    let mut best = (a, f64::INFINITY);
    for k in 0..=n {
        let c = a + (b - a) * k as f64 / n as f64;
        let r = collapse_residual(points, c)?;
        if r < best.1 {
            best = (c, r);
        }
    }
    let (mut lo, mut hi) = ((best.0 - GRID_STEP).max(a), (best.0 + GRID_STEP).min(b));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = collapse_residual(points, x1)?;
    let mut f2 = collapse_residual(points, x2)?;
    for _ in 0..40 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = collapse_residual(points, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = collapse_residual(points, x2)?;
        }
    }
    let (c, r) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(if r < best.1 { c } else { best.0 })
}

/// Collapses the sweep at exponent `c`, or searches for the exponent that
/// minimizes [`collapse_residual`] when `c` is `None`.
pub fn collapse_fit(rows: &[SweepRow], c: Option<f64>) -> Result<CollapseFit> {
    let points = curve_points(rows)?;
    let amplitudes_hz: Vec<f64> = curves(&points).keys().map(|&b| f64::from_bits(b)).collect();
    if amplitudes_hz.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "a collapse needs at least two noise amplitudes with pulses, got {}",
            amplitudes_hz.len()
        )));
    }
    if let Some(c) = c {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParameter(format!("collapse exponent {c} outside [0, 1]")));
        }
    }
    let exponent = match c {
        Some(c) => c,
        None => search_exponent(&points)?,
    };
    let us: Vec<f64> = points.iter().map(|p| p.u(exponent)).collect();
    let fs: Vec<f64> = points.iter().map(|p| p.mean_fidelity).collect();
    Ok(CollapseFit {
        exponent,
        collapse_residual: collapse_residual(&points, exponent)?,
        unrescaled_residual: collapse_residual(&points, 0.0)?,
        searched: c.is_none(),
        amplitudes_hz,
        exponential: exponential_fit(&us, &fs).ok(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(c_true: f64) -> Vec<CurvePoint> {
        let mut out = Vec::new();
        for amp in [250.0, 500.0, 750.0, 1000.0] {
            for pulses in [10, 25, 50, 100, 250, 500] {
                let interval_s = 0.1 / pulses as f64;
                let u = 1.0 / (interval_s * f64::powf(amp, c_true));
                out.push(CurvePoint {
                    amplitude_hz: amp,
                    pulses,
                    interval_s,
                    // linear in u so that interpolation is exact
                    mean_fidelity: 0.1 + 1e-3 * u,
                });
            }
        }
        out
    }

    #[test]
    fn exact_collapse_is_found() {
        for c_true in [0.65, 1.0] {
            let points = synthetic(c_true);
            assert!(collapse_residual(&points, c_true).unwrap() < 1e-12);
            let c = search_exponent(&points).unwrap();
            assert!((c - c_true).abs() < 1e-3, "{c} vs {c_true}");
        }
    }

    #[test]
    fn disjoint_curves_have_infinite_residual() {
        let p = |amp: f64, pulses: usize| CurvePoint {
            amplitude_hz: amp,
            pulses,
            interval_s: 1.0 / pulses as f64,
            mean_fidelity: 0.5,
        };
        let points = vec![p(1.0, 1), p(1.0, 2), p(1e6, 1), p(1e6, 2)];
        assert_eq!(collapse_residual(&points, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(collapse_residual(&points, 0.0).unwrap(), 0.0);
    }
}
