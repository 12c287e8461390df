//! Unweighted least-squares fits by Levenberg-Marquardt.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 2000;

struct Solution {
    params: Vec<f64>,
    rss: f64,
    iterations: usize,
}

/// Minimizes `Σ (model(x) − y)²`. `model` returns the value and the gradient
/// with respect to the parameters. Damping uses Marquardt's diagonal scaling.
fn levenberg_marquardt(
    xs: &[f64],
    ys: &[f64],
    initial: Vec<f64>,
    model: impl Fn(&[f64], f64) -> (f64, Vec<f64>),
) -> Result<Solution> {
    let np = initial.len();
    let evaluate = |p: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let mut r = DVector::zeros(xs.len());
        let mut jac = DMatrix::zeros(xs.len(), np);
        for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
            let (v, g) = model(p, x);
            r[k] = v - y;
            for (j, gj) in g.into_iter().enumerate() {
                jac[(k, j)] = gj;
            }
        }
        (r, jac)
    };
    let mut p = initial;
    let (mut r, mut jac) = evaluate(&p);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for iteration in 0..MAX_ITERATIONS {
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let gradient = &jt * &r;
        if cost == 0.0 || gradient.amax() <= 1e-15 * (1.0 + cost) {
            return Ok(Solution { params: p, rss: cost, iterations: iteration });
        }
        loop {
            let mut damped = jtj.clone();
            for j in 0..np {
                damped[(j, j)] += lambda * jtj[(j, j)].max(1e-12);
            }
            let step = damped.cholesky().map(|c| c.solve(&(-&gradient)));
            if let Some(step) = step {
                let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let (tr, tj) = evaluate(&trial);
                let trial_cost = tr.norm_squared();
                if trial_cost.is_finite() && trial_cost <= cost {
                    let small_step = step.norm() <= 1e-13 * (1e-13 + DVector::from_vec(p.clone()).norm());
                    let small_gain = cost - trial_cost <= 1e-15 * cost;
                    p = trial;
                    r = tr;
                    jac = tj;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-15);
                    if small_step || small_gain {
                        return Ok(Solution { params: p, rss: cost, iterations: iteration + 1 });
                    }
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                // no descent direction left: a local minimum to working precision
                return Ok(Solution { params: p, rss: cost, iterations: iteration + 1 });
            }
        }
    }
    Err(Error::Fit(format!(
        "no convergence after {MAX_ITERATIONS} iterations (residual sum of squares {cost:e})"
    )))
}

fn check_points(xs: &[f64], ys: &[f64], min: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} x values but {} y values", xs.len(), ys.len())));
    }
    if xs.len() < min {
        return Err(Error::InsufficientData(format!("need at least {min} points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("fit data must be finite".into()));
    }
    Ok(())
}

fn span(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `f(x) = a·arctan(b(x − c)) + d`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArctanFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub rss: f64,
    pub iterations: usize,
    /// Set when the step has vanished (`a ≈ 0` or `b ≈ 0`), in which case
    /// `b` and `c` carry no information.
    pub degenerate: bool,
}

impl ArctanFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * (self.b * (x - self.c)).atan() + self.d
    }
}

/// Starts from `a = (max y − min y)/π`, `b = 1`, `c` = midpoint of the x
/// range and `d` = mean of y.
pub fn arctan_fit(xs: &[f64], ys: &[f64]) -> Result<ArctanFit> {
    check_points(xs, ys, 4)?;
    let (ylo, yhi) = span(ys);
    let (xlo, xhi) = span(xs);
    let initial = vec![
        (yhi - ylo) / std::f64::consts::PI,
        1.0,
        (xlo + xhi) / 2.0,
        ys.iter().sum::<f64>() / ys.len() as f64,
    ];
    let s = levenberg_marquardt(xs, ys, initial, |p, x| {
        let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
        let z = b * (x - c);
        let w = 1.0 / (1.0 + z * z);
        (a * z.atan() + d, vec![z.atan(), a * (x - c) * w, -a * b * w, 1.0])
    })?;
    let (a, b, c, d) = (s.params[0], s.params[1], s.params[2], s.params[3]);
    let scale = (yhi - ylo).max(ys.iter().map(|y| y.abs()).fold(0.0, f64::max)).max(1e-300);
    let degenerate = a.abs() <= 1e-6 * scale || (b * (xhi - xlo)).abs() <= 1e-6;
    Ok(ArctanFit {
        a,
        b,
        c,
        d,
        rss: s.rss,
        iterations: s.iterations,
        degenerate,
    })
}

/// `f(u) = F∞ − A·exp(−k·u)`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub f_inf: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub rss: f64,
    pub iterations: usize,
}

impl ExponentialFit {
    pub fn eval(&self, u: f64) -> f64 {
        self.f_inf - self.amplitude * (-self.rate * u).exp()
    }
}

/// Starts from `F∞ = max y`, `A = max y − min y` and `k = 1/(mean u)`.
pub fn exponential_fit(us: &[f64], ys: &[f64]) -> Result<ExponentialFit> {
    check_points(us, ys, 3)?;
    let (ylo, yhi) = span(ys);
    let mean_u = us.iter().sum::<f64>() / us.len() as f64;
    let initial = vec![yhi, yhi - ylo, if mean_u > 0.0 { 1.0 / mean_u } else { 1.0 }];
    let s = levenberg_marquardt(us, ys, initial, |p, u| {
        let e = (-p[2] * u).exp();
        (p[0] - p[1] * e, vec![1.0, -e, p[1] * u * e])
    })?;
    Ok(ExponentialFit {
        f_inf: s.params[0],
        amplitude: s.params[1],
        rate: s.params[2],
        rss: s.rss,
        iterations: s.iterations,
    })
}
