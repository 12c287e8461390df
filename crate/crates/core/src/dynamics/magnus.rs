//! Dense-matrix tools for checking the effective Hamiltonian of one
//! dynamical-decoupling cycle. Only meant for a handful of qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::propagate::AnnealConfig;
use crate::error::{Error, Result};
use crate::ising::IsingModel;

pub type Operator = DMatrix<Complex64>;

const MAX_DENSE_QUBITS: usize = 10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn dim_of(n: usize) -> Result<usize> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManySpins {
            n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(1 << n)
}

fn z_sign(b: usize, q: usize) -> f64 {
    if b >> q & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `σˣ_q` (bit 0 is the `σᶻ = +1` state).
pub fn sigma_x(n: usize, q: usize) -> Operator {
    let d = 1 << n;
    DMatrix::from_fn(d, d, |r, c| if r == c ^ (1 << q) { Complex64::new(1.0, 0.0) } else { zero() })
}

/// `σʸ_q`: `|0⟩ → i|1⟩`, `|1⟩ → −i|0⟩`.
pub fn sigma_y(n: usize, q: usize) -> Operator {
    let d = 1 << n;
    DMatrix::from_fn(d, d, |r, c| {
        if r == c ^ (1 << q) {
            Complex64::new(0.0, if c >> q & 1 == 0 { 1.0 } else { -1.0 })
        } else {
            zero()
        }
    })
}

pub fn sigma_z(n: usize, q: usize) -> Operator {
    let d = 1 << n;
    DMatrix::from_fn(d, d, |r, c| if r == c { Complex64::new(z_sign(c, q), 0.0) } else { zero() })
}

fn diagonal(values: impl Iterator<Item = f64>, d: usize) -> Operator {
    let mut m = DMatrix::from_element(d, d, zero());
    for (i, v) in values.enumerate() {
        m[(i, i)] = Complex64::new(v, 0.0);
    }
    m
}

/// `Σ_{i<j} J_ij σᶻ_i σᶻ_j + Σ_i h_i σᶻ_i` (offset dropped).
pub fn cost_operator(model: &IsingModel) -> Result<Operator> {
    let n = model.n_spins();
    let d = dim_of(n)?;
    let energies = (0..d).map(|b| {
        let mut e = 0.0;
        for (i, j, v) in model.couplings() {
            e += v * z_sign(b, i) * z_sign(b, j);
        }
        for (i, &h) in model.fields().iter().enumerate() {
            e += h * z_sign(b, i);
        }
        e
    });
    Ok(diagonal(energies, d))
}

fn field_operator(dh: &[f64], d: usize) -> Operator {
    diagonal(
        (0..d).map(|b| dh.iter().enumerate().map(|(i, &h)| h * z_sign(b, i)).sum()),
        d,
    )
}

fn transverse(n: usize) -> Operator {
    (0..n).fold(DMatrix::from_element(1 << n, 1 << n, zero()), |acc, q| acc + sigma_x(n, q))
}

/// `H(t) = H_cost + Σ δh_i σᶻ_i − C(t) h_x Σ σˣ_i`.
pub fn hamiltonian(model: &IsingModel, config: &AnnealConfig, dh: &[f64], t: f64) -> Result<Operator> {
    let n = model.n_spins();
    let d = dim_of(n)?;
    if dh.len() != n {
        return Err(Error::Dimension(format!("{} field shifts for {n} qubits", dh.len())));
    }
    let c = config.ramp.value(t, config.duration);
    Ok(cost_operator(model)? + field_operator(dh, d) - transverse(n) * Complex64::new(c * config.hx, 0.0))
}

/// Generator `Â₁ + Â₂ + Â₃` of one cycle `[t₀ − Δt, t₀ + Δt]` with a global
/// flip at `t₀` and another at `t₀ + Δt`, so the cycle propagator is
/// approximately `exp(−i (Â₁ + Â₂ + Â₃) 2Δt)`:
///
/// - `Â₁ = H_cost − C(t₀) h_x Σ σˣ`
/// - `Â₂ = h_x C(t₀) Σ δh_i σʸ_i Δt`
/// - `Â₃ = (−⅔ h_x v Σ_{i<j} J_ij (σᶻ_iσʸ_j + σʸ_iσᶻ_j) + ⅔ h_x C(t₀) Σ δh_i² σˣ_i) Δt²`
///
/// where `v = −dC/dt`. The model must be couplings-only.
pub fn magnus_effective_generator(
    model: &IsingModel,
    config: &AnnealConfig,
    dh: &[f64],
    t0: f64,
    dt: f64,
) -> Result<Operator> {
    let n = model.n_spins();
    let d = dim_of(n)?;
    if model.has_fields() {
        return Err(Error::InvalidParameter("the cycle generator assumes a couplings-only model".into()));
    }
    if dh.len() != n {
        return Err(Error::Dimension(format!("{} field shifts for {n} qubits", dh.len())));
    }
    let c0 = config.ramp.value(t0, config.duration);
    let v = config.ramp.slope(t0, config.duration);
    let hx = config.hx;
    let re = |x: f64| Complex64::new(x, 0.0);

    let a1 = cost_operator(model)? - transverse(n) * re(c0 * hx);
    let mut a2 = DMatrix::from_element(d, d, zero());
    let mut x_sq = DMatrix::from_element(d, d, zero());
    for (i, &h) in dh.iter().enumerate() {
        a2 += sigma_y(n, i) * re(h);
        x_sq += sigma_x(n, i) * re(h * h);
    }
    let a2 = a2 * re(hx * c0 * dt);
    let mut zy = DMatrix::from_element(d, d, zero());
    for (i, j, jij) in model.couplings() {
        zy += (sigma_z(n, i) * sigma_y(n, j) + sigma_y(n, i) * sigma_z(n, j)) * re(jij);
    }
    let a3 = (zy * re(-2.0 / 3.0 * hx * v) + x_sq * re(2.0 / 3.0 * hx * c0)) * re(dt * dt);
    Ok(a1 + a2 + a3)
}

/// `U(b, a)` for `H(t)` using `substeps` fourth-order Magnus steps with
/// two-point Gauss-Legendre nodes.
pub fn time_ordered_propagator(
    model: &IsingModel,
    config: &AnnealConfig,
    dh: &[f64],
    a: f64,
    b: f64,
    substeps: usize,
) -> Result<Operator> {
    let d = dim_of(model.n_spins())?;
    let h = (b - a) / substeps as f64;
    let offset = 3f64.sqrt() / 6.0;
    let mut u = DMatrix::identity(d, d);
    for k in 0..substeps {
        let t = a + k as f64 * h;
        let h1 = hamiltonian(model, config, dh, t + h * (0.5 - offset))?;
        let h2 = hamiltonian(model, config, dh, t + h * (0.5 + offset))?;
        let commutator = &h1 * &h2 - &h2 * &h1;
        let omega = (&h1 + &h2) * Complex64::new(0.0, -h / 2.0)
            - commutator * Complex64::new(3f64.sqrt() / 12.0 * h * h, 0.0);
        u = omega.exp() * u;
    }
    Ok(u)
}

/// `X U(t₀ + Δt, t₀) X U(t₀, t₀ − Δt)` with `X` the global flip.
pub fn exact_cycle_propagator(
    model: &IsingModel,
    config: &AnnealConfig,
    dh: &[f64],
    t0: f64,
    dt: f64,
    substeps: usize,
) -> Result<Operator> {
    let n = model.n_spins();
    let d = dim_of(n)?;
    let flip = DMatrix::from_fn(d, d, |r, c| {
        if r == c ^ (d - 1) {
            Complex64::new(1.0, 0.0)
        } else {
            zero()
        }
    });
    let before = time_ordered_propagator(model, config, dh, t0 - dt, t0, substeps)?;
    let after = time_ordered_propagator(model, config, dh, t0, t0 + dt, substeps)?;
    Ok(&flip * after * &flip * before)
}

/// `exp(−i G τ)`.
pub fn evolve(generator: &Operator, tau: f64) -> Operator {
    (generator * Complex64::new(0.0, -tau)).exp()
}

/// Largest singular value.
pub fn operator_norm(m: &Operator) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let n = 2;
        let i = Complex64::new(0.0, 1.0);
        for q in 0..n {
            // XY = iZ
            let lhs = sigma_x(n, q) * sigma_y(n, q);
            let rhs = sigma_z(n, q) * i;
            assert!((lhs - rhs).norm() < 1e-15);
        }
    }

    #[test]
    fn generator_without_noise_or_ramp_is_a1() {
        let mut model = IsingModel::new(3);
        model.set_coupling(0, 1, 0.4);
        model.set_coupling(1, 2, -1.0);
        // an infinitely long sweep has zero ramp slope
        let config = AnnealConfig::new(f64::INFINITY, 1.3);
        let g = magnus_effective_generator(&model, &config, &[0.0; 3], 0.0, 0.1).unwrap();
        let a1 = cost_operator(&model).unwrap() - transverse(3) * Complex64::new(1.3, 0.0);
        assert!((g - a1).norm() < 1e-14);
    }
}
