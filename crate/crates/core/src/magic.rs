//! Magnetic-gradient-induced spin-spin couplings of a linear ion chain.
//!
//! Positions are solved in the characteristic length
//! `ℓ = (e² / (4πε₀ m ω_z²))^{1/3}`, where the axial potential becomes
//! `Σ x_i²/2 + Σ_{i<j} 1/|x_i − x_j|` (in units of `m ω_z² ℓ²`).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingModel;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;
pub const YB171_MASS: f64 = 170.936_323 * ATOMIC_MASS;
/// First-order Zeeman shift of a magnetically sensitive hyperfine transition, rad/(s·T).
pub const DEFAULT_SENSITIVITY: f64 = 2.0 * std::f64::consts::PI * 14e9;

pub const MAX_IONS: usize = 50;
const FORCE_TOLERANCE: f64 = 1e-12;
const MAX_NEWTON_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IonChainSpec {
    pub n_ions: usize,
    /// kg
    pub ion_mass: f64,
    /// rad/s
    pub axial_frequency: f64,
    /// T/m
    pub gradient: f64,
    /// ∂ω/∂B per ion in rad/(s·T); a single entry applies to every ion.
    pub sensitivity: Vec<f64>,
}

impl IonChainSpec {
    /// ¹⁷¹Yb⁺ chain with the default sensitivity.
    pub fn ytterbium(n_ions: usize, axial_frequency_hz: f64, gradient: f64) -> Self {
        Self {
            n_ions,
            ion_mass: YB171_MASS,
            axial_frequency: 2.0 * std::f64::consts::PI * axial_frequency_hz,
            gradient,
            sensitivity: vec![DEFAULT_SENSITIVITY],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ions < 2 || self.n_ions > MAX_IONS {
            return Err(Error::InvalidParameter(format!(
                "chain needs 2..={MAX_IONS} ions, got {}",
                self.n_ions
            )));
        }
        if !(self.ion_mass > 0.0 && self.axial_frequency > 0.0) {
            return Err(Error::InvalidParameter(
                "ion mass and trap frequency must be positive".into(),
            ));
        }
        if !self.gradient.is_finite() {
            return Err(Error::InvalidParameter("gradient must be finite".into()));
        }
        if self.sensitivity.len() != 1 && self.sensitivity.len() != self.n_ions {
            return Err(Error::Dimension(format!(
                "{} sensitivities for {} ions",
                self.sensitivity.len(),
                self.n_ions
            )));
        }
        Ok(())
    }

    pub fn length_scale(&self) -> f64 {
        let k = ELEMENTARY_CHARGE.powi(2)
            / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY);
        (k / (self.ion_mass * self.axial_frequency.powi(2))).cbrt()
    }

    fn sensitivity_of(&self, ion: usize) -> f64 {
        if self.sensitivity.len() == 1 {
            self.sensitivity[0]
        } else {
            self.sensitivity[ion]
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalModes {
    /// Ascending, rad/s.
    pub frequencies: DVector<f64>,
    /// Column `l` is the displacement pattern of mode `l`.
    pub mode_matrix: DMatrix<f64>,
    /// Meters.
    pub equilibrium_positions: DVector<f64>,
}

fn force(x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    DVector::from_fn(n, |i, _| {
        let mut f = -x[i];
        for j in 0..n {
            if j != i {
                let d = x[i] - x[j];
                f += d.signum() / (d * d);
            }
        }
        f
    })
}

/// Hessian of the dimensionless axial potential.
fn hessian(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = 1.0;
        for j in 0..n {
            if j != i {
                let c = 2.0 / (x[i] - x[j]).abs().powi(3);
                h[(i, i)] += c;
                h[(i, j)] = -c;
            }
        }
    }
    h
}

/// Equilibrium positions in units of the characteristic length.
pub fn dimensionless_equilibrium(n: usize) -> Result<DVector<f64>> {
    if n == 0 {
        return Ok(DVector::zeros(0));
    }
    let half = (n as f64 - 1.0) / 2.0;
    // empirical minimum spacing of long chains, a good enough starting point
    let spacing = 2.018 * (n as f64).powf(-0.559);
    let mut x = DVector::from_fn(n, |i, _| (i as f64 - half) * spacing);
    let mut residual = force(&x).amax();
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if residual < FORCE_TOLERANCE {
            // enforce the mirror symmetry that the exact solution has
            let sym = DVector::from_fn(n, |i, _| (x[i] - x[n - 1 - i]) / 2.0);
            return Ok(sym);
        }
        let f = force(&x);
        let step = hessian(&x)
            .lu()
            .solve(&f)
            .ok_or_else(|| Error::Unstable(residual))?;
        let mut damping = 1.0;
        loop {
            let trial = &x + damping * &step;
            let ordered = (1..n).all(|i| trial[i] > trial[i - 1]);
            let r = force(&trial).amax();
            if ordered && (r < residual || damping < 1e-6) {
                x = trial;
                residual = r;
                break;
            }
            damping /= 2.0;
        }
    }
    if residual < FORCE_TOLERANCE {
        return Ok(x);
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
    })
}

pub fn equilibrium_positions(spec: &IonChainSpec) -> Result<DVector<f64>> {
    spec.validate()?;
    Ok(dimensionless_equilibrium(spec.n_ions)? * spec.length_scale())
}

pub fn normal_modes(spec: &IonChainSpec) -> Result<NormalModes> {
    spec.validate()?;
    let x = dimensionless_equilibrium(spec.n_ions)?;
    let eig = SymmetricEigen::new(hessian(&x));
    let n = spec.n_ions;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if let Some(&lowest) = order.first() {
        if eig.eigenvalues[lowest] <= 0.0 {
            return Err(Error::Unstable(eig.eigenvalues[lowest]));
        }
    }
    let frequencies = DVector::from_iterator(
        n,
        order
            .iter()
            .map(|&k| spec.axial_frequency * eig.eigenvalues[k].sqrt()),
    );
    let mut mode_matrix = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        // sign convention: largest-magnitude component positive
        let pivot = v.iamax();
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        mode_matrix.set_column(col, &(v * sign));
    }
    Ok(NormalModes {
        frequencies,
        mode_matrix,
        equilibrium_positions: x * spec.length_scale(),
    })
}

/// Spin-spin couplings `J_ij = Σ_l ν_l ε_il ε_jl` with Lamb-Dicke factors
/// `ε_il = Δz_l ∂ω_i S_il / ν_l` and `Δz_l = √(ħ / 2mν_l)`. The returned
/// model stores `J_ij / 2π` in Hz.
pub fn coupling_matrix(spec: &IonChainSpec) -> Result<IsingModel> {
    let modes = normal_modes(spec)?;
    let n = spec.n_ions;
    let mut model = IsingModel::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dwi = spec.sensitivity_of(i) * spec.gradient;
            let dwj = spec.sensitivity_of(j) * spec.gradient;
            let mut jij = 0.0;
            for l in 0..n {
                let nu = modes.frequencies[l];
                let s = &modes.mode_matrix;
                jij += HBAR / (2.0 * spec.ion_mass * nu * nu) * dwi * dwj * s[(i, l)] * s[(j, l)];
            }
            model.set_coupling(i, j, jij / (2.0 * std::f64::consts::PI));
        }
    }
    Ok(model)
}

/// First-order response of the couplings to a trap-frequency shift,
/// `J → J (1 − 2 δω_z / ω_z)`. Fields are left untouched.
pub fn trap_fluctuation_couplings(model: &IsingModel, omega_z: f64, delta_omega_z: f64) -> IsingModel {
    let factor = 1.0 - 2.0 * delta_omega_z / omega_z;
    let mut out = model.clone();
    for (i, j, v) in model.couplings() {
        out.set_coupling(i, j, v * factor);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_ions() {
        let x = dimensionless_equilibrium(2).unwrap();
        let expected = 0.5f64.powf(2.0 / 3.0);
        assert_relative_eq!(x[1], expected, max_relative = 1e-12);
        assert_relative_eq!(x[0], -expected, max_relative = 1e-12);
        let modes = normal_modes(&IonChainSpec::ytterbium(2, 1.0, 1.0)).unwrap();
        let w = 2.0 * std::f64::consts::PI;
        assert_relative_eq!(modes.frequencies[0], w, max_relative = 1e-9);
        assert_relative_eq!(modes.frequencies[1], 3f64.sqrt() * w, max_relative = 1e-9);
    }

    #[test]
    fn three_ions_cubic_root() {
        let x = dimensionless_equilibrium(3).unwrap();
        assert_relative_eq!(x[2], 1.25f64.cbrt(), max_relative = 1e-12);
        assert!(x[1].abs() < 1e-14);
    }

    #[test]
    fn zero_gradient_zero_couplings() {
        let m = coupling_matrix(&IonChainSpec::ytterbium(4, 130e3, 0.0)).unwrap();
        assert_eq!(m.max_abs_coupling(), 0.0);
    }

    #[test]
    fn trap_shift_scaling() {
        let mut m = IsingModel::new(3);
        m.set_coupling(0, 1, 10.0);
        m.set_coupling(1, 2, -5.0);
        let same = trap_fluctuation_couplings(&m, 1.0, 0.0);
        assert_eq!(same, m);
        let shifted = trap_fluctuation_couplings(&m, 100.0, 1.0);
        assert_relative_eq!(shifted.coupling(0, 1), 9.8, max_relative = 1e-12);
        assert_relative_eq!(shifted.coupling(1, 2), -4.9, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(normal_modes(&IonChainSpec::ytterbium(1, 1.0, 1.0)).is_err());
        let mut spec = IonChainSpec::ytterbium(3, 1.0, 1.0);
        spec.sensitivity = vec![1.0, 2.0];
        assert!(coupling_matrix(&spec).is_err());
    }
}
