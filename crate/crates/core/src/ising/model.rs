use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A configuration of `n` Ising spins.
///
/// Basis index convention: bit `i` of the index is qubit `i`; a zero bit is
/// spin `+1` (the `σᶻ = +1` eigenstate), a set bit is spin `−1`. With
/// `x = (1 + s)/2` a zero bit therefore decodes to the binary value 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("spins must be +1 or -1".into()));
        }
        Ok(Self(spins))
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|i| if index >> i & 1 == 0 { 1 } else { -1 }).collect())
    }

    pub fn from_binary(x: &[u8]) -> Self {
        Self(x.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect())
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_binary(&self) -> Vec<u8> {
        self.0.iter().map(|&s| u8::from(s > 0)).collect()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }

    /// Resolves the global-flip ambiguity of a quadratized model: if the
    /// ancilla spin is `−1` the remaining spins are flipped. Returns the
    /// binary assignment of all non-ancilla spins.
    pub fn decode_with_ancilla(&self, ancilla: usize) -> Vec<u8> {
        let sign = self.0[ancilla];
        self.0
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != ancilla)
            .map(|(_, &s)| u8::from(s * sign > 0))
            .collect()
    }
}

/// Ising Hamiltonian `Σ_{i<j} J_ij s_i s_j + Σ_i h_i s_i + offset`.
///
/// Couplings are stored once per unordered pair. `scale` records the energy
/// unit the model is expressed in: physical energies are `scale` times the
/// stored values.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    n: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    offset: f64,
    scale: f64,
    labels: Vec<String>,
}

impl IsingModel {
    pub fn new(n_spins: usize) -> Self {
        Self {
            n: n_spins,
            couplings: vec![0.0; n_spins * n_spins],
            fields: vec![0.0; n_spins],
            offset: 0.0,
            scale: 1.0,
            labels: Vec::new(),
        }
    }

    /// Builds a couplings-only model from an upper-triangular matrix given by rows.
    pub fn from_upper_triangular(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut model = Self::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if j <= i {
                    if v != 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "entry ({i}, {j}) is on or below the diagonal"
                        )));
                    }
                } else {
                    model.set_coupling(i, j, v);
                }
            }
        }
        Ok(model)
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b {
            0.0
        } else {
            self.couplings[a * self.n + b]
        }
    }

    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "self-coupling ({i}, {i}) is not an Ising term");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.couplings[a * self.n + b] = value;
    }

    /// Nonzero couplings as `(i, j, J_ij)` with `i < j`, in row-major order.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let v = self.couplings[i * self.n + j];
                (v.to_bits() != 0).then_some((i, j, v))
            })
        })
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn set_fields(&mut self, fields: Vec<f64>) -> Result<()> {
        if fields.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} fields for {} spins",
                fields.len(),
                self.n
            )));
        }
        self.fields = fields;
        Ok(())
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Result<Self> {
        self.set_fields(fields)?;
        Ok(self)
    }

    pub fn has_fields(&self) -> bool {
        self.fields.iter().any(|&h| h != 0.0)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn set_scale(&mut self, scale: f64) {
        self.scale = scale;
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if !labels.is_empty() && labels.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} labels for {} spins",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplings().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
    }

    /// Divides every energy by `max |J_ij|`; afterwards the largest coupling
    /// magnitude is exactly 1 and `scale` carries the removed factor.
    pub fn normalized(&self) -> Result<Self> {
        let j = self.max_abs_coupling();
        if j == 0.0 {
            return Err(Error::ZeroCouplings);
        }
        let mut out = self.clone();
        for v in &mut out.couplings {
            *v /= j;
        }
        for h in &mut out.fields {
            *h /= j;
        }
        out.offset /= j;
        out.scale = self.scale * j;
        Ok(out)
    }

    /// Multiplies couplings, fields and offset by `factor` (a new Hamiltonian,
    /// not a change of units).
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.couplings {
            *v *= factor;
        }
        for h in &mut out.fields {
            *h *= factor;
        }
        out.offset *= factor;
        out
    }

    /// Replaces local fields by couplings to a new ancilla spin at index 0:
    /// `h_i s_i → J_{a,i} s_a s_i` with `J_{a,i} = h_i`.
    pub fn quadratize_with_ancilla(&self) -> Self {
        let n = self.n + 1;
        let mut out = Self::new(n);
        for (i, &h) in self.fields.iter().enumerate() {
            if h != 0.0 {
                out.set_coupling(0, i + 1, h);
            }
        }
        for (i, j, v) in self.couplings() {
            out.set_coupling(i + 1, j + 1, v);
        }
        out.offset = self.offset;
        out.scale = self.scale;
        if !self.labels.is_empty() {
            out.labels = std::iter::once("ancilla".to_string())
                .chain(self.labels.iter().cloned())
                .collect();
        }
        out
    }

    /// Inverse of [`quadratize_with_ancilla`](Self::quadratize_with_ancilla):
    /// fixes the ancilla to `+1` and turns its couplings back into fields.
    pub fn eliminate_ancilla(&self, ancilla: usize) -> Result<Self> {
        if ancilla >= self.n {
            return Err(Error::Dimension(format!(
                "ancilla {ancilla} out of range for {} spins",
                self.n
            )));
        }
        let map = |i: usize| if i < ancilla { i } else { i - 1 };
        let mut out = Self::new(self.n - 1);
        let mut fields = vec![0.0; self.n - 1];
        for i in (0..self.n).filter(|&i| i != ancilla) {
            fields[map(i)] = self.fields[i] + self.coupling(ancilla, i);
        }
        for (i, j, v) in self.couplings() {
            if i != ancilla && j != ancilla {
                out.set_coupling(map(i), map(j), v);
            }
        }
        out.fields = fields;
        out.offset = self.offset + self.fields[ancilla];
        out.scale = self.scale;
        if !self.labels.is_empty() {
            out.labels = self
                .labels
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ancilla)
                .map(|(_, l)| l.clone())
                .collect();
        }
        Ok(out)
    }

    pub fn energy(&self, s: &SpinConfiguration) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::Dimension(format!(
                "configuration has {} spins, model has {}",
                s.len(),
                self.n
            )));
        }
        let spins = s.spins();
        let mut e = self.offset;
        for i in 0..self.n {
            let si = f64::from(spins[i]);
            e += self.fields[i] * si;
            for j in (i + 1)..self.n {
                e += self.couplings[i * self.n + j] * si * f64::from(spins[j]);
            }
        }
        Ok(e)
    }

    /// Local field `h_k + Σ_j J_kj s_j` felt by spin `k`.
    pub(crate) fn local_field(&self, k: usize, spins: &[f64]) -> f64 {
        let mut f = self.fields[k];
        for (j, &sj) in spins.iter().enumerate() {
            if j != k {
                f += self.coupling(k, j) * sj;
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for idx in 0..32 {
            assert_eq!(SpinConfiguration::from_index(idx, 5).index(), idx);
        }
        let s = SpinConfiguration::from_index(0b101, 3);
        assert_eq!(s.spins(), &[-1, 1, -1]);
        assert_eq!(s.to_binary(), vec![0, 1, 0]);
    }

    #[test]
    fn energy_basics() {
        let zero = IsingModel::new(3);
        let s = SpinConfiguration::from_index(5, 3);
        assert_eq!(zero.energy(&s).unwrap(), 0.0);

        let mut ferro = IsingModel::new(2);
        ferro.set_coupling(0, 1, -1.0);
        let up = SpinConfiguration::new(vec![1, 1]).unwrap();
        assert_eq!(ferro.energy(&up).unwrap(), -1.0);
        assert!(ferro.energy(&SpinConfiguration::from_index(0, 3)).is_err());
    }

    #[test]
    fn normalization_hits_one_exactly() {
        let mut m = IsingModel::new(3);
        m.set_coupling(0, 1, 1.25);
        m.set_coupling(1, 2, -0.3);
        m.set_fields(vec![0.1, -2.0, 0.0]).unwrap();
        let n = m.normalized().unwrap();
        assert_eq!(n.max_abs_coupling(), 1.0);
        assert_eq!(n.scale(), 1.25);
        assert!(IsingModel::new(2).normalized().is_err());
    }

    #[test]
    fn ancilla_round_trip() {
        let mut m = IsingModel::new(2);
        m.set_coupling(0, 1, 0.5);
        m.set_fields(vec![-0.25, 0.75]).unwrap();
        let q = m.quadratize_with_ancilla();
        assert_eq!(q.n_spins(), 3);
        assert!(!q.has_fields());
        assert_eq!(q.coupling(0, 1), -0.25);
        assert_eq!(q.coupling(0, 2), 0.75);
        assert_eq!(q.coupling(1, 2), 0.5);
        let back = q.eliminate_ancilla(0).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn decode_resolves_flip() {
        let s = SpinConfiguration::new(vec![-1, -1, 1]).unwrap();
        assert_eq!(s.decode_with_ancilla(0), vec![1, 0]);
        assert_eq!(s.flipped().decode_with_ancilla(0), vec![1, 0]);
    }

    #[test]
    fn upper_triangular_rejects_lower_entries() {
        assert!(IsingModel::from_upper_triangular(&[&[0.0, 1.0], &[1.0, 0.0]]).is_err());
        assert!(IsingModel::from_upper_triangular(&[&[0.0, 1.0], &[0.0]]).is_err());
    }
}
