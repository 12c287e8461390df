use nalgebra::{DMatrix, DVector};

use super::IsingModel;
use crate::error::{Error, Result};

/// Linear equality system `A x = b` over binary variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraints {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LinearConstraints {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension(format!(
                "constraint matrix has {} rows but b has {} entries",
                a.nrows(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    /// `‖A x − b‖²` for a binary assignment.
    pub fn violation(&self, x: &[u8]) -> f64 {
        (0..self.a.nrows())
            .map(|r| {
                let lhs: f64 = (0..self.a.ncols())
                    .map(|c| self.a[(r, c)] * f64::from(x[c]))
                    .sum();
                (lhs - self.b[r]).powi(2)
            })
            .sum()
    }

    pub fn is_satisfied(&self, x: &[u8]) -> bool {
        self.violation(x) < 1e-12
    }
}

/// A constrained binary quadratic program, `min xᵀWx + λ‖Ax − b‖² + Σ w_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    objective: DMatrix<f64>,
    constraints: Option<LinearConstraints>,
    penalty: f64,
    product_penalties: Vec<(usize, usize, f64)>,
}

impl QuboProblem {
    pub fn new(objective: DMatrix<f64>) -> Result<Self> {
        if !objective.is_square() {
            return Err(Error::Dimension(format!(
                "objective must be square, got {}x{}",
                objective.nrows(),
                objective.ncols()
            )));
        }
        Ok(Self {
            objective,
            constraints: None,
            penalty: 0.0,
            product_penalties: Vec::new(),
        })
    }

    pub fn zeros(n_vars: usize) -> Self {
        Self::new(DMatrix::zeros(n_vars, n_vars)).expect("square by construction")
    }

    pub fn with_constraints(mut self, constraints: LinearConstraints) -> Result<Self> {
        if constraints.a.ncols() != self.n_vars() {
            return Err(Error::Dimension(format!(
                "constraint matrix has {} columns, expected {}",
                constraints.a.ncols(),
                self.n_vars()
            )));
        }
        self.constraints = Some(constraints);
        Ok(self)
    }

    pub fn with_penalty(mut self, penalty: f64) -> Result<Self> {
        if !(penalty.is_finite() && penalty >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "penalty must be finite and non-negative, got {penalty}"
            )));
        }
        self.penalty = penalty;
        Ok(self)
    }

    /// Adds `weight · x_i x_j` directly to the quadratic form.
    pub fn with_product_penalty(mut self, i: usize, j: usize, weight: f64) -> Result<Self> {
        let n = self.n_vars();
        if i >= n || j >= n || i == j {
            return Err(Error::Dimension(format!(
                "product penalty ({i}, {j}) invalid for {n} variables"
            )));
        }
        self.product_penalties.push((i, j, weight));
        Ok(self)
    }

    pub fn n_vars(&self) -> usize {
        self.objective.nrows()
    }

    pub fn objective(&self) -> &DMatrix<f64> {
        &self.objective
    }

    pub fn constraints(&self) -> Option<&LinearConstraints> {
        self.constraints.as_ref()
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn product_penalties(&self) -> &[(usize, usize, f64)] {
        &self.product_penalties
    }

    /// Direct evaluation of the penalized objective; independent of the folding path.
    pub fn evaluate(&self, x: &[u8]) -> f64 {
        let n = self.n_vars();
        let mut value = 0.0;
        for i in 0..n {
            for j in 0..n {
                value += self.objective[(i, j)] * f64::from(x[i]) * f64::from(x[j]);
            }
        }
        if let Some(c) = &self.constraints {
            value += self.penalty * c.violation(x);
        }
        for &(i, j, w) in &self.product_penalties {
            value += w * f64::from(x[i]) * f64::from(x[j]);
        }
        value
    }
}

/// Penalty-folded QUBO matrix plus the constant `λ bᵀb` it drops.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldedQubo {
    pub matrix: DMatrix<f64>,
    pub offset: f64,
}

impl FoldedQubo {
    pub fn evaluate(&self, x: &[u8]) -> f64 {
        let n = self.matrix.nrows();
        let mut value = self.offset;
        for i in 0..n {
            for j in 0..n {
                value += self.matrix[(i, j)] * f64::from(x[i]) * f64::from(x[j]);
            }
        }
        value
    }
}

/// Folds constraints and product penalties into one matrix:
/// `Q = W + λ(AᵀA − diag(Aᵀb + bᵀA)) + Σ w_ij e_i e_jᵀ`.
pub fn penalty_fold(qubo: &QuboProblem) -> Result<FoldedQubo> {
    if !qubo.penalty.is_finite() {
        return Err(Error::InvalidParameter("penalty must be finite".into()));
    }
    let mut matrix = qubo.objective.clone();
    let mut offset = 0.0;
    if let Some(c) = &qubo.constraints {
        if qubo.penalty != 0.0 {
            let ata = c.a.transpose() * &c.a;
            let atb = c.a.transpose() * &c.b;
            matrix += qubo.penalty * ata;
            for i in 0..matrix.nrows() {
                // x_i² = x_i, so the linear term lands on the diagonal
                matrix[(i, i)] -= qubo.penalty * 2.0 * atb[i];
            }
            offset += qubo.penalty * c.b.dot(&c.b);
        }
    }
    for &(i, j, w) in &qubo.product_penalties {
        matrix[(i, j)] += w;
    }
    Ok(FoldedQubo { matrix, offset })
}

/// Substitutes `x_i = (1 + s_i)/2` into `xᵀQx + offset`.
pub fn qubo_to_ising(q: &DMatrix<f64>, offset: f64) -> Result<IsingModel> {
    if !q.is_square() {
        return Err(Error::Dimension(format!(
            "QUBO matrix must be square, got {}x{}",
            q.nrows(),
            q.ncols()
        )));
    }
    let n = q.nrows();
    let mut model = IsingModel::new(n);
    let mut fields = vec![0.0; n];
    let mut constant = offset;
    for i in 0..n {
        fields[i] += q[(i, i)] / 2.0;
        constant += q[(i, i)] / 2.0;
        for j in (i + 1)..n {
            let w = q[(i, j)] + q[(j, i)];
            if w != 0.0 {
                model.set_coupling(i, j, w / 4.0);
                fields[i] += w / 4.0;
                fields[j] += w / 4.0;
                constant += w / 4.0;
            }
        }
    }
    model.set_fields(fields)?;
    model.set_offset(constant);
    Ok(model)
}

/// Full chain: fold penalties, convert to spins, absorb fields into an ancilla, normalize.
pub fn encode_couplings_only(qubo: &QuboProblem) -> Result<IsingModel> {
    let folded = penalty_fold(qubo)?;
    qubo_to_ising(&folded.matrix, folded.offset)?
        .quadratize_with_ancilla()
        .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::SpinConfiguration;

    fn row(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, values.len(), values)
    }

    #[test]
    fn fold_single_bar_constraint() {
        let qubo = QuboProblem::zeros(4)
            .with_constraints(
                LinearConstraints::new(row(&[1.0, 1.0, 1.0, 2.0]), DVector::from_element(1, 3.0))
                    .unwrap(),
            )
            .unwrap()
            .with_penalty(1.0)
            .unwrap();
        let folded = penalty_fold(&qubo).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                -5.0, 1.0, 1.0, 2.0, //
                1.0, -5.0, 1.0, 2.0, //
                1.0, 1.0, -5.0, 2.0, //
                2.0, 2.0, 2.0, -8.0,
            ],
        );
        assert_eq!(folded.matrix, expected);
        assert_eq!(folded.offset, 9.0);
    }

    #[test]
    fn fold_five_column_constraint_first_row() {
        let qubo = QuboProblem::zeros(5)
            .with_constraints(
                LinearConstraints::new(
                    row(&[2.0, 2.0, 1.0, 2.0, 4.0]),
                    DVector::from_element(1, 4.0),
                )
                .unwrap(),
            )
            .unwrap()
            .with_penalty(1.0)
            .unwrap();
        let folded = penalty_fold(&qubo).unwrap();
        let first: Vec<f64> = folded.matrix.row(0).iter().copied().collect();
        assert_eq!(first, vec![-12.0, 4.0, 2.0, 4.0, 8.0]);
        assert_eq!(folded.matrix[(2, 2)], -7.0);
        assert_eq!(folded.matrix[(4, 4)], -16.0);
    }

    #[test]
    fn zero_penalty_returns_objective() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -2.0]);
        let qubo = QuboProblem::new(w.clone())
            .unwrap()
            .with_constraints(
                LinearConstraints::new(row(&[3.0, 1.0]), DVector::from_element(1, 7.0)).unwrap(),
            )
            .unwrap();
        let folded = penalty_fold(&qubo).unwrap();
        assert_eq!(folded.matrix, w);
        assert_eq!(folded.offset, 0.0);
    }

    #[test]
    fn mismatched_constraints_rejected() {
        let err = LinearConstraints::new(DMatrix::zeros(2, 3), DVector::zeros(1));
        assert!(matches!(err, Err(Error::Dimension(_))));
        let err = QuboProblem::zeros(4).with_constraints(
            LinearConstraints::new(DMatrix::zeros(1, 3), DVector::zeros(1)).unwrap(),
        );
        assert!(matches!(err, Err(Error::Dimension(_))));
        assert!(QuboProblem::new(DMatrix::zeros(2, 3)).is_err());
        assert!(QuboProblem::zeros(2).with_penalty(-1.0).is_err());
    }

    #[test]
    fn single_variable_conversion() {
        let q = DMatrix::from_element(1, 1, 3.0);
        let model = qubo_to_ising(&q, 0.0).unwrap();
        assert_eq!(model.fields(), &[1.5]);
        assert_eq!(model.offset(), 1.5);
        assert_eq!(model.couplings().count(), 0);
    }

    #[test]
    fn zero_matrix_gives_zero_model() {
        let model = qubo_to_ising(&DMatrix::zeros(3, 3), 0.0).unwrap();
        assert!(model.fields().iter().all(|&h| h == 0.0));
        assert_eq!(model.couplings().count(), 0);
        assert_eq!(model.offset(), 0.0);
    }

    #[test]
    fn non_square_rejected() {
        assert!(qubo_to_ising(&DMatrix::zeros(2, 3), 0.0).is_err());
    }

    #[test]
    fn asymmetric_entries_are_summed() {
        let q = DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 1.0, 0.0]);
        let model = qubo_to_ising(&q, 0.0).unwrap();
        assert_eq!(model.coupling(0, 1), 1.0);
        for idx in 0..4 {
            let s = SpinConfiguration::from_index(idx, 2);
            let x = s.to_binary();
            let direct = FoldedQubo {
                matrix: q.clone(),
                offset: 0.0,
            }
            .evaluate(&x);
            assert!((model.energy(&s).unwrap() - direct).abs() < 1e-12);
        }
    }
}
