//! One-dimensional cutting stock as a QUBO.
//!
//! Variable layout: all assignment bits `x_{i,k}` (piece-major, then bar),
//! followed by the slack bits of each bar's length constraint, followed by
//! demand slack bits when [`DemandEncoding::AggregatedSlack`] is used.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{LinearConstraints, QuboProblem};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandEncoding {
    /// Every demanded piece becomes its own unit-demand piece; "at most one
    /// bar per piece" is enforced with pairwise product penalties.
    #[default]
    UnitPieces,
    /// Keeps piece types and enforces `Σ_k x_{i,k} ≤ d_i` with
    /// `1 + ⌊log₂ d_i⌋` slack bits per type.
    AggregatedSlack,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutStockSpec {
    pub bar_length: u64,
    pub piece_lengths: Vec<u64>,
    pub demands: Vec<u64>,
    pub n_bars: usize,
    pub penalty: f64,
    #[serde(default)]
    pub demand_encoding: DemandEncoding,
}

/// Role of each QUBO variable, for decoding solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutVariable {
    Assignment { piece: usize, bar: usize, length: u64 },
    LengthSlack { bar: usize, bit: u32 },
    DemandSlack { piece: usize, bit: u32 },
}

#[derive(Clone, Debug)]
pub struct CutStockQubo {
    pub qubo: QuboProblem,
    pub variables: Vec<CutVariable>,
}

impl CutStockQubo {
    pub fn labels(&self) -> Vec<String> {
        self.variables
            .iter()
            .map(|v| match v {
                CutVariable::Assignment { piece, bar, .. } => format!("x_{piece}_{bar}"),
                CutVariable::LengthSlack { bar, bit } => format!("slack_{bar}_{bit}"),
                CutVariable::DemandSlack { piece, bit } => format!("demand_slack_{piece}_{bit}"),
            })
            .collect()
    }
}

/// Number of bits `1 + ⌊log₂ v⌋` needed to represent `0..=v`.
pub fn slack_bits(v: u64) -> u32 {
    assert!(v > 0);
    64 - v.leading_zeros()
}

impl CutStockSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bar_length == 0 || self.n_bars == 0 {
            return Err(Error::InvalidParameter("need a positive bar length and at least one bar".into()));
        }
        if self.piece_lengths.is_empty() || self.piece_lengths.len() != self.demands.len() {
            return Err(Error::Dimension(format!(
                "{} piece lengths but {} demands",
                self.piece_lengths.len(),
                self.demands.len()
            )));
        }
        if let Some(&piece) = self.piece_lengths.iter().find(|&&l| l > self.bar_length) {
            return Err(Error::PieceTooLong {
                piece,
                bar: self.bar_length,
            });
        }
        if self.piece_lengths.contains(&0) || self.demands.contains(&0) {
            return Err(Error::InvalidParameter("lengths and demands must be positive".into()));
        }
        if !(self.penalty.is_finite() && self.penalty >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "penalty must be finite and non-negative, got {}",
                self.penalty
            )));
        }
        Ok(())
    }

    /// Piece lengths after demand expansion (or the types themselves for the
    /// aggregated encoding).
    fn pieces(&self) -> Vec<u64> {
        match self.demand_encoding {
            DemandEncoding::UnitPieces => self
                .piece_lengths
                .iter()
                .zip(&self.demands)
                .flat_map(|(&l, &d)| std::iter::repeat_n(l, d as usize))
                .collect(),
            DemandEncoding::AggregatedSlack => self.piece_lengths.clone(),
        }
    }
}

pub fn build_cutting_stock(spec: &CutStockSpec) -> Result<CutStockQubo> {
    spec.validate()?;
    let pieces = spec.pieces();
    let bars = spec.n_bars;
    let bar_bits = slack_bits(spec.bar_length);

    let mut variables = Vec::new();
    for (piece, &length) in pieces.iter().enumerate() {
        for bar in 0..bars {
            variables.push(CutVariable::Assignment { piece, bar, length });
        }
    }
    for bar in 0..bars {
        for bit in 0..bar_bits {
            variables.push(CutVariable::LengthSlack { bar, bit });
        }
    }
    if spec.demand_encoding == DemandEncoding::AggregatedSlack {
        for (piece, &d) in spec.demands.iter().enumerate() {
            for bit in 0..slack_bits(d) {
                variables.push(CutVariable::DemandSlack { piece, bit });
            }
        }
    }
    let n = variables.len();
    let assign = |piece: usize, bar: usize| piece * bars + bar;

    // maximize cut length == minimize -Σ l x
    let mut objective = DMatrix::zeros(n, n);
    for (i, v) in variables.iter().enumerate() {
        if let CutVariable::Assignment { length, .. } = v {
            objective[(i, i)] = -(*length as f64);
        }
    }

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for bar in 0..bars {
        let mut row = vec![0.0; n];
        for (piece, &length) in pieces.iter().enumerate() {
            row[assign(piece, bar)] = length as f64;
        }
        for (i, v) in variables.iter().enumerate() {
            if let CutVariable::LengthSlack { bar: b, bit } = v {
                if *b == bar {
                    row[i] = f64::from(1u32 << bit);
                }
            }
        }
        rows.push((row, spec.bar_length as f64));
    }
    if spec.demand_encoding == DemandEncoding::AggregatedSlack {
        for (piece, &d) in spec.demands.iter().enumerate() {
            let mut row = vec![0.0; n];
            for bar in 0..bars {
                row[assign(piece, bar)] = 1.0;
            }
            for (i, v) in variables.iter().enumerate() {
                if let CutVariable::DemandSlack { piece: p, bit } = v {
                    if *p == piece {
                        row[i] = f64::from(1u32 << bit);
                    }
                }
            }
            rows.push((row, d as f64));
        }
    }
    let a = DMatrix::from_fn(rows.len(), n, |r, c| rows[r].0[c]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));

    let mut qubo = QuboProblem::new(objective)?
        .with_constraints(LinearConstraints::new(a, b)?)?
        .with_penalty(spec.penalty)?;
    if spec.demand_encoding == DemandEncoding::UnitPieces {
        for piece in 0..pieces.len() {
            for k1 in 0..bars {
                for k2 in (k1 + 1)..bars {
                    qubo = qubo.with_product_penalty(assign(piece, k1), assign(piece, k2), spec.penalty)?;
                }
            }
        }
    }
    Ok(CutStockQubo { qubo, variables })
}
