//! Printed benchmark matrices and the builder specs that reproduce them.

use serde::Serialize;

use super::cutstock::{build_cutting_stock, CutStockSpec, DemandEncoding};
use super::mot::{build_mot, DetectionLink, MotSpec};
use crate::error::{Error, Result};
use crate::ising::{encode_couplings_only, IsingModel};

pub const FIXTURE_NAMES: [&str; 4] = ["mot5", "mot9", "cut5", "cut6"];

/// Default run parameters that accompany each benchmark matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub penalty: f64,
    /// Transverse field in units of J.
    pub hx: f64,
    /// Sweep duration in units of 1/J.
    pub duration: f64,
    /// Coupling scale J in Hz that maps `duration` onto lab time.
    pub j_hz: f64,
}

impl FixtureInfo {
    pub fn physical_duration_s(&self) -> f64 {
        self.duration / self.j_hz
    }
}

const MOT5: [[f64; 5]; 5] = [
    [0.0, -0.87, -0.38, -0.23, -0.91],
    [0.0, 0.0, 1.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 0.0],
];

const MOT9: [[f64; 9]; 9] = [
    [0.0, -0.96, -0.55, -0.43, -0.99, -0.84, -0.89, -0.38, -0.97],
    [0.0, 0.0, 1.0, 1.0, 0.0, -0.19, 0.0, -0.04, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -0.19, 0.0, -0.04],
    [0.0, 0.0, 0.0, 0.0, 1.0, -0.05, 0.0, -0.18, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.05, 0.0, -0.18],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0; 9],
];

const CUT5: [[f64; 5]; 5] = [
    [0.0, -1.0, -1.0, -0.5, -1.0],
    [0.0, 0.0, 0.5, 0.5, 1.0],
    [0.0, 0.0, 0.0, 0.5, 1.0],
    [0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0; 5],
];

const CUT6: [[f64; 6]; 6] = [
    [0.0, 0.33, 0.33, 0.25, 0.5, 1.0],
    [0.0, 0.0, 0.33, 1.67, 0.33, 0.67],
    [0.0, 0.0, 0.0, 1.67, 0.33, 0.67],
    [0.0, 0.0, 0.0, 0.0, 1.67, 0.33],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.67],
    [0.0; 6],
];

fn from_rows<const N: usize>(rows: &[[f64; N]; N]) -> IsingModel {
    let slices: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    IsingModel::from_upper_triangular(&slices).expect("fixture matrices are upper triangular")
}

/// The benchmark matrix exactly as printed (two-decimal values, already in units of J).
pub fn printed_fixture(name: &str) -> Result<IsingModel> {
    let model = match name {
        "mot5" => from_rows(&MOT5),
        "mot9" => from_rows(&MOT9),
        "cut5" => from_rows(&CUT5),
        "cut6" => from_rows(&CUT6),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Ok(model)
}

pub fn fixture_info(name: &str) -> Result<FixtureInfo> {
    let info = match name {
        "mot5" => FixtureInfo {
            name: "mot5",
            description: "two tracks, two detections, one free frame, plus ancilla",
            penalty: 2.5,
            hx: 3.0,
            duration: 2.6,
            j_hz: 26.0,
        },
        "mot9" => FixtureInfo {
            name: "mot9",
            description: "two tracks, two detections, two free frames, plus ancilla",
            penalty: 3.0,
            hx: 2.0,
            duration: 2.6,
            j_hz: 26.0,
        },
        "cut5" => FixtureInfo {
            name: "cut5",
            description: "bar length 3, pieces (1, 1), plus ancilla",
            penalty: 1.0,
            hx: 2.0,
            duration: 26.0,
            j_hz: 260.0,
        },
        "cut6" => FixtureInfo {
            name: "cut6",
            description: "bar length 4, pieces (2, 2), plus ancilla",
            penalty: 1.0,
            hx: 2.0,
            duration: 26.0,
            j_hz: 260.0,
        },
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Ok(info)
}

pub fn mot5_spec() -> MotSpec {
    MotSpec {
        tracks: 2,
        detections_per_frame: 2,
        free_frames: 1,
        fixed_assignment: vec![1, 0, 0, 1],
        // the last weight is quoted as ≈ −2.26; −2.264 is the value
        // consistent with the printed ancilla coupling −0.91
        objective_weights: vec![-2.18, -0.95, -0.58, -2.264],
        links: vec![],
        offdiag_rescale: 1.0,
        max_frame_gap: 2,
        penalty: 2.5,
    }
}

/// Two free frames. Per-detection weights are back-solved from the printed
/// 9×9 matrix; each link is applied to every track.
pub fn mot9_spec() -> MotSpec {
    let link = |da, db, weight| DetectionLink {
        frame_a: 0,
        detection_a: da,
        frame_b: 1,
        detection_b: db,
        weight,
    };
    MotSpec {
        tracks: 2,
        detections_per_frame: 2,
        free_frames: 2,
        fixed_assignment: vec![1, 0, 0, 1],
        objective_weights: vec![-2.19, -0.96, -0.60, -2.28, -1.80, -1.95, -0.48, -2.25],
        links: vec![
            link(0, 0, -2.28),
            link(0, 1, -0.48),
            link(1, 0, -0.60),
            link(1, 1, -2.16),
        ],
        offdiag_rescale: 0.5,
        max_frame_gap: 2,
        penalty: 3.0,
    }
}

pub fn cut5_spec() -> CutStockSpec {
    CutStockSpec {
        bar_length: 3,
        piece_lengths: vec![1, 1],
        demands: vec![1, 1],
        n_bars: 1,
        penalty: 1.0,
        demand_encoding: DemandEncoding::UnitPieces,
    }
}

pub fn cut6_spec() -> CutStockSpec {
    CutStockSpec {
        bar_length: 4,
        piece_lengths: vec![2, 2],
        demands: vec![1, 1],
        n_bars: 1,
        penalty: 1.0,
        demand_encoding: DemandEncoding::UnitPieces,
    }
}

/// Runs the builder chain (fold, spins, ancilla, normalize) for a preset.
pub fn build_preset(name: &str) -> Result<IsingModel> {
    match name {
        "mot5" | "mot9" => {
            let spec = if name == "mot5" { mot5_spec() } else { mot9_spec() };
            let labels = std::iter::once("ancilla".to_string()).chain((0..spec.free_frames).flat_map(|f| {
                    (0..spec.detections_per_frame).flat_map(move |k| {
                        (0..spec.tracks).map(move |l| format!("x_f{f}_d{k}_t{l}"))
                    })
                }));
            let qubo = build_mot(&spec)?;
            encode_couplings_only(&qubo)?.with_labels(labels.collect())
        }
        "cut5" | "cut6" => {
            let spec = if name == "cut5" { cut5_spec() } else { cut6_spec() };
            let built = build_cutting_stock(&spec)?;
            let labels = built.labels();
            encode_couplings_only(&built.qubo)?
                .with_labels(std::iter::once("ancilla".to_string()).chain(labels).collect())
        }
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// Largest per-entry coupling difference between two models after optionally
/// flipping the sign convention of individual spins (`s_i → −s_i` negates
/// row and column `i`). Returns the best deviation and the flip mask used.
pub fn gauge_deviation(a: &IsingModel, b: &IsingModel) -> Result<(f64, usize)> {
    let n = a.n_spins();
    if b.n_spins() != n {
        return Err(Error::Dimension(format!(
            "models have {} and {} spins",
            n,
            b.n_spins()
        )));
    }
    if n > 20 {
        return Err(Error::TooManySpins { n, limit: 20 });
    }
    let mut best = (f64::INFINITY, 0);
    // mask and its complement are the same gauge, so the top bit can stay clear
    for mask in 0..(1usize << n.saturating_sub(1)) {
        let sign = |i: usize| if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (a.coupling(i, j) * sign(i) * sign(j) - b.coupling(i, j)).abs();
                worst = worst.max(d);
            }
        }
        if worst < best.0 {
            best = (worst, mask);
        }
    }
    Ok(best)
}
