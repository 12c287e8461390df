//! Multiple-object-tracking assignment QUBOs.
//!
//! Variables are laid out frame by frame over the free frames (the first
//! video frame is fixed to break the track-label symmetry). Within a frame,
//! variable `k·T + l` is 1 iff detection `k` belongs to track `l`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{LinearConstraints, QuboProblem};

/// Similarity between a detection in one free frame and a detection in a later one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionLink {
    pub frame_a: usize,
    pub detection_a: usize,
    pub frame_b: usize,
    pub detection_b: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotSpec {
    pub tracks: usize,
    pub detections_per_frame: usize,
    pub free_frames: usize,
    /// Binary assignment of the fixed first frame, length `D·T`.
    pub fixed_assignment: Vec<u8>,
    /// Diagonal objective per free variable (similarity to the fixed frame),
    /// length `free_frames · D · T`.
    pub objective_weights: Vec<f64>,
    /// Frame-to-frame similarities between free frames.
    #[serde(default)]
    pub links: Vec<DetectionLink>,
    #[serde(default = "default_rescale")]
    pub offdiag_rescale: f64,
    #[serde(default = "default_gap")]
    pub max_frame_gap: usize,
    pub penalty: f64,
}

fn default_rescale() -> f64 {
    1.0
}

fn default_gap() -> usize {
    2
}

impl MotSpec {
    pub fn vars_per_frame(&self) -> usize {
        self.tracks * self.detections_per_frame
    }

    pub fn n_vars(&self) -> usize {
        self.free_frames * self.vars_per_frame()
    }

    pub fn var_index(&self, frame: usize, detection: usize, track: usize) -> usize {
        frame * self.vars_per_frame() + detection * self.tracks + track
    }

    pub fn validate(&self) -> Result<()> {
        if self.tracks == 0 || self.detections_per_frame == 0 {
            return Err(Error::InvalidParameter(
                "tracking needs at least one track and one detection".into(),
            ));
        }
        if self.free_frames == 0 {
            return Err(Error::InvalidParameter(
                "tracking needs at least one free frame".into(),
            ));
        }
        if !(self.penalty.is_finite() && self.penalty >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "penalty must be finite and non-negative, got {}",
                self.penalty
            )));
        }
        if self.fixed_assignment.len() != self.vars_per_frame() {
            return Err(Error::Dimension(format!(
                "fixed assignment has {} entries, expected {}",
                self.fixed_assignment.len(),
                self.vars_per_frame()
            )));
        }
        let (a, b) = frame_constraints(self.tracks, self.detections_per_frame);
        let x = &self.fixed_assignment;
        for r in 0..a.nrows() {
            let lhs: f64 = (0..a.ncols()).map(|c| a[(r, c)] * f64::from(x[c])).sum();
            if lhs != b[r] {
                return Err(Error::InvalidParameter(
                    "fixed assignment violates the one-track-per-detection / one-detection-per-track constraints".into(),
                ));
            }
        }
        if self.objective_weights.len() != self.n_vars() {
            return Err(Error::Dimension(format!(
                "{} objective weights for {} variables",
                self.objective_weights.len(),
                self.n_vars()
            )));
        }
        if self.objective_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("objective weights must be finite".into()));
        }
        for link in &self.links {
            if link.frame_a >= self.free_frames
                || link.frame_b >= self.free_frames
                || link.frame_a >= link.frame_b
                || link.detection_a >= self.detections_per_frame
                || link.detection_b >= self.detections_per_frame
                || !link.weight.is_finite()
            {
                return Err(Error::InvalidParameter(format!("invalid detection link {link:?}")));
            }
        }
        Ok(())
    }
}

fn frame_constraints(tracks: usize, detections: usize) -> (DMatrix<f64>, DVector<f64>) {
    let cols = tracks * detections;
    let rows = detections + tracks;
    let mut a = DMatrix::zeros(rows, cols);
    for k in 0..detections {
        for l in 0..tracks {
            a[(k, k * tracks + l)] = 1.0;
            a[(detections + l, k * tracks + l)] = 1.0;
        }
    }
    (a, DVector::from_element(rows, 1.0))
}

/// Assignment constraints over the free frames: per frame, one row per
/// detection then one row per track, stacked block-diagonally.
pub fn mot_constraints(spec: &MotSpec) -> Result<LinearConstraints> {
    spec.validate()?;
    let (block, rhs) = frame_constraints(spec.tracks, spec.detections_per_frame);
    let (br, bc) = block.shape();
    let mut a = DMatrix::zeros(br * spec.free_frames, bc * spec.free_frames);
    let mut b = DVector::zeros(br * spec.free_frames);
    for f in 0..spec.free_frames {
        a.view_mut((f * br, f * bc), (br, bc)).copy_from(&block);
        b.rows_mut(f * br, br).copy_from(&rhs);
    }
    LinearConstraints::new(a, b)
}

/// Builds the penalized tracking QUBO. Frame links couple `(f₁, k₁, l)` to
/// `(f₂, k₂, l)` for every track `l`, scaled by `offdiag_rescale`; links
/// spanning more than `max_frame_gap` frames are dropped.
pub fn build_mot(spec: &MotSpec) -> Result<QuboProblem> {
    let constraints = mot_constraints(spec)?;
    let n = spec.n_vars();
    let mut w = DMatrix::from_diagonal(&DVector::from_column_slice(&spec.objective_weights));
    for link in &spec.links {
        if link.frame_b - link.frame_a > spec.max_frame_gap {
            continue;
        }
        for l in 0..spec.tracks {
            let p = spec.var_index(link.frame_a, link.detection_a, l);
            let q = spec.var_index(link.frame_b, link.detection_b, l);
            w[(p.min(q), p.max(q))] += spec.offdiag_rescale * link.weight;
        }
    }
    debug_assert_eq!(w.nrows(), n);
    QuboProblem::new(w)?
        .with_constraints(constraints)?
        .with_penalty(spec.penalty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(tracks: usize, dets: usize, frames: usize) -> MotSpec {
        let mut fixed = vec![0; tracks * dets];
        for k in 0..dets.min(tracks) {
            fixed[k * tracks + k] = 1;
        }
        MotSpec {
            tracks,
            detections_per_frame: dets,
            free_frames: frames,
            fixed_assignment: fixed,
            objective_weights: vec![0.0; frames * tracks * dets],
            links: vec![],
            offdiag_rescale: 1.0,
            max_frame_gap: 2,
            penalty: 1.0,
        }
    }

    #[test]
    fn two_by_two_constraints() {
        let c = mot_constraints(&spec(2, 2, 1)).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 1.0, //
                1.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 1.0,
            ],
        );
        assert_eq!(c.a, expected);
        assert_eq!(c.b, DVector::from_element(4, 1.0));
    }

    #[test]
    fn single_track_single_detection() {
        let c = mot_constraints(&spec(1, 1, 1)).unwrap();
        // one detection row and one track row, both equal to (1)
        assert_eq!(c.a.ncols(), 1);
        assert!(c.a.iter().all(|&v| v == 1.0));
        assert!(c.b.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn two_free_frames_block_diagonal() {
        let s = spec(2, 2, 2);
        let c = mot_constraints(&s).unwrap();
        assert_eq!(c.a.shape(), (8, 8));
        for r in 0..8 {
            let row_sum: f64 = c.a.row(r).sum();
            // detection rows sum over T tracks, track rows over D detections
            assert_eq!(row_sum, 2.0);
            let frame = r / 4;
            for col in 0..8 {
                if c.a[(r, col)] != 0.0 {
                    assert_eq!(col / 4, frame, "row {r} leaks into another frame");
                }
            }
        }
    }

    #[test]
    fn zero_weights_and_penalty_give_zero_qubo() {
        let mut s = spec(2, 2, 1);
        s.penalty = 0.0;
        let q = build_mot(&s).unwrap();
        let folded = crate::ising::penalty_fold(&q).unwrap();
        assert!(folded.matrix.iter().all(|&v| v == 0.0));
        assert_eq!(folded.offset, 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(2, 2, 1);
        s.free_frames = 0;
        assert!(build_mot(&s).is_err());

        let mut s = spec(2, 2, 1);
        s.objective_weights.pop();
        assert!(matches!(build_mot(&s), Err(Error::Dimension(_))));

        let mut s = spec(2, 2, 1);
        s.fixed_assignment = vec![1, 1, 0, 0];
        assert!(build_mot(&s).is_err());
    }

    #[test]
    fn links_respect_gap_and_rescale() {
        let mut s = spec(2, 2, 3);
        s.offdiag_rescale = 0.5;
        s.max_frame_gap = 1;
        s.links = vec![
            DetectionLink { frame_a: 0, detection_a: 1, frame_b: 1, detection_b: 0, weight: -2.0 },
            DetectionLink { frame_a: 0, detection_a: 0, frame_b: 2, detection_b: 0, weight: -4.0 },
        ];
        let q = build_mot(&s).unwrap();
        let w = q.objective();
        // (frame0, det1, track l) -> (frame1, det0, track l)
        assert_eq!(w[(2, 4)], -1.0);
        assert_eq!(w[(3, 5)], -1.0);
        // gap of two frames is beyond max_frame_gap
        assert_eq!(w[(0, 8)], 0.0);
    }
}
