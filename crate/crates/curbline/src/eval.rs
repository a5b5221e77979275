//! Evaluation: BEV pixel metrics with a pixel tolerance, 3D polyline metrics
//! via arc-length sampling and Euclidean matching, and a pixel-wise binary
//! cross-entropy score for probability masks.
//!
//! Matching is tolerance-threshold, not one-to-one assignment, and both
//! metrics use the same empty-set conventions: precision is 1 with no
//! predictions, recall is 1 with no ground truth, so comparing two empty
//! sets scores a perfect 1.0.

use std::collections::HashMap;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{CurbMask, ProbMask};
use crate::polyline::CurbSet;

/// Default sampling step (meters), one BEV pixel.
pub const DEFAULT_STEP: f64 = 0.1;
/// Default match tolerance (meters).
pub const DEFAULT_TOLERANCE: f64 = 0.1;

fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Pixel-tolerance mask comparison result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelEvalReport {
    pub tolerance_px: u32,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub counts: PixelCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PixelCounts {
    /// Predicted curb pixels with a ground-truth pixel within tolerance.
    pub tp: usize,
    pub fp: usize,
    /// Ground-truth pixels with no predicted pixel within tolerance.
    pub fn_: usize,
}

impl std::fmt::Display for PixelEvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "tolerance  precision  recall  f-score")?;
        write!(
            f,
            "{:>6}px  {:>9.3}  {:>6.3}  {:>7.3}",
            self.tolerance_px, self.precision, self.recall, self.f_score
        )
    }
}

/// Marks every cell within Euclidean pixel distance `tol` of a set cell.
fn dilate(mask: &CurbMask, tol: u32) -> Vec<bool> {
    let grid = mask.grid();
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let t = tol as isize;
    let mut offsets = Vec::new();
    for dr in -t..=t {
        for dc in -t..=t {
            if dr * dr + dc * dc <= t * t {
                offsets.push((dr, dc));
            }
        }
    }
    let mut out = vec![false; (w * h) as usize];
    for (row, col) in mask.iter_set() {
        for &(dr, dc) in &offsets {
            let (r, c) = (row as isize + dr, col as isize + dc);
            if r >= 0 && r < h && c >= 0 && c < w {
                out[(r * w + c) as usize] = true;
            }
        }
    }
    out
}

/// Compares binary masks with a Euclidean pixel tolerance: a predicted pixel
/// counts as correct iff some ground-truth pixel lies within `tol_px`, and
/// recall mirrors the definition on ground-truth pixels.
pub fn pixel_metrics(pred: &CurbMask, gt: &CurbMask, tol_px: u32) -> Result<PixelEvalReport> {
    if pred.grid() != gt.grid() {
        return Err(Error::GridMismatch {
            left: "predicted mask",
            right: "ground-truth mask",
        });
    }
    let width = pred.grid().width();
    let gt_zone = dilate(gt, tol_px);
    let pred_zone = dilate(pred, tol_px);
    let tp = pred
        .iter_set()
        .filter(|(r, c)| gt_zone[r * width + c])
        .count();
    let matched_gt = gt
        .iter_set()
        .filter(|(r, c)| pred_zone[r * width + c])
        .count();
    let total_pred = pred.count();
    let total_gt = gt.count();
    let precision = ratio(tp, total_pred);
    let recall = ratio(matched_gt, total_gt);
    Ok(PixelEvalReport {
        tolerance_px: tol_px,
        precision,
        recall,
        f_score: f_score(precision, recall),
        counts: PixelCounts {
            tp,
            fp: total_pred - tp,
            fn_: total_gt - matched_gt,
        },
    })
}

/// Converts polylines to points: arc-length samples at 0, step, 2·step, ...
/// plus the final endpoint, so consecutive samples are at most `step` apart
/// and no point of the polyline is farther than `step / 2` from a sample.
pub fn sample_polylines(curbs: &CurbSet, step: f64) -> Vec<Vector3<f64>> {
    assert!(step > 0.0, "step must be positive");
    let mut samples = Vec::new();
    for poly in curbs.polylines() {
        let length = poly.length();
        let whole_steps = (length / step).floor() as usize;
        for k in 0..=whole_steps {
            samples.push(poly.point_at((k as f64 * step).min(length)));
        }
        if (whole_steps as f64) * step < length - 1e-9 * length.max(step) {
            samples.push(poly.point_at(length));
        }
    }
    samples
}

/// Polyline-set comparison result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolylineEvalReport {
    pub step: f64,
    pub tolerance: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub counts: SampleCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleCounts {
    pub matched_pred: usize,
    pub total_pred: usize,
    pub matched_gt: usize,
    pub total_gt: usize,
}

impl std::fmt::Display for PolylineEvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "step       tolerance  precision  recall  f-score")?;
        writeln!(
            f,
            "{:<9.3}  {:<9.3}  {:>9.3}  {:>6.3}  {:>7.3}",
            self.step, self.tolerance, self.precision, self.recall, self.f_score
        )?;
        write!(
            f,
            "samples: {}/{} pred matched, {}/{} gt matched",
            self.counts.matched_pred,
            self.counts.total_pred,
            self.counts.matched_gt,
            self.counts.total_gt
        )
    }
}

/// Uniform-grid point matcher for "within tolerance of any target" queries.
struct ToleranceIndex {
    cell: f64,
    tol2: f64,
    buckets: HashMap<(i64, i64, i64), Vec<Vector3<f64>>>,
}

impl ToleranceIndex {
    fn new(targets: &[Vector3<f64>], tolerance: f64) -> ToleranceIndex {
        let mut buckets: HashMap<(i64, i64, i64), Vec<Vector3<f64>>> = HashMap::new();
        for t in targets {
            buckets
                .entry(Self::key(t, tolerance))
                .or_default()
                .push(*t);
        }
        ToleranceIndex {
            cell: tolerance,
            tol2: tolerance * tolerance,
            buckets,
        }
    }

    fn key(p: &Vector3<f64>, cell: f64) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    fn is_matched(&self, p: &Vector3<f64>) -> bool {
        let center = Self::key(p, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = (center.0 + dx, center.1 + dy, center.2 + dz);
                    if let Some(bucket) = self.buckets.get(&key) {
                        if bucket.iter().any(|t| (t - p).norm_squared() <= self.tol2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Samples both polyline sets and matches samples by 3D Euclidean distance.
pub fn polyline_metrics(
    pred: &CurbSet,
    gt: &CurbSet,
    step: f64,
    tolerance: f64,
) -> PolylineEvalReport {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let pred_samples = sample_polylines(pred, step);
    let gt_samples = sample_polylines(gt, step);
    let gt_index = ToleranceIndex::new(&gt_samples, tolerance);
    let pred_index = ToleranceIndex::new(&pred_samples, tolerance);
    let matched_pred = pred_samples.iter().filter(|p| gt_index.is_matched(p)).count();
    let matched_gt = gt_samples.iter().filter(|p| pred_index.is_matched(p)).count();
    let precision = ratio(matched_pred, pred_samples.len());
    let recall = ratio(matched_gt, gt_samples.len());
    PolylineEvalReport {
        step,
        tolerance,
        precision,
        recall,
        f_score: f_score(precision, recall),
        counts: SampleCounts {
            matched_pred,
            total_pred: pred_samples.len(),
            matched_gt,
            total_gt: gt_samples.len(),
        },
    }
}

/// Mean pixel-wise binary cross-entropy of a probability mask against a
/// binary ground truth, natural log, probabilities clamped to
/// `[1e-7, 1 - 1e-7]`.
pub fn cross_entropy(prob: &ProbMask, gt: &CurbMask) -> Result<f64> {
    if prob.grid() != gt.grid() {
        return Err(Error::GridMismatch {
            left: "probability mask",
            right: "ground-truth mask",
        });
    }
    let width = prob.grid().width();
    let n = prob.grid().num_cells();
    let mut total = 0.0;
    for (i, p) in prob.values().iter().enumerate() {
        let p = p.clamp(1e-7, 1.0 - 1e-7);
        let y = gt.get(i / width, i % width);
        total += if y { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(-total / n as f64)
}
