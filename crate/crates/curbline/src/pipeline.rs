//! End-to-end composition: per-scan project → mask → lift, then
//! reconstruct → annotate. The per-scan stage is a pure function of
//! `(scan, grid, source)`, so callers may fan it out over workers and merge
//! results by scan index without affecting the output.

use crate::annotate::{annotate_pipeline, AnnotateParams, AnnotateSummary};
use crate::bev::{project, GridConfig};
use crate::error::Result;
use crate::geom::{Pose, Scan, Sequence};
use crate::lift::{lift_mask, CurbPoints};
use crate::mask::MaskSource;
use crate::polyline::CurbSet;
use crate::reconstruct::{reconstruct, WorldCurbCloud};

/// Counts reported by a full pipeline run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunSummary {
    pub scans: usize,
    pub lifted_points: usize,
    pub annotate: AnnotateSummary,
}

/// Projects one scan, obtains its mask and lifts the curb points.
pub fn lift_scan(
    scan: &Scan,
    grid: &GridConfig,
    source: &dyn MaskSource,
    z_max: f64,
) -> Result<CurbPoints> {
    let (bev, index, _) = project(scan, grid);
    let mask = source.mask_for(scan.scan_index, &bev)?;
    lift_mask(scan, &index, &mask, z_max)
}

/// Accumulates per-scan curb points and runs the annotation stage.
pub fn assemble(
    lifted: &[CurbPoints],
    poses: &[Pose],
    params: &AnnotateParams,
) -> Result<(CurbSet, WorldCurbCloud, AnnotateSummary)> {
    let cloud = reconstruct(lifted, poses)?;
    let (curbs, summary) = annotate_pipeline(&cloud, params);
    Ok((curbs, cloud, summary))
}

/// Sequential end-to-end run over a sequence.
pub fn run(
    sequence: &Sequence,
    grid: &GridConfig,
    source: &dyn MaskSource,
    z_max: f64,
    params: &AnnotateParams,
) -> Result<(CurbSet, RunSummary)> {
    params.validate()?;
    let mut lifted = Vec::with_capacity(sequence.len());
    for scan in &sequence.scans {
        lifted.push(lift_scan(scan, grid, source, z_max)?);
    }
    let lifted_points = lifted.iter().map(|c| c.entries.len()).sum();
    let (curbs, _, annotate) = assemble(&lifted, &sequence.poses, params)?;
    Ok((
        curbs,
        RunSummary {
            scans: sequence.len(),
            lifted_points,
            annotate,
        },
    ))
}
