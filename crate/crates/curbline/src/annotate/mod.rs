//! Annotation generation: voxel subsampling balances point densities, DBSCAN
//! separates individual curbs, skeletonization extracts their linear traces,
//! and Ramer–Douglas–Peucker simplification reduces them to compact
//! polylines.

mod dbscan;
mod simplify;
mod skeleton;
mod voxel;

pub use dbscan::{dbscan, DbscanResult};
pub use simplify::simplify_rdp;
pub use skeleton::{graph_to_polylines, skeletonize, SkeletonGraph};
pub use voxel::voxel_downsample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyline::CurbSet;
use crate::reconstruct::WorldCurbCloud;

/// Tuning knobs of the annotation stage. All lengths are meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnotateParams {
    /// Density-balancing voxel edge before clustering.
    pub voxel_size: f64,
    /// DBSCAN neighborhood radius.
    pub dbscan_eps: f64,
    /// DBSCAN core-point threshold, self included.
    pub dbscan_min_pts: usize,
    /// Clusters smaller than this are discarded outright.
    pub min_cluster_points: usize,
    /// Voxel edge of the skeleton graph nodes.
    pub skeleton_voxel: f64,
    /// Leaf branches shorter than this are pruned from the skeleton.
    pub prune_len: f64,
    /// Simplification tolerance; half a BEV pixel by default.
    pub rdp_epsilon: f64,
}

impl Default for AnnotateParams {
    fn default() -> AnnotateParams {
        AnnotateParams {
            voxel_size: 0.15,
            dbscan_eps: 0.5,
            dbscan_min_pts: 5,
            min_cluster_points: 10,
            skeleton_voxel: 0.2,
            prune_len: 1.0,
            rdp_epsilon: 0.05,
        }
    }
}

impl AnnotateParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("voxel_size", self.voxel_size),
            ("dbscan_eps", self.dbscan_eps),
            ("skeleton_voxel", self.skeleton_voxel),
            ("prune_len", self.prune_len),
            ("rdp_epsilon", self.rdp_epsilon),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParam {
                    name: match name {
                        "voxel_size" => "voxel_size",
                        "dbscan_eps" => "dbscan_eps",
                        "skeleton_voxel" => "skeleton_voxel",
                        "prune_len" => "prune_len",
                        _ => "rdp_epsilon",
                    },
                    detail: format!("{value} must be strictly positive"),
                });
            }
        }
        if self.dbscan_min_pts < 2 {
            return Err(Error::InvalidParam {
                name: "dbscan_min_pts",
                detail: format!("{} must be at least 2", self.dbscan_min_pts),
            });
        }
        if self.min_cluster_points == 0 {
            return Err(Error::InvalidParam {
                name: "min_cluster_points",
                detail: "must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// Stage counts of one annotation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnnotateSummary {
    pub input_points: usize,
    pub downsampled_points: usize,
    pub clusters_found: usize,
    pub noise_points: usize,
    pub clusters_kept: usize,
    pub clusters_dropped_small: usize,
    /// Clusters whose skeleton collapsed below two nodes.
    pub clusters_dropped_degenerate: usize,
    pub polylines: usize,
}

/// Runs the full annotation stage over a world-frame curb cloud.
///
/// Curb ids are assigned sequentially in order of cluster discovery; a
/// cluster whose skeleton branches contributes one polyline per branch.
pub fn annotate_pipeline(cloud: &WorldCurbCloud, params: &AnnotateParams) -> (CurbSet, AnnotateSummary) {
    let mut summary = AnnotateSummary {
        input_points: cloud.len(),
        ..AnnotateSummary::default()
    };
    let downsampled = voxel_downsample(cloud, params.voxel_size);
    summary.downsampled_points = downsampled.len();
    let positions = downsampled.positions();
    let result = dbscan(&positions, params.dbscan_eps, params.dbscan_min_pts);
    summary.clusters_found = result.clusters.len();
    summary.noise_points = result.noise.len();

    let mut polylines = Vec::new();
    for cluster in &result.clusters {
        if cluster.len() < params.min_cluster_points {
            summary.clusters_dropped_small += 1;
            continue;
        }
        let cluster_points: Vec<_> = cluster.iter().map(|&i| positions[i]).collect();
        let graph = skeletonize(&cluster_points, params.skeleton_voxel, params.prune_len);
        let paths = graph_to_polylines(&graph);
        if paths.is_empty() {
            summary.clusters_dropped_degenerate += 1;
            continue;
        }
        summary.clusters_kept += 1;
        for path in paths {
            polylines.push(simplify_rdp(&path, params.rdp_epsilon));
        }
    }
    summary.polylines = polylines.len();
    (CurbSet::from_polylines(polylines), summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::WorldPoint;

    #[test]
    fn empty_cloud_gives_empty_curbset() {
        let (curbs, summary) = annotate_pipeline(&WorldCurbCloud::default(), &AnnotateParams::default());
        assert!(curbs.is_empty());
        assert_eq!(summary.polylines, 0);
    }

    #[test]
    fn params_validation_catches_bad_values() {
        let mut p = AnnotateParams::default();
        assert!(p.validate().is_ok());
        p.dbscan_min_pts = 1;
        assert!(p.validate().is_err());
        p = AnnotateParams {
            voxel_size: 0.0,
            ..AnnotateParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn two_parallel_lines_become_two_curbs() {
        // Two dense straight strips 7 m apart.
        let mut points = Vec::new();
        for side in [-3.5f64, 3.5] {
            let mut k = 0;
            while (k as f64) * 0.05 <= 20.0 {
                let x = k as f64 * 0.05;
                points.push(WorldPoint {
                    x,
                    y: side + 0.02 * ((x * 7.3).sin()),
                    z: 0.0,
                    scan_index: 0,
                    point_id: points.len(),
                });
                k += 1;
            }
        }
        let cloud = WorldCurbCloud { points };
        let (curbs, summary) = annotate_pipeline(&cloud, &AnnotateParams::default());
        assert_eq!(curbs.len(), 2);
        assert_eq!(summary.clusters_kept, 2);
        // Each polyline hugs its strip: every vertex close to y = ±3.5.
        for (_, poly) in curbs.curbs() {
            let y0 = poly.vertices()[0].y.signum() * 3.5;
            for v in poly.vertices() {
                assert!((v.y - y0).abs() < 0.25, "vertex {v:?} off strip {y0}");
            }
        }
    }
}
