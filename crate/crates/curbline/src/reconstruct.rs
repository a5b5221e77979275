//! Cumulative reconstruction: per-scan curb points are mapped through their
//! odometry poses and accumulated into one world-frame cloud.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::lift::CurbPoints;

/// A world-frame curb point with provenance back to its scan and point id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub scan_index: usize,
    pub point_id: usize,
}

impl WorldPoint {
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

/// The accumulated curb cloud of a whole sequence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorldCurbCloud {
    pub points: Vec<WorldPoint>,
}

impl WorldCurbCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.points.iter().map(WorldPoint::position).collect()
    }
}

/// Transforms each scan's curb points by its pose and appends them in scan
/// order. `poses[i]` must exist for every referenced scan index.
pub fn reconstruct(curbs_per_scan: &[CurbPoints], poses: &[Pose]) -> Result<WorldCurbCloud> {
    let mut points = Vec::with_capacity(curbs_per_scan.iter().map(|c| c.entries.len()).sum());
    for curbs in curbs_per_scan {
        let pose = poses.get(curbs.scan_index).ok_or(Error::MissingPose {
            scan_index: curbs.scan_index,
        })?;
        for e in &curbs.entries {
            let w = pose.apply(&Vector3::new(e.x, e.y, e.z));
            points.push(WorldPoint {
                x: w.x,
                y: w.y,
                z: w.z,
                scan_index: curbs.scan_index,
                point_id: e.id,
            });
        }
    }
    Ok(WorldCurbCloud { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::LiftedPoint;

    fn curbs(scan_index: usize, pts: &[(f64, f64, f64)]) -> CurbPoints {
        CurbPoints {
            scan_index,
            entries: pts
                .iter()
                .enumerate()
                .map(|(id, &(x, y, z))| LiftedPoint { id, x, y, z })
                .collect(),
        }
    }

    #[test]
    fn identity_poses_concatenate_inputs() {
        let a = curbs(0, &[(1.0, 2.0, 0.1), (3.0, 4.0, 0.0)]);
        let b = curbs(1, &[(5.0, 6.0, -0.1)]);
        let poses = vec![Pose::identity(), Pose::identity()];
        let cloud = reconstruct(&[a, b], &poses).unwrap();
        assert_eq!(cloud.len(), 3);
        assert_eq!((cloud.points[0].x, cloud.points[0].y), (1.0, 2.0));
        assert_eq!(cloud.points[2].scan_index, 1);
        assert_eq!(cloud.points[2].point_id, 0);
    }

    #[test]
    fn translation_pose_shifts_points() {
        let input = curbs(0, &[(1.0, 2.0, 0.05)]);
        let poses = vec![Pose::from_translation(Vector3::new(10.0, 0.0, 0.0))];
        let cloud = reconstruct(&[input], &poses).unwrap();
        assert_eq!(
            (cloud.points[0].x, cloud.points[0].y, cloud.points[0].z),
            (11.0, 2.0, 0.05)
        );
    }

    #[test]
    fn missing_pose_names_the_scan_index() {
        let input = curbs(3, &[(0.0, 0.0, 0.0)]);
        match reconstruct(&[input], &[Pose::identity()]) {
            Err(Error::MissingPose { scan_index }) => assert_eq!(scan_index, 3),
            other => panic!("expected MissingPose, got {other:?}"),
        }
    }

    #[test]
    fn output_size_is_the_sum_of_inputs() {
        let inputs = vec![
            curbs(0, &[(0.0, 0.0, 0.0); 4]),
            curbs(1, &[]),
            curbs(2, &[(1.0, 1.0, 0.0); 7]),
        ];
        let poses = vec![Pose::identity(); 3];
        let cloud = reconstruct(&inputs, &poses).unwrap();
        assert_eq!(cloud.len(), 11);
    }
}
