//! Voxel subsampling: one representative per occupied voxel, placed at the
//! voxel centroid, with provenance borrowed from the nearest input point.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::reconstruct::{WorldCurbCloud, WorldPoint};

pub(crate) fn voxel_key(p: &Vector3<f64>, voxel_size: f64) -> (i64, i64, i64) {
    (
        (p.x / voxel_size).floor() as i64,
        (p.y / voxel_size).floor() as i64,
        (p.z / voxel_size).floor() as i64,
    )
}

/// Collapses the cloud to one centroid per occupied voxel. Output voxels
/// appear in first-seen input order, so the result is deterministic for a
/// fixed input order.
pub fn voxel_downsample(cloud: &WorldCurbCloud, voxel_size: f64) -> WorldCurbCloud {
    assert!(voxel_size > 0.0, "voxel_size must be positive");
    let mut slots: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, p) in cloud.points.iter().enumerate() {
        let key = voxel_key(&p.position(), voxel_size);
        let slot = *slots.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(i);
    }
    let points = groups
        .iter()
        .map(|members| {
            let mut centroid = Vector3::zeros();
            for &i in members {
                centroid += cloud.points[i].position();
            }
            centroid /= members.len() as f64;
            // Provenance comes from the member nearest the centroid; the
            // earliest one wins ties.
            let nearest = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let da = (cloud.points[a].position() - centroid).norm_squared();
                    let db = (cloud.points[b].position() - centroid).norm_squared();
                    da.partial_cmp(&db).expect("finite distances")
                })
                .expect("non-empty voxel");
            WorldPoint {
                x: centroid.x,
                y: centroid.y,
                z: centroid.z,
                scan_index: cloud.points[nearest].scan_index,
                point_id: cloud.points[nearest].point_id,
            }
        })
        .collect();
    WorldCurbCloud { points }
}
