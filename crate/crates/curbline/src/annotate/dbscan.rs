//! DBSCAN over 3D points with a uniform-grid neighbor index.
//!
//! Semantics: a point is core iff it has at least `min_pts` neighbors within
//! `eps` (itself included); clusters are maximal density-connected sets;
//! non-core points reachable from a cluster join the first cluster that
//! discovers them, which under in-order seeding is the lowest cluster id.

use std::collections::{HashMap, VecDeque};

use nalgebra::Vector3;

/// Cluster member lists (sorted ascending) plus the noise points.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DbscanResult {
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Unvisited,
    Noise,
    Cluster(usize),
}

struct NeighborIndex<'a> {
    points: &'a [Vector3<f64>],
    eps2: f64,
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl<'a> NeighborIndex<'a> {
    fn new(points: &'a [Vector3<f64>], eps: f64) -> NeighborIndex<'a> {
        let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(p, eps)).or_default().push(i);
        }
        NeighborIndex {
            points,
            eps2: eps * eps,
            cell: eps,
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

    /// Indices within eps of point `i`, itself included, ascending.
    fn query(&self, i: usize) -> Vec<usize> {
        let p = &self.points[i];
        let center = Self::key(p, self.cell);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = (center.0 + dx, center.1 + dy, center.2 + dz);
                    if let Some(bucket) = self.buckets.get(&key) {
                        for &j in bucket {
                            if (self.points[j] - p).norm_squared() <= self.eps2 {
                                out.push(j);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn dbscan(points: &[Vector3<f64>], eps: f64, min_pts: usize) -> DbscanResult {
    assert!(eps > 0.0, "eps must be positive");
    assert!(min_pts >= 2, "min_pts must be at least 2");
    let index = NeighborIndex::new(points, eps);
    let mut state = vec![State::Unvisited; points.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();

    for seed in 0..points.len() {
        if state[seed] != State::Unvisited {
            continue;
        }
        let neighbors = index.query(seed);
        if neighbors.len() < min_pts {
            state[seed] = State::Noise;
            continue;
        }
        let cid = clusters.len();
        clusters.push(vec![seed]);
        state[seed] = State::Cluster(cid);
        let mut queue: VecDeque<usize> = neighbors.into();
        while let Some(j) = queue.pop_front() {
            match state[j] {
                State::Cluster(_) => {}
                State::Noise => {
                    // Border point previously dismissed as noise.
                    state[j] = State::Cluster(cid);
                    clusters[cid].push(j);
                }
                State::Unvisited => {
                    state[j] = State::Cluster(cid);
                    clusters[cid].push(j);
                    let expansion = index.query(j);
                    if expansion.len() >= min_pts {
                        queue.extend(expansion);
                    }
                }
            }
        }
    }

    for members in &mut clusters {
        members.sort_unstable();
    }
    let noise = state
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == State::Noise)
        .map(|(i, _)| i)
        .collect();
    DbscanResult { clusters, noise }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(f64, f64, f64)]) -> Vec<Vector3<f64>> {
        coords.iter().map(|&(x, y, z)| Vector3::new(x, y, z)).collect()
    }

    #[test]
    fn collinear_chain_is_one_cluster() {
        let coords: Vec<(f64, f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 0.0, 0.0)).collect();
        let result = dbscan(&pts(&coords), 0.25, 3);
        assert_eq!(result.clusters.len(), 1);
        assert_eq!(result.clusters[0], (0..10).collect::<Vec<_>>());
        assert!(result.noise.is_empty());
    }

    #[test]
    fn far_point_is_noise() {
        let mut coords: Vec<(f64, f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 0.0, 0.0)).collect();
        coords.push((5.0, 5.0, 0.0));
        let result = dbscan(&pts(&coords), 0.25, 3);
        assert_eq!(result.clusters.len(), 1);
        assert_eq!(result.noise, vec![10]);
    }

    #[test]
    fn empty_input_is_empty_output() {
        let result = dbscan(&[], 0.5, 3);
        assert!(result.clusters.is_empty());
        assert!(result.noise.is_empty());
    }

    #[test]
    fn two_blobs_with_a_gap_split() {
        let mut coords = Vec::new();
        for i in 0..6 {
            coords.push((i as f64 * 0.1, 0.0, 0.0));
        }
        for i in 0..6 {
            coords.push((3.0 + i as f64 * 0.1, 0.0, 0.0));
        }
        let result = dbscan(&pts(&coords), 0.3, 3);
        assert_eq!(result.clusters.len(), 2);
        assert_eq!(result.clusters[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(result.clusters[1], vec![6, 7, 8, 9, 10, 11]);
    }

    #[test]
    fn neighborhood_radius_is_inclusive() {
        // Exactly eps apart: each point has 2 neighbors including itself.
        let coords = [(0.0, 0.0, 0.0), (0.5, 0.0, 0.0)];
        let result = dbscan(&pts(&coords), 0.5, 2);
        assert_eq!(result.clusters.len(), 1);
        assert_eq!(result.clusters[0], vec![0, 1]);
    }
}
