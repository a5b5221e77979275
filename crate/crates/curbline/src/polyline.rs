//! Ordered 3D vertex chains and the curb annotation set built from them.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::Pose;

/// Minimum separation between consecutive polyline vertices, in meters.
pub const MIN_VERTEX_SEPARATION: f64 = 1e-9;

/// An ordered chain of 3D vertices (meters).
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline3D {
    vertices: Vec<Vector3<f64>>,
}

impl Polyline3D {
    /// Requires at least two vertices, finite coordinates and consecutive
    /// vertices at least [`MIN_VERTEX_SEPARATION`] apart.
    pub fn new(vertices: Vec<Vector3<f64>>) -> Result<Polyline3D> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPolyline {
                detail: format!("{} vertices, need at least 2", vertices.len()),
            });
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite() || !v.z.is_finite()) {
            return Err(Error::InvalidPolyline {
                detail: "non-finite vertex".to_string(),
            });
        }
        for pair in vertices.windows(2) {
            if (pair[1] - pair[0]).norm() < MIN_VERTEX_SEPARATION {
                return Err(Error::InvalidPolyline {
                    detail: "consecutive vertices coincide".to_string(),
                });
            }
        }
        Ok(Polyline3D { vertices })
    }

    /// Skips validation; callers guarantee the invariants hold.
    pub(crate) fn new_unchecked(vertices: Vec<Vector3<f64>>) -> Polyline3D {
        Polyline3D { vertices }
    }

    pub fn from_coords(coords: &[(f64, f64, f64)]) -> Result<Polyline3D> {
        Polyline3D::new(coords.iter().map(|&(x, y, z)| Vector3::new(x, y, z)).collect())
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|pair| (pair[1] - pair[0]).norm())
            .sum()
    }

    /// Position at arc-length parameter `s`, clamped to the chain.
    pub fn point_at(&self, s: f64) -> Vector3<f64> {
        if s <= 0.0 {
            return self.vertices[0];
        }
        let mut remaining = s;
        for pair in self.vertices.windows(2) {
            let seg = pair[1] - pair[0];
            let len = seg.norm();
            if remaining <= len {
                return pair[0] + seg * (remaining / len);
            }
            remaining -= len;
        }
        *self.vertices.last().expect("non-empty polyline")
    }

    /// Segment endpoints in order.
    pub fn segments(&self) -> impl Iterator<Item = (Vector3<f64>, Vector3<f64>)> + '_ {
        self.vertices.windows(2).map(|pair| (pair[0], pair[1]))
    }

    /// Rigidly transformed copy. Isometries preserve vertex separation, so
    /// the invariants carry over.
    pub fn transformed(&self, pose: &Pose) -> Polyline3D {
        Polyline3D::new_unchecked(self.vertices.iter().map(|v| pose.apply(v)).collect())
    }
}

/// Distance from `p` to the closed segment `(a, b)`.
pub fn point_segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// The final annotation set: uniquely-identified curbs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurbSet {
    curbs: Vec<(u64, Polyline3D)>,
}

impl CurbSet {
    pub fn new(curbs: Vec<(u64, Polyline3D)>) -> Result<CurbSet> {
        let mut seen = std::collections::HashSet::new();
        for (id, _) in &curbs {
            if !seen.insert(*id) {
                return Err(Error::DuplicateCurbId { id: *id });
            }
        }
        Ok(CurbSet { curbs })
    }

    /// Assigns sequential ids starting at zero.
    pub fn from_polylines(polylines: Vec<Polyline3D>) -> CurbSet {
        CurbSet {
            curbs: polylines
                .into_iter()
                .enumerate()
                .map(|(i, p)| (i as u64, p))
                .collect(),
        }
    }

    pub fn curbs(&self) -> &[(u64, Polyline3D)] {
        &self.curbs
    }

    pub fn len(&self) -> usize {
        self.curbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curbs.is_empty()
    }

    pub fn polylines(&self) -> impl Iterator<Item = &Polyline3D> {
        self.curbs.iter().map(|(_, p)| p)
    }

    /// Rigidly transformed copy with ids preserved.
    pub fn transformed(&self, pose: &Pose) -> CurbSet {
        CurbSet {
            curbs: self
                .curbs
                .iter()
                .map(|(id, p)| (*id, p.transformed(pose)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_chains() {
        assert!(Polyline3D::from_coords(&[(0.0, 0.0, 0.0)]).is_err());
        assert!(Polyline3D::from_coords(&[(0.0, 0.0, 0.0), (0.0, 0.0, 0.0)]).is_err());
        assert!(Polyline3D::from_coords(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]).is_ok());
    }

    #[test]
    fn arc_length_interpolation_walks_segments() {
        let p = Polyline3D::from_coords(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 2.0, 0.0)])
            .unwrap();
        assert_eq!(p.length(), 3.0);
        assert_eq!(p.point_at(0.5), Vector3::new(0.5, 0.0, 0.0));
        assert_eq!(p.point_at(1.0), Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(p.point_at(2.0), Vector3::new(1.0, 1.0, 0.0));
        assert_eq!(p.point_at(99.0), Vector3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn point_segment_distance_clamps_to_endpoints() {
        let a = Vector3::new(0.0, 0.0, 0.0);
        let b = Vector3::new(1.0, 0.0, 0.0);
        assert_eq!(point_segment_distance(&Vector3::new(0.5, 1.0, 0.0), &a, &b), 1.0);
        assert_eq!(point_segment_distance(&Vector3::new(-3.0, 4.0, 0.0), &a, &b), 5.0);
        assert_eq!(point_segment_distance(&Vector3::new(2.0, 0.0, 0.0), &a, &b), 1.0);
    }

    #[test]
    fn curb_ids_must_be_unique() {
        let p = Polyline3D::from_coords(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]).unwrap();
        assert!(CurbSet::new(vec![(0, p.clone()), (0, p.clone())]).is_err());
        assert!(CurbSet::new(vec![(0, p.clone()), (1, p)]).is_ok());
    }
}
