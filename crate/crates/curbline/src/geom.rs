//! Point-cloud and pose domain types plus rigid-body transforms.
//!
//! The ego frame convention is x forward, y left, z up, origin at the
//! sensor. Poses map ego-frame coordinates into a common world frame.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Orthonormality slack accepted silently when constructing a pose.
pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// Orthonormality error at or above which a rotation is rejected outright.
pub const ROTATION_REJECT: f64 = 1e-3;

/// One LiDAR return in the sensor (ego) frame.
///
/// `id` is the ordinal position of the point within its scan; it is the key
/// used by the 2D→3D lift to recover original coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Unitless reflectance in [0, 1], when the source provides one.
    pub intensity: Option<f32>,
}

impl ScanPoint {
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

/// One full LiDAR sweep. Point ids equal their position in the list.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub points: Vec<ScanPoint>,
    pub scan_index: usize,
}

impl Scan {
    /// Builds a scan from bare coordinates, assigning ids in order.
    pub fn from_coords(scan_index: usize, coords: &[(f64, f64, f64)]) -> Scan {
        let points = coords
            .iter()
            .enumerate()
            .map(|(id, &(x, y, z))| ScanPoint {
                id,
                x,
                y,
                z,
                intensity: None,
            })
            .collect();
        Scan { points, scan_index }
    }
}

/// Rigid transform mapping ego-frame coordinates into the world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

/// Max-norm deviation of `r' * r` from the identity, plus any determinant
/// defect. Zero for an exact rotation matrix.
pub fn rotation_error(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r;
    let mut err: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((gram[(i, j)] - target).abs());
        }
    }
    err.max((r.determinant() - 1.0).abs())
}

/// Nearest orthogonal matrix with determinant +1, via SVD.
pub fn nearest_rotation(r: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = r.svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let mut fixed = u * v_t;
    if fixed.determinant() < 0.0 {
        // Flip the axis of least significance to restore a proper rotation.
        let mut u = u;
        u.column_mut(2).neg_mut();
        fixed = u * v_t;
    }
    fixed
}

impl Pose {
    /// Validates orthonormality (det +1, error below [`ROTATION_TOLERANCE`])
    /// and finiteness.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Pose> {
        if rotation.iter().any(|v| !v.is_finite()) || translation.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPose {
                detail: "non-finite entry".to_string(),
            });
        }
        let err = rotation_error(&rotation);
        if err > ROTATION_TOLERANCE {
            return Err(Error::InvalidPose {
                detail: format!("rotation error {err:.3e} exceeds {ROTATION_TOLERANCE:.0e}"),
            });
        }
        Ok(Pose {
            rotation,
            translation,
        })
    }

    /// Constructs without validation; composition and inversion of valid
    /// poses stay valid to machine precision.
    fn new_unchecked(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Pose {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Pose {
        Pose::new_unchecked(Matrix3::identity(), Vector3::zeros())
    }

    pub fn from_translation(t: Vector3<f64>) -> Pose {
        Pose::new_unchecked(Matrix3::identity(), t)
    }

    /// Pure rotation about +z (ego "up") by `angle` radians.
    pub fn from_yaw(angle: f64, translation: Vector3<f64>) -> Pose {
        let (s, c) = angle.sin_cos();
        let rotation = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        Pose::new_unchecked(rotation, translation)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Applies the transform to a single position.
    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose::new_unchecked(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn inverse(&self) -> Pose {
        let r_inv = self.rotation.transpose();
        Pose::new_unchecked(r_inv, -(r_inv * self.translation))
    }

    /// Row-major 3x4 `[R | t]` layout, the pose-file line order.
    pub fn to_row_major(&self) -> [f64; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t[0],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t[1],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t[2],
        ]
    }
}

/// Transforms scan points rigidly, preserving ids, order and intensity.
pub fn transform_points(points: &[ScanPoint], pose: &Pose) -> Vec<ScanPoint> {
    points
        .iter()
        .map(|p| {
            let v = pose.apply(&p.position());
            ScanPoint {
                id: p.id,
                x: v.x,
                y: v.y,
                z: v.z,
                intensity: p.intensity,
            }
        })
        .collect()
}

/// A scan list paired with one world-frame pose per scan.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub scans: Vec<Scan>,
    pub poses: Vec<Pose>,
}

impl Sequence {
    pub fn new(scans: Vec<Scan>, poses: Vec<Pose>) -> Result<Sequence> {
        if scans.len() != poses.len() {
            return Err(Error::InvalidSequence {
                detail: format!("{} scans but {} poses", scans.len(), poses.len()),
            });
        }
        for (i, scan) in scans.iter().enumerate() {
            if scan.scan_index != i {
                return Err(Error::InvalidSequence {
                    detail: format!("scan at position {i} carries index {}", scan.scan_index),
                });
            }
        }
        Ok(Sequence { scans, poses })
    }

    pub fn len(&self) -> usize {
        self.scans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scans.is_empty()
    }
}
