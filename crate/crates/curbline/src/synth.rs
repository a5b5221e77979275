//! Synthetic street scenes with exact ground truth: scan sequences, poses
//! and curb polylines that exercise the whole pipeline at desk scale.
//!
//! The world frame puts the road surface at z = 0 with the sensor mounted
//! [`SENSOR_HEIGHT`] above it. Each scan samples the road plane, the two
//! vertical curb faces and the raised sidewalks inside the sensor's visible
//! window, with optional Gaussian noise and contiguous occlusion runs on the
//! curb faces. Ground-truth polylines trace the curb lines at road level,
//! where the minimum-height lift anchors its detections.

use std::path::Path;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geom::{Pose, Scan, ScanPoint, Sequence};
use crate::io;
use crate::openlabel;
use crate::polyline::{CurbSet, Polyline3D};

/// Sensor height above the road surface, meters.
pub const SENSOR_HEIGHT: f64 = 1.73;
/// Half-extent of the sampled window around the ego, meters.
const VISIBLE_RANGE: f64 = 26.0;
/// Sidewalk width beyond each curb, meters.
const SIDEWALK_WIDTH: f64 = 5.0;

/// Street shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Straight,
    CurvedArc { radius: f64 },
    LIntersection,
}

/// Scene description; [`SceneSpec::default`] is a 100 m straight street.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub layout: Layout,
    /// Centerline length, meters.
    pub length: f64,
    /// Curb distance from the centerline, meters.
    pub curb_offset: f64,
    /// Curb step height, meters; must stay below the lift's 0.14 m filter.
    pub curb_height: f64,
    pub scan_count: usize,
    pub points_per_scan: usize,
    /// Gaussian noise sigma per coordinate, meters.
    pub noise_sigma: f64,
    /// Fraction of curb-face points removed in contiguous runs.
    pub occlusion_fraction: f64,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> SceneSpec {
        SceneSpec {
            layout: Layout::Straight,
            length: 100.0,
            curb_offset: 3.5,
            curb_height: 0.10,
            scan_count: 50,
            points_per_scan: 20_000,
            noise_sigma: 0.01,
            occlusion_fraction: 0.0,
            seed: 42,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name: &'static str, detail: String| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParam { name, detail })
            }
        };
        check(
            self.length > 0.0 && self.length.is_finite(),
            "length",
            format!("{} must be positive", self.length),
        )?;
        check(
            self.curb_offset > 0.0,
            "curb_offset",
            format!("{} must be positive", self.curb_offset),
        )?;
        check(
            self.curb_height > 0.0 && self.curb_height < 0.14,
            "curb_height",
            format!("{} must lie in (0, 0.14) to survive the height filter", self.curb_height),
        )?;
        check(
            self.noise_sigma >= 0.0,
            "noise_sigma",
            format!("{} must be non-negative", self.noise_sigma),
        )?;
        check(
            (0.0..=1.0).contains(&self.occlusion_fraction),
            "occlusion_fraction",
            format!("{} must lie in [0, 1]", self.occlusion_fraction),
        )?;
        check(self.scan_count >= 1, "scan_count", "at least one scan".to_string())?;
        check(
            self.points_per_scan >= 1,
            "points_per_scan",
            "at least one point".to_string(),
        )?;
        if let Layout::CurvedArc { radius } = self.layout {
            check(
                radius > self.curb_offset + SIDEWALK_WIDTH + 1.0,
                "radius",
                format!(
                    "{radius} must exceed curb_offset + sidewalk width ({})",
                    self.curb_offset + SIDEWALK_WIDTH + 1.0
                ),
            )?;
        }
        Ok(())
    }
}

/// Centerline position and heading at arc length s.
fn centerline(spec: &SceneSpec, s: f64) -> (f64, f64, f64) {
    match spec.layout {
        Layout::Straight => (s, 0.0, 0.0),
        Layout::CurvedArc { radius } => {
            let theta = s / radius;
            (radius * theta.sin(), radius * (1.0 - theta.cos()), theta)
        }
        Layout::LIntersection => {
            let arm = spec.length / 2.0;
            if s <= arm {
                (s, 0.0, 0.0)
            } else {
                (arm, s - arm, std::f64::consts::FRAC_PI_2)
            }
        }
    }
}

/// World point at lateral offset `d` (positive = left) from centerline
/// position s.
fn offset_point(spec: &SceneSpec, s: f64, d: f64) -> (f64, f64) {
    let (x, y, heading) = centerline(spec, s);
    (x - d * heading.sin(), y + d * heading.cos())
}

/// The two exact curb lines at road level: id 0 left, id 1 right.
pub fn curb_lines(spec: &SceneSpec) -> [Polyline3D; 2] {
    let off = spec.curb_offset;
    let line = |coords: Vec<(f64, f64)>| {
        Polyline3D::new(coords.into_iter().map(|(x, y)| Vector3::new(x, y, 0.0)).collect())
            .expect("curb line geometry is valid")
    };
    match spec.layout {
        Layout::Straight => [
            line(vec![(0.0, off), (spec.length, off)]),
            line(vec![(0.0, -off), (spec.length, -off)]),
        ],
        Layout::CurvedArc { radius } => {
            let arc = |r_curb: f64| {
                let max_theta = spec.length / radius;
                let arc_len = r_curb * max_theta;
                // Vertex spacing keeps the chord-to-arc sagitta under 5 mm.
                let spacing = (0.04 * r_curb).sqrt().clamp(0.25, 2.0);
                let n = (arc_len / spacing).ceil() as usize;
                let coords: Vec<(f64, f64)> = (0..=n)
                    .map(|k| {
                        let theta = max_theta * k as f64 / n as f64;
                        (r_curb * theta.sin(), radius - r_curb * theta.cos())
                    })
                    .collect();
                line(coords)
            };
            [arc(radius - off), arc(radius + off)]
        }
        Layout::LIntersection => {
            let arm = spec.length / 2.0;
            [
                line(vec![(0.0, off), (arm - off, off), (arm - off, arm)]),
                line(vec![(0.0, -off), (arm + off, -off), (arm + off, arm)]),
            ]
        }
    }
}

/// Ground-truth annotation set for the scene.
pub fn ground_truth(spec: &SceneSpec) -> CurbSet {
    let [left, right] = curb_lines(spec);
    CurbSet::from_polylines(vec![left, right])
}

fn scan_rng(seed: u64, scan_index: usize) -> ChaCha8Rng {
    let derived = seed ^ (scan_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(derived)
}

/// Contiguous arc-length intervals to drop from one curb in one scan.
fn occlusion_runs(rng: &mut ChaCha8Rng, lo: f64, hi: f64, fraction: f64) -> Vec<(f64, f64)> {
    if fraction <= 0.0 || hi <= lo {
        return Vec::new();
    }
    let total = (hi - lo) * fraction;
    let runs = if fraction > 0.25 { 2 } else { 1 };
    let per_run = total / runs as f64;
    (0..runs)
        .map(|_| {
            let start = rng.random_range(lo..(hi - per_run).max(lo + f64::EPSILON));
            (start, start + per_run)
        })
        .collect()
}

/// Generates the scene: a scan sequence with poses plus ground truth.
/// Deterministic for a fixed spec, including the seed.
pub fn generate_scene(spec: &SceneSpec) -> Result<(Sequence, CurbSet)> {
    spec.validate()?;
    let gt = ground_truth(spec);
    let [left_curb, right_curb] = curb_lines(spec);
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE))
        .expect("valid normal distribution");

    let step = if spec.scan_count > 1 {
        spec.length / (spec.scan_count - 1) as f64
    } else {
        0.0
    };

    let mut scans = Vec::with_capacity(spec.scan_count);
    let mut poses = Vec::with_capacity(spec.scan_count);
    for i in 0..spec.scan_count {
        let s_ego = step * i as f64;
        let (x, y, heading) = centerline(spec, s_ego);
        let pose = Pose::from_yaw(heading, Vector3::new(x, y, SENSOR_HEIGHT));
        let to_ego = pose.inverse();
        let mut rng = scan_rng(spec.seed, i);

        let window = (
            (s_ego - VISIBLE_RANGE).max(0.0),
            (s_ego + VISIBLE_RANGE).min(spec.length),
        );
        let n = spec.points_per_scan;
        let n_road = n / 2;
        let n_sidewalk = n / 5;
        let n_curb = (n - n_road - n_sidewalk) / 2;

        let mut world_points: Vec<Vector3<f64>> = Vec::with_capacity(n);
        for _ in 0..n_road {
            let s = rng.random_range(window.0..window.1);
            let d = rng.random_range(-spec.curb_offset..spec.curb_offset);
            let (px, py) = offset_point(spec, s, d);
            world_points.push(Vector3::new(px, py, 0.0));
        }
        for _ in 0..n_sidewalk {
            let s = rng.random_range(window.0..window.1);
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let d = side * rng.random_range(spec.curb_offset..spec.curb_offset + SIDEWALK_WIDTH);
            let (px, py) = offset_point(spec, s, d);
            world_points.push(Vector3::new(px, py, spec.curb_height));
        }
        for curb in [&left_curb, &right_curb] {
            let curb_len = curb.length();
            let lo = window.0.min(curb_len);
            let hi = window.1.min(curb_len);
            let runs = occlusion_runs(&mut rng, lo, hi, spec.occlusion_fraction);
            for _ in 0..n_curb {
                if hi <= lo {
                    break;
                }
                let u = rng.random_range(lo..hi);
                let z = rng.random_range(0.0..spec.curb_height);
                if runs.iter().any(|&(a, b)| u >= a && u < b) {
                    continue;
                }
                let p = curb.point_at(u);
                world_points.push(Vector3::new(p.x, p.y, z));
            }
        }

        let points: Vec<ScanPoint> = world_points
            .iter()
            .enumerate()
            .map(|(id, w)| {
                let noisy = if spec.noise_sigma > 0.0 {
                    Vector3::new(
                        w.x + noise.sample(&mut rng),
                        w.y + noise.sample(&mut rng),
                        w.z + noise.sample(&mut rng),
                    )
                } else {
                    *w
                };
                let ego = to_ego.apply(&noisy);
                ScanPoint {
                    id,
                    x: ego.x,
                    y: ego.y,
                    z: ego.z,
                    intensity: Some(rng.random_range(0.0f32..=1.0)),
                }
            })
            .collect();

        scans.push(Scan {
            points,
            scan_index: i,
        });
        poses.push(pose);
    }

    Ok((Sequence::new(scans, poses)?, gt))
}

/// Writes a scene to disk in the pipeline's input formats:
/// `scans/scan_{i:06}.bin`, `poses.txt` and `gt.json`.
pub fn write_scene(dir: &Path, spec: &SceneSpec) -> Result<()> {
    let (sequence, gt) = generate_scene(spec)?;
    let scans_dir = dir.join("scans");
    std::fs::create_dir_all(&scans_dir).map_err(|e| Error::io(&scans_dir, e))?;
    for scan in &sequence.scans {
        let path = scans_dir.join(format!("scan_{:06}.bin", scan.scan_index));
        io::write_scan_bin(&path, scan)?;
    }
    io::write_poses(&dir.join("poses.txt"), &sequence.poses)?;
    openlabel::export_file(&dir.join("gt.json"), &gt, Some("synthetic"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec() -> SceneSpec {
        SceneSpec {
            length: 30.0,
            scan_count: 3,
            points_per_scan: 2_000,
            noise_sigma: 0.0,
            ..SceneSpec::default()
        }
    }

    #[test]
    fn noise_free_points_lie_on_the_analytic_planes() {
        let spec = quick_spec();
        let (seq, _) = generate_scene(&spec).unwrap();
        for (scan, pose) in seq.scans.iter().zip(&seq.poses) {
            for p in &scan.points {
                let w = pose.apply(&p.position());
                let on_road = w.z.abs() < 1e-9;
                let on_sidewalk = (w.z - spec.curb_height).abs() < 1e-9;
                let on_curb_face = (w.y.abs() - spec.curb_offset).abs() < 1e-9;
                assert!(
                    on_road || on_sidewalk || on_curb_face,
                    "point {w:?} off all analytic surfaces"
                );
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SceneSpec {
            noise_sigma: 0.01,
            occlusion_fraction: 0.2,
            ..quick_spec()
        };
        let (a, gt_a) = generate_scene(&spec).unwrap();
        let (b, gt_b) = generate_scene(&spec).unwrap();
        assert_eq!(gt_a, gt_b);
        assert_eq!(a.scans.len(), b.scans.len());
        for (sa, sb) in a.scans.iter().zip(&b.scans) {
            assert_eq!(sa.points, sb.points);
        }
        for (pa, pb) in a.poses.iter().zip(&b.poses) {
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn curved_ground_truth_chords_stay_near_the_arc() {
        let radius = 30.0;
        let spec = SceneSpec {
            layout: Layout::CurvedArc { radius },
            length: 40.0,
            ..quick_spec()
        };
        let gt = ground_truth(&spec);
        for (id, poly) in gt.curbs() {
            let r_curb = if *id == 0 {
                radius - spec.curb_offset
            } else {
                radius + spec.curb_offset
            };
            for (a, b) in poly.segments() {
                let chord = (b - a).norm();
                // Analytic sagitta of a chord on a circle of radius r_curb.
                let sagitta = r_curb - (r_curb * r_curb - chord * chord / 4.0).sqrt();
                assert!(sagitta <= 0.01, "sagitta {sagitta} for chord {chord}");
                // Vertices sit exactly on the curb arc (center (0, radius)).
                for v in [a, b] {
                    let r = (v.x * v.x + (v.y - radius) * (v.y - radius)).sqrt();
                    assert!((r - r_curb).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn curb_points_survive_the_lift_height_filter() {
        let spec = SceneSpec {
            noise_sigma: 0.01,
            ..quick_spec()
        };
        let (seq, _) = generate_scene(&spec).unwrap();
        for scan in &seq.scans {
            for p in &scan.points {
                assert!(p.z < 0.14, "ego height {} reaches the filter", p.z);
            }
        }
    }

    #[test]
    fn occlusion_reduces_curb_point_count() {
        let base = SceneSpec {
            noise_sigma: 0.0,
            ..quick_spec()
        };
        let occluded = SceneSpec {
            occlusion_fraction: 0.4,
            ..base.clone()
        };
        let (a, _) = generate_scene(&base).unwrap();
        let (b, _) = generate_scene(&occluded).unwrap();
        let count = |seq: &Sequence| -> usize { seq.scans.iter().map(|s| s.points.len()).sum() };
        assert!(count(&b) < count(&a));
    }

    #[test]
    fn spec_validation_rejects_tall_curbs() {
        let spec = SceneSpec {
            curb_height: 0.2,
            ..SceneSpec::default()
        };
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidParam {
                name: "curb_height",
                ..
            })
        ));
    }

    #[test]
    fn l_intersection_curbs_have_one_corner_each() {
        let spec = SceneSpec {
            layout: Layout::LIntersection,
            ..quick_spec()
        };
        let gt = ground_truth(&spec);
        for (_, poly) in gt.curbs() {
            assert_eq!(poly.vertices().len(), 3);
        }
    }
}
