//! File ingestion and export.
//!
//! Scan files are binary little-endian float32 quadruples (x, y, z,
//! intensity), 16 bytes per point. Pose files are plain text with 12
//! whitespace-separated decimals per line, the row-major 3x4 `[R | t]`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geom::{
    nearest_rotation, rotation_error, Pose, Scan, ScanPoint, Sequence, ROTATION_REJECT,
    ROTATION_TOLERANCE,
};
use crate::lift::CurbPoints;
use crate::reconstruct::{WorldCurbCloud, WorldPoint};

const POINT_RECORD_BYTES: usize = 16;

/// Reads one binary scan file. Ids are assigned in file order; intensity is
/// clamped to [0, 1]. The caller owns the scan index.
pub fn read_scan_bin(path: &Path) -> Result<Scan> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % POINT_RECORD_BYTES != 0 {
        return Err(Error::ScanLength {
            path: path.to_path_buf(),
            len: bytes.len() as u64,
        });
    }
    let mut points = Vec::with_capacity(bytes.len() / POINT_RECORD_BYTES);
    for (id, rec) in bytes.chunks_exact(POINT_RECORD_BYTES).enumerate() {
        let f = |o: usize| f32::from_le_bytes([rec[o], rec[o + 1], rec[o + 2], rec[o + 3]]);
        let (x, y, z, intensity) = (f(0), f(4), f(8), f(12));
        if !x.is_finite() || !y.is_finite() || !z.is_finite() {
            return Err(Error::NonFinitePoint {
                path: path.to_path_buf(),
                index: id,
            });
        }
        let intensity = if intensity.is_finite() {
            intensity.clamp(0.0, 1.0)
        } else {
            0.0
        };
        points.push(ScanPoint {
            id,
            x: x as f64,
            y: y as f64,
            z: z as f64,
            intensity: Some(intensity),
        });
    }
    Ok(Scan {
        points,
        scan_index: 0,
    })
}

/// Writes a scan back to the 16-byte record format.
pub fn write_scan_bin(path: &Path, scan: &Scan) -> Result<()> {
    let mut buf = Vec::with_capacity(scan.points.len() * POINT_RECORD_BYTES);
    for p in &scan.points {
        buf.extend_from_slice(&(p.x as f32).to_le_bytes());
        buf.extend_from_slice(&(p.y as f32).to_le_bytes());
        buf.extend_from_slice(&(p.z as f32).to_le_bytes());
        buf.extend_from_slice(&p.intensity.unwrap_or(0.0).to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Reads a pose file: one pose per nonempty line. Rotations within
/// [`ROTATION_TOLERANCE`] are taken as-is; drift below [`ROTATION_REJECT`]
/// is repaired by nearest-orthogonal projection; anything worse is rejected.
pub fn read_poses(path: &Path) -> Result<Vec<Pose>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut poses = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_num = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = [0.0f64; 12];
        let mut count = 0usize;
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::TextRecord {
                path: path.to_path_buf(),
                line: line_num,
                detail: format!("not a number: {tok:?}"),
            })?;
            if count < 12 {
                values[count] = v;
            }
            count += 1;
        }
        if count != 12 {
            return Err(Error::PoseArity {
                path: path.to_path_buf(),
                line: line_num,
                found: count,
            });
        }
        let rotation = Matrix3::new(
            values[0], values[1], values[2], values[4], values[5], values[6], values[8], values[9],
            values[10],
        );
        let translation = Vector3::new(values[3], values[7], values[11]);
        let err = rotation_error(&rotation);
        let rotation = if err <= ROTATION_TOLERANCE {
            rotation
        } else if err < ROTATION_REJECT {
            nearest_rotation(&rotation)
        } else {
            return Err(Error::PoseRotation {
                path: path.to_path_buf(),
                line: line_num,
                err,
            });
        };
        poses.push(
            Pose::new(rotation, translation).map_err(|_| Error::PoseRotation {
                path: path.to_path_buf(),
                line: line_num,
                err,
            })?,
        );
    }
    Ok(poses)
}

/// Writes poses with shortest round-trip decimal formatting.
pub fn write_poses(path: &Path, poses: &[Pose]) -> Result<()> {
    let mut out = String::new();
    for pose in poses {
        let row = pose.to_row_major();
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads `scan_*.bin` files (sorted by name) and the matching pose file.
pub fn load_sequence(scans_dir: &Path, poses_path: &Path) -> Result<Sequence> {
    let paths = list_scan_files(scans_dir)?;
    let poses = read_poses(poses_path)?;
    if paths.len() != poses.len() {
        return Err(Error::InvalidSequence {
            detail: format!(
                "{} scan files in {} but {} poses in {}",
                paths.len(),
                scans_dir.display(),
                poses.len(),
                poses_path.display()
            ),
        });
    }
    let mut scans = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let mut scan = read_scan_bin(p)?;
        scan.scan_index = i;
        scans.push(scan);
    }
    Sequence::new(scans, poses)
}

/// All `*.bin` files in a directory, sorted by file name.
pub fn list_scan_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "bin"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Writes a world-frame curb cloud as `x y z scan_index point_id` lines.
pub fn write_world_cloud(path: &Path, cloud: &WorldCurbCloud) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for p in &cloud.points {
        writeln!(w, "{} {} {} {} {}", p.x, p.y, p.z, p.scan_index, p.point_id)
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_world_cloud(path: &Path) -> Result<WorldCurbCloud> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::TextRecord {
                path: path.to_path_buf(),
                line: lineno + 1,
                detail: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::TextRecord {
                path: path.to_path_buf(),
                line: lineno + 1,
                detail: format!("not a number: {s:?}"),
            })
        };
        points.push(WorldPoint {
            x: num(fields[0])?,
            y: num(fields[1])?,
            z: num(fields[2])?,
            scan_index: num(fields[3])? as usize,
            point_id: num(fields[4])? as usize,
        });
    }
    Ok(WorldCurbCloud { points })
}

/// Writes per-scan lifted curb points as `point_id x y z` lines.
pub fn write_curb_points(path: &Path, curbs: &CurbPoints) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for e in &curbs.entries {
        writeln!(w, "{} {} {} {}", e.id, e.x, e.y, e.z).map_err(|err| Error::io(path, err))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_curb_points(path: &Path, scan_index: usize) -> Result<CurbPoints> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::TextRecord {
                path: path.to_path_buf(),
                line: lineno + 1,
                detail: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let id: usize = fields[0].parse().map_err(|_| Error::TextRecord {
            path: path.to_path_buf(),
            line: lineno + 1,
            detail: format!("not an id: {:?}", fields[0]),
        })?;
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::TextRecord {
                path: path.to_path_buf(),
                line: lineno + 1,
                detail: format!("not a number: {s:?}"),
            })
        };
        entries.push(crate::lift::LiftedPoint {
            id,
            x: num(fields[1])?,
            y: num(fields[2])?,
            z: num(fields[3])?,
        });
    }
    Ok(CurbPoints {
        scan_index,
        entries,
    })
}
