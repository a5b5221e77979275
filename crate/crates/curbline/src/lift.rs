//! 2D→3D transformation: join curb pixels with the scan points projecting
//! into them, keep the minimum-height record per pixel, then filter by the
//! curb height bound.

use crate::bev::PixelPointIndex;
use crate::error::{Error, Result};
use crate::geom::Scan;
use crate::mask::CurbMask;

/// Default curb height bound in meters; the comparison is strict.
pub const DEFAULT_Z_MAX: f64 = 0.14;

/// One lifted curb point with its original ego-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedPoint {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Curb points recovered from one scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CurbPoints {
    pub scan_index: usize,
    pub entries: Vec<LiftedPoint>,
}

/// Lifts a curb mask into 3D points of the scan.
///
/// For each curb pixel: gather the `(id, z)` candidates that project into
/// it; skip the pixel if there are none; take the minimum z; keep the pixel
/// only if that minimum is strictly below `z_max`; emit every point
/// achieving the minimum (ties included), in id order.
pub fn lift_mask(
    scan: &Scan,
    index: &PixelPointIndex,
    mask: &CurbMask,
    z_max: f64,
) -> Result<CurbPoints> {
    if index.grid() != mask.grid() {
        return Err(Error::GridMismatch {
            left: "pixel-point index",
            right: "curb mask",
        });
    }
    let mut entries = Vec::new();
    for (row, col) in mask.iter_set() {
        let candidates = index.candidates(row, col);
        let Some(min_z) = candidates.iter().map(|(_, z)| *z).reduce(f64::min) else {
            continue;
        };
        if !(min_z < z_max) {
            continue;
        }
        for (id, z) in candidates {
            if *z == min_z {
                let p = &scan.points[*id];
                entries.push(LiftedPoint {
                    id: *id,
                    x: p.x,
                    y: p.y,
                    z: p.z,
                });
            }
        }
    }
    Ok(CurbPoints {
        scan_index: scan.scan_index,
        entries,
    })
}
