//! Per-scan binary curb masks in BEV space and the interchangeable sources
//! that produce them, standing in for a segmentation model.
//!
//! Sources: 8-bit grayscale mask files (model output), rasterized
//! ground-truth polylines (the verification oracle), probability images with
//! a threshold, and a classical height-gradient heuristic.

use std::path::{Path, PathBuf};

use crate::bev::{BevStack, GridConfig};
use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::polyline::CurbSet;

/// Heights deeper than this gradient band do not look like curbs.
pub const DEFAULT_GRAD_MIN: f64 = 0.03;
/// Upper bound of the curb step band, matching the lift's height filter.
pub const DEFAULT_GRAD_MAX: f64 = 0.14;

/// Binary curb / non-curb cells over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurbMask {
    grid: GridConfig,
    bits: Vec<bool>,
}

impl CurbMask {
    pub fn empty(grid: &GridConfig) -> CurbMask {
        CurbMask {
            grid: grid.clone(),
            bits: vec![false; grid.num_cells()],
        }
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.grid.width() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.grid.width() + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Set pixels in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let width = self.grid.width();
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i / width, i % width))
    }

    pub fn to_image(&self) -> image::GrayImage {
        let w = self.grid.width() as u32;
        let h = self.grid.height() as u32;
        image::GrayImage::from_fn(w, h, |x, y| {
            image::Luma([if self.get(y as usize, x as usize) { 255 } else { 0 }])
        })
    }
}

/// Per-pixel probability of class "curb".
#[derive(Debug, Clone)]
pub struct ProbMask {
    grid: GridConfig,
    values: Vec<f64>,
}

impl ProbMask {
    pub fn new(grid: &GridConfig, values: Vec<f64>) -> Result<ProbMask> {
        if values.len() != grid.num_cells() {
            return Err(Error::InvalidParam {
                name: "prob_values",
                detail: format!(
                    "{} values for a {} cell grid",
                    values.len(),
                    grid.num_cells()
                ),
            });
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParam {
                name: "prob_values",
                detail: "probabilities must lie in [0, 1]".to_string(),
            });
        }
        Ok(ProbMask {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.width() + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Loads an 8-bit grayscale mask image; values >= 128 become curb.
pub fn load_mask(path: &Path, grid: &GridConfig) -> Result<CurbMask> {
    let img = open_gray(path, grid)?;
    let mut mask = CurbMask::empty(grid);
    for (x, y, pixel) in img.enumerate_pixels() {
        if pixel.0[0] >= 128 {
            mask.set(y as usize, x as usize, true);
        }
    }
    Ok(mask)
}

/// Writes a mask as an 8-bit grayscale image (curb = 255).
pub fn save_mask(path: &Path, mask: &CurbMask) -> Result<()> {
    mask.to_image().save(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })
}

/// Loads a probability image: gray value / 255.
pub fn load_prob_mask(path: &Path, grid: &GridConfig) -> Result<ProbMask> {
    let img = open_gray(path, grid)?;
    let values = img.pixels().map(|p| p.0[0] as f64 / 255.0).collect();
    ProbMask::new(grid, values)
}

fn open_gray(path: &Path, grid: &GridConfig) -> Result<image::GrayImage> {
    let img = image::open(path)
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        })?
        .into_luma8();
    if img.width() as usize != grid.width() || img.height() as usize != grid.height() {
        return Err(Error::MaskDimensions {
            path: path.to_path_buf(),
            found_w: img.width(),
            found_h: img.height(),
            want_w: grid.width() as u32,
            want_h: grid.height() as u32,
        });
    }
    Ok(img)
}

/// Binarizes a probability mask: curb where value >= t.
pub fn threshold(prob: &ProbMask, t: f64) -> CurbMask {
    let mut mask = CurbMask::empty(prob.grid());
    let width = prob.grid().width();
    for (i, v) in prob.values().iter().enumerate() {
        if *v >= t {
            mask.set(i / width, i % width, true);
        }
    }
    mask
}

/// Marks every cell whose half-open square is crossed by any polyline
/// segment's xy projection: conservative one-pixel-wide line voxelization.
pub fn rasterize_polylines(curbs: &CurbSet, grid: &GridConfig) -> CurbMask {
    let mut mask = CurbMask::empty(grid);
    for poly in curbs.polylines() {
        for (a, b) in poly.segments() {
            rasterize_segment(&mut mask, (a.x, a.y), (b.x, b.y));
        }
    }
    mask
}

/// Marks the cells met by one segment. Degenerate (zero-length) segments
/// mark the single cell containing the point.
pub fn rasterize_segment(mask: &mut CurbMask, a: (f64, f64), b: (f64, f64)) {
    let grid = mask.grid.clone();
    let res = grid.resolution();
    let (xmin, xmax) = grid.x_range();
    let (ymin, ymax) = grid.y_range();
    let (sx0, sx1) = (a.0.min(b.0), a.0.max(b.0));
    let (sy0, sy1) = (a.1.min(b.1), a.1.max(b.1));
    if sx1 < xmin || sx0 >= xmax || sy1 < ymin || sy0 >= ymax {
        return;
    }
    let clamp_cell = |v: f64, n: usize| -> usize {
        if v < 0.0 {
            0
        } else {
            (v as usize).min(n - 1)
        }
    };
    let col_lo = clamp_cell(((sx0 - xmin) / res).floor() - 1.0, grid.width());
    let col_hi = clamp_cell(((sx1 - xmin) / res).floor() + 1.0, grid.width());
    let row_lo = clamp_cell(((sy0 - ymin) / res).floor() - 1.0, grid.height());
    let row_hi = clamp_cell(((sy1 - ymin) / res).floor() + 1.0, grid.height());
    for row in row_lo..=row_hi {
        let ylo = ymin + row as f64 * res;
        for col in col_lo..=col_hi {
            let xlo = xmin + col as f64 * res;
            if segment_meets_cell(a, b, xlo, xlo + res, ylo, ylo + res) {
                mask.set(row, col, true);
            }
        }
    }
}

/// True iff the closed segment (a, b) meets the half-open box
/// `[xlo, xhi) x [ylo, yhi)`.
fn segment_meets_cell(
    a: (f64, f64),
    b: (f64, f64),
    xlo: f64,
    xhi: f64,
    ylo: f64,
    yhi: f64,
) -> bool {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    // Clip the parameter range against the closed box first.
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, d, lo, hi) in [(a.0, dx, xlo, xhi), (a.1, dy, ylo, yhi)] {
        if d == 0.0 {
            if p < lo || p > hi {
                return false;
            }
        } else {
            let mut ta = (lo - p) / d;
            let mut tb = (hi - p) / d;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    let x_at = |t: f64| a.0 + t * dx;
    let y_at = |t: f64| a.1 + t * dy;
    if t0 == t1 {
        return x_at(t0) < xhi && y_at(t0) < yhi;
    }
    // A non-degenerate clipped sub-segment misses the half-open box only
    // when it lies entirely on the open x or y face.
    !(x_at(t0) >= xhi && x_at(t1) >= xhi) && !(y_at(t0) >= yhi && y_at(t1) >= yhi)
}

/// Classical fallback detector: marks cells of the composite lowest-surface
/// map whose maximum height difference to an 8-neighbor falls inside
/// `[grad_min, grad_max]`.
pub fn heuristic_detect(bev: &BevStack, grad_min: f64, grad_max: f64) -> CurbMask {
    assert!(grad_min < grad_max, "grad_min must be below grad_max");
    let grid = bev.grid();
    let surface = bev.composite_min();
    let mut mask = CurbMask::empty(grid);
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    for row in 0..h {
        for col in 0..w {
            let Some(center) = surface[(row * w + col) as usize] else {
                continue;
            };
            let mut max_step = 0.0f64;
            for dr in -1..=1isize {
                for dc in -1..=1isize {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (row + dr, col + dc);
                    if nr < 0 || nr >= h || nc < 0 || nc >= w {
                        continue;
                    }
                    if let Some(n) = surface[(nr * w + nc) as usize] {
                        max_step = max_step.max((center - n).abs());
                    }
                }
            }
            if max_step >= grad_min && max_step <= grad_max {
                mask.set(row as usize, col as usize, true);
            }
        }
    }
    mask
}

/// A provider of per-scan curb masks. Implementations hold no mutable
/// state, so distinct scan indices may be requested concurrently.
pub trait MaskSource: Sync + Send {
    fn mask_for(&self, scan_index: usize, bev: &BevStack) -> Result<CurbMask>;
}

/// Reads pre-computed binary masks from image files.
///
/// `pattern` contains a literal `{index}` placeholder replaced by the
/// six-digit zero-padded scan index, e.g. `mask_{index}.png`.
pub struct FileMasks {
    dir: PathBuf,
    pattern: String,
}

impl FileMasks {
    pub fn new(dir: impl Into<PathBuf>, pattern: impl Into<String>) -> FileMasks {
        FileMasks {
            dir: dir.into(),
            pattern: pattern.into(),
        }
    }

    pub fn path_for(&self, scan_index: usize) -> PathBuf {
        self.dir
            .join(self.pattern.replace("{index}", &format!("{scan_index:06}")))
    }
}

impl MaskSource for FileMasks {
    fn mask_for(&self, scan_index: usize, bev: &BevStack) -> Result<CurbMask> {
        load_mask(&self.path_for(scan_index), bev.grid())
    }
}

/// Reads probability images and binarizes them at a fixed threshold.
pub struct ProbFileMasks {
    files: FileMasks,
    threshold: f64,
}

impl ProbFileMasks {
    pub fn new(dir: impl Into<PathBuf>, pattern: impl Into<String>, t: f64) -> ProbFileMasks {
        ProbFileMasks {
            files: FileMasks::new(dir, pattern),
            threshold: t,
        }
    }
}

impl MaskSource for ProbFileMasks {
    fn mask_for(&self, scan_index: usize, bev: &BevStack) -> Result<CurbMask> {
        let prob = load_prob_mask(&self.files.path_for(scan_index), bev.grid())?;
        Ok(threshold(&prob, self.threshold))
    }
}

/// Rasterizes world-frame ground-truth polylines into each scan's ego grid:
/// the oracle source used for end-to-end verification.
pub struct OracleMasks {
    gt: CurbSet,
    poses: Vec<Pose>,
}

impl OracleMasks {
    pub fn new(gt: CurbSet, poses: Vec<Pose>) -> OracleMasks {
        OracleMasks { gt, poses }
    }
}

impl MaskSource for OracleMasks {
    fn mask_for(&self, scan_index: usize, bev: &BevStack) -> Result<CurbMask> {
        let pose = self.poses.get(scan_index).ok_or(Error::MissingPose { scan_index })?;
        let ego = self.gt.transformed(&pose.inverse());
        Ok(rasterize_polylines(&ego, bev.grid()))
    }
}

/// Wraps [`heuristic_detect`] as a mask source.
pub struct HeuristicMasks {
    pub grad_min: f64,
    pub grad_max: f64,
}

impl Default for HeuristicMasks {
    fn default() -> Self {
        HeuristicMasks {
            grad_min: DEFAULT_GRAD_MIN,
            grad_max: DEFAULT_GRAD_MAX,
        }
    }
}

impl MaskSource for HeuristicMasks {
    fn mask_for(&self, _scan_index: usize, bev: &BevStack) -> Result<CurbMask> {
        Ok(heuristic_detect(bev, self.grad_min, self.grad_max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bev::project;
    use crate::geom::Scan;
    use crate::polyline::Polyline3D;
    use proptest::prelude::*;

    fn small_grid() -> GridConfig {
        GridConfig::new(0.1, (0.0, 1.0), (0.0, 1.0), vec![-1.0, 1.0]).unwrap()
    }

    /// Independent oracle: feasible parameter interval per axis with
    /// explicit open/closed endpoints.
    fn segment_meets_cell_oracle(
        a: (f64, f64),
        b: (f64, f64),
        xlo: f64,
        xhi: f64,
        ylo: f64,
        yhi: f64,
    ) -> bool {
        #[derive(Clone, Copy)]
        struct Interval {
            lo: f64,
            lo_open: bool,
            hi: f64,
            hi_open: bool,
        }
        let full = Interval {
            lo: 0.0,
            lo_open: false,
            hi: 1.0,
            hi_open: false,
        };
        let axis = |p: f64, d: f64, lo: f64, hi: f64| -> Option<Interval> {
            if d == 0.0 {
                return (p >= lo && p < hi).then_some(full);
            }
            let t_lo = (lo - p) / d;
            let t_hi = (hi - p) / d;
            Some(if d > 0.0 {
                Interval {
                    lo: t_lo,
                    lo_open: false,
                    hi: t_hi,
                    hi_open: true,
                }
            } else {
                Interval {
                    lo: t_hi,
                    lo_open: true,
                    hi: t_lo,
                    hi_open: false,
                }
            })
        };
        let intersect = |l: Interval, r: Interval| -> Interval {
            let (lo, lo_open) = if l.lo > r.lo {
                (l.lo, l.lo_open)
            } else if r.lo > l.lo {
                (r.lo, r.lo_open)
            } else {
                (l.lo, l.lo_open || r.lo_open)
            };
            let (hi, hi_open) = if l.hi < r.hi {
                (l.hi, l.hi_open)
            } else if r.hi < l.hi {
                (r.hi, r.hi_open)
            } else {
                (l.hi, l.hi_open || r.hi_open)
            };
            Interval {
                lo,
                lo_open,
                hi,
                hi_open,
            }
        };
        let Some(ix) = axis(a.0, b.0 - a.0, xlo, xhi) else {
            return false;
        };
        let Some(iy) = axis(a.1, b.1 - a.1, ylo, yhi) else {
            return false;
        };
        let i = intersect(intersect(full, ix), iy);
        i.lo < i.hi || (i.lo == i.hi && !i.lo_open && !i.hi_open)
    }

    fn rasterize_oracle(curbs: &CurbSet, grid: &GridConfig) -> Vec<(usize, usize)> {
        let res = grid.resolution();
        let (xmin, _) = grid.x_range();
        let (ymin, _) = grid.y_range();
        let mut cells = Vec::new();
        for row in 0..grid.height() {
            for col in 0..grid.width() {
                let xlo = xmin + col as f64 * res;
                let ylo = ymin + row as f64 * res;
                let hit = curbs.polylines().any(|p| {
                    p.segments().any(|(a, b)| {
                        segment_meets_cell_oracle(
                            (a.x, a.y),
                            (b.x, b.y),
                            xlo,
                            xlo + res,
                            ylo,
                            ylo + res,
                        )
                    })
                });
                if hit {
                    cells.push((row, col));
                }
            }
        }
        cells
    }

    #[test]
    fn threshold_degenerate_bounds() {
        let grid = small_grid();
        let n = grid.num_cells();
        let prob = ProbMask::new(&grid, vec![0.7; n]).unwrap();
        assert_eq!(threshold(&prob, 0.0).count(), n);
        assert_eq!(threshold(&prob, 1.0).count(), 0);
    }

    #[test]
    fn threshold_compares_inclusively() {
        let grid = GridConfig::new(0.5, (0.0, 1.0), (0.0, 0.5), vec![0.0, 1.0]).unwrap();
        let prob = ProbMask::new(&grid, vec![0.4, 0.6]).unwrap();
        let mask = threshold(&prob, 0.5);
        assert!(!mask.get(0, 0));
        assert!(mask.get(0, 1));
    }

    #[test]
    fn mask_image_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.png");
        let grid = small_grid();
        let mut mask = CurbMask::empty(&grid);
        mask.set(0, 0, true);
        mask.set(3, 7, true);
        mask.set(9, 9, true);
        save_mask(&path, &mask).unwrap();
        let back = load_mask(&path, &grid).unwrap();
        assert_eq!(back, mask);
    }

    #[test]
    fn load_mask_thresholds_at_128() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("levels.png");
        let grid = GridConfig::new(0.5, (0.0, 2.0), (0.0, 0.5), vec![0.0, 1.0]).unwrap();
        let img = image::GrayImage::from_vec(4, 1, vec![0, 127, 128, 255]).unwrap();
        img.save(&path).unwrap();
        let mask = load_mask(&path, &grid).unwrap();
        let bits: Vec<bool> = (0..4).map(|c| mask.get(0, c)).collect();
        assert_eq!(bits, vec![false, false, true, true]);
    }

    #[test]
    fn load_mask_rejects_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("small.png");
        let grid = small_grid();
        image::GrayImage::new(9, 10).save(&path).unwrap();
        assert!(matches!(
            load_mask(&path, &grid),
            Err(Error::MaskDimensions { found_w: 9, .. })
        ));
    }

    #[test]
    fn horizontal_segment_marks_exactly_its_row_of_cells() {
        let grid = small_grid();
        let mut mask = CurbMask::empty(&grid);
        // Centers of cells (2, 0) and (2, 9): strictly inside row 2.
        rasterize_segment(&mut mask, (0.05, 0.25), (0.95, 0.25));
        let cells: Vec<(usize, usize)> = mask.iter_set().collect();
        let expected: Vec<(usize, usize)> = (0..10).map(|c| (2, c)).collect();
        assert_eq!(cells, expected);
    }

    #[test]
    fn zero_length_segment_marks_a_single_cell() {
        let grid = small_grid();
        let mut mask = CurbMask::empty(&grid);
        rasterize_segment(&mut mask, (0.35, 0.75), (0.35, 0.75));
        let cells: Vec<(usize, usize)> = mask.iter_set().collect();
        assert_eq!(cells, vec![(7, 3)]);
    }

    #[test]
    fn diagonal_through_corners_matches_brute_force_and_stays_thin() {
        let grid = small_grid();
        let a = grid.pixel_to_metric(0, 0);
        let b = grid.pixel_to_metric(4, 4);
        let poly = Polyline3D::from_coords(&[(a.0, a.1, 0.0), (b.0, b.1, 0.0)]).unwrap();
        let set = CurbSet::from_polylines(vec![poly]);
        let mask = rasterize_polylines(&set, &grid);
        let cells: Vec<(usize, usize)> = mask.iter_set().collect();
        assert_eq!(cells, rasterize_oracle(&set, &grid));
        // Half-open cells make the corner-crossing diagonal one pixel wide.
        let expected: Vec<(usize, usize)> = (0..5).map(|k| (k, k)).collect();
        assert_eq!(cells, expected);
    }

    #[test]
    fn random_segments_match_brute_force_rasterization() {
        let grid = small_grid();
        let mut rng_state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let coords = [
                (next() * 1.4 - 0.2, next() * 1.4 - 0.2, 0.0),
                (next() * 1.4 - 0.2, next() * 1.4 - 0.2, 0.0),
            ];
            let Ok(poly) = Polyline3D::from_coords(&coords) else {
                continue;
            };
            let set = CurbSet::from_polylines(vec![poly]);
            let mask = rasterize_polylines(&set, &grid);
            let cells: Vec<(usize, usize)> = mask.iter_set().collect();
            assert_eq!(cells, rasterize_oracle(&set, &grid), "coords {coords:?}");
        }
    }

    #[test]
    fn heuristic_flags_exactly_the_step_flanks() {
        // A flat plane at -1.7 for x < 0.5 and -1.6 beyond: a 0.10 m step
        // between columns 4 and 5.
        let grid = small_grid();
        let mut coords = Vec::new();
        for row in 0..10 {
            for col in 0..10 {
                let (x, y) = grid.pixel_to_metric(row, col);
                let z = if col < 5 { -1.7 } else { -1.6 };
                coords.push((x, y, z));
            }
        }
        let scan = Scan::from_coords(0, &coords);
        let (bev, _, _) = project(&scan, &GridConfig::new(0.1, (0.0, 1.0), (0.0, 1.0), vec![-2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5]).unwrap());
        let mask = heuristic_detect(&bev, DEFAULT_GRAD_MIN, DEFAULT_GRAD_MAX);
        // Independent neighborhood scan over the analytic surface.
        for row in 0..10 {
            for col in 0..10 {
                let expected = col == 4 || col == 5;
                assert_eq!(mask.get(row, col), expected, "cell ({row},{col})");
            }
        }
    }

    #[test]
    fn heuristic_ignores_flat_ground_and_walls() {
        let grid = GridConfig::new(0.1, (0.0, 1.0), (0.0, 1.0), vec![-2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5]).unwrap();
        let mut flat = Vec::new();
        let mut wall = Vec::new();
        for row in 0..10 {
            for col in 0..10 {
                let (x, y) = grid.pixel_to_metric(row, col);
                flat.push((x, y, -1.7));
                wall.push((x, y, if col < 5 { -1.7 } else { -1.2 }));
            }
        }
        let (bev_flat, _, _) = project(&Scan::from_coords(0, &flat), &grid);
        assert_eq!(heuristic_detect(&bev_flat, DEFAULT_GRAD_MIN, DEFAULT_GRAD_MAX).count(), 0);
        let (bev_wall, _, _) = project(&Scan::from_coords(0, &wall), &grid);
        assert_eq!(heuristic_detect(&bev_wall, DEFAULT_GRAD_MIN, DEFAULT_GRAD_MAX).count(), 0);
    }

    proptest! {
        /// Raising the threshold never adds pixels.
        #[test]
        fn threshold_is_monotone(
            values in proptest::collection::vec(0.0f64..=1.0, 100),
            t1 in 0.0f64..=1.0,
            t2 in 0.0f64..=1.0,
        ) {
            let grid = small_grid();
            let prob = ProbMask::new(&grid, values).unwrap();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let coarse = threshold(&prob, hi);
            let fine = threshold(&prob, lo);
            for (r, c) in coarse.iter_set() {
                prop_assert!(fine.get(r, c));
            }
        }

        /// Cells of points sampled along a polyline at half-resolution steps
        /// are always covered by the rasterization.
        #[test]
        fn rasterization_covers_sampled_points(
            pts in proptest::collection::vec((0.05f64..0.95, 0.05f64..0.95), 2..6)
        ) {
            let grid = small_grid();
            let coords: Vec<(f64, f64, f64)> = pts.iter().map(|&(x, y)| (x, y, 0.0)).collect();
            let Ok(poly) = Polyline3D::from_coords(&coords) else {
                return Ok(());
            };
            let set = CurbSet::from_polylines(vec![poly.clone()]);
            let mask = rasterize_polylines(&set, &grid);
            let step = grid.resolution() / 2.0;
            let mut s = 0.0;
            let total = poly.length();
            while s <= total {
                let p = poly.point_at(s);
                if let Some((row, col)) = grid.metric_to_pixel(p.x, p.y) {
                    prop_assert!(mask.get(row, col), "uncovered sample at {p:?}");
                }
                s += step;
            }
        }
    }
}
