//! Bird's-eye-view projection: M-slice height-map stacks plus the
//! pixel → point index needed by the 2D→3D lift.
//!
//! Cells use half-open intervals `[min, max)` on both axes and per slice,
//! with floor binning, so every point maps to exactly one cell and slice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Scan;

/// BEV discretization: extents, resolution and height-slice boundaries.
///
/// `width` and `height` are derived from the extents and resolution at
/// construction. Columns follow x, rows follow y.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    resolution: f64,
    width: usize,
    height: usize,
    x_range: (f64, f64),
    y_range: (f64, f64),
    slice_bounds: Vec<f64>,
}

impl GridConfig {
    pub fn new(
        resolution: f64,
        x_range: (f64, f64),
        y_range: (f64, f64),
        slice_bounds: Vec<f64>,
    ) -> Result<GridConfig> {
        if !resolution.is_finite() || resolution <= 0.0 {
            return Err(Error::InvalidGrid {
                detail: format!("resolution {resolution} must be positive"),
            });
        }
        for (name, range) in [("x_range", x_range), ("y_range", y_range)] {
            if !range.0.is_finite() || !range.1.is_finite() || range.0 >= range.1 {
                return Err(Error::InvalidGrid {
                    detail: format!("{name} [{}, {}) is not a valid extent", range.0, range.1),
                });
            }
        }
        let cells = |extent: f64| -> Result<usize> {
            let exact = extent / resolution;
            let n = exact.round();
            if n < 1.0 || (exact - n).abs() > 1e-6 {
                return Err(Error::InvalidGrid {
                    detail: format!(
                        "extent {extent} is not an integral number of {resolution} cells"
                    ),
                });
            }
            Ok(n as usize)
        };
        let width = cells(x_range.1 - x_range.0)?;
        let height = cells(y_range.1 - y_range.0)?;
        if slice_bounds.len() < 2 {
            return Err(Error::InvalidGrid {
                detail: "need at least one height slice (two bounds)".to_string(),
            });
        }
        if slice_bounds.iter().any(|v| !v.is_finite())
            || slice_bounds.windows(2).any(|p| p[0] >= p[1])
        {
            return Err(Error::InvalidGrid {
                detail: "slice bounds must be finite and strictly ascending".to_string(),
            });
        }
        Ok(GridConfig {
            resolution,
            width,
            height,
            x_range,
            y_range,
            slice_bounds,
        })
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    pub fn slice_bounds(&self) -> &[f64] {
        &self.slice_bounds
    }

    pub fn num_slices(&self) -> usize {
        self.slice_bounds.len() - 1
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    /// Maps metric coordinates to `(row, col)`, or `None` outside the
    /// half-open extents.
    pub fn metric_to_pixel(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !(x >= self.x_range.0 && x < self.x_range.1 && y >= self.y_range.0 && y < self.y_range.1)
        {
            return None;
        }
        let col = (((x - self.x_range.0) / self.resolution).floor() as usize).min(self.width - 1);
        let row = (((y - self.y_range.0) / self.resolution).floor() as usize).min(self.height - 1);
        Some((row, col))
    }

    /// Cell-center coordinates of an in-bounds pixel.
    ///
    /// Panics if `(row, col)` is outside the grid.
    pub fn pixel_to_metric(&self, row: usize, col: usize) -> (f64, f64) {
        assert!(
            row < self.height && col < self.width,
            "pixel ({row}, {col}) outside {}x{} grid",
            self.height,
            self.width
        );
        (
            self.x_range.0 + (col as f64 + 0.5) * self.resolution,
            self.y_range.0 + (row as f64 + 0.5) * self.resolution,
        )
    }

    /// Slice index for a height, or `None` outside the slice stack.
    pub fn slice_of(&self, z: f64) -> Option<usize> {
        let bounds = &self.slice_bounds;
        if !(z >= bounds[0] && z < bounds[bounds.len() - 1]) {
            return None;
        }
        Some(bounds.partition_point(|b| *b <= z) - 1)
    }
}

impl Default for GridConfig {
    /// 512x512 cells at 0.1 m/px, ego-centered extents [-25.6, 25.6),
    /// six 0.5 m slices over z in [-2.5, 0.5).
    fn default() -> GridConfig {
        GridConfig::new(
            0.1,
            (-25.6, 25.6),
            (-25.6, 25.6),
            vec![-2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5],
        )
        .expect("default grid is valid")
    }
}

/// Serialized form: width/height are derived, so only the defining fields
/// travel.
#[derive(Serialize, Deserialize)]
struct GridConfigWire {
    resolution: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    slice_bounds: Vec<f64>,
}

impl Serialize for GridConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GridConfigWire {
            resolution: self.resolution,
            x_range: self.x_range,
            y_range: self.y_range,
            slice_bounds: self.slice_bounds.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GridConfig {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<GridConfig, D::Error> {
        let wire = GridConfigWire::deserialize(deserializer)?;
        GridConfig::new(wire.resolution, wire.x_range, wire.y_range, wire.slice_bounds)
            .map_err(serde::de::Error::custom)
    }
}

/// M per-slice height maps; each cell holds the maximum z of the points
/// falling into that cell and slice, or stays empty.
#[derive(Debug, Clone)]
pub struct BevStack {
    grid: GridConfig,
    channels: Vec<Vec<Option<f64>>>,
}

impl BevStack {
    fn empty(grid: GridConfig) -> BevStack {
        let cells = grid.num_cells();
        let channels = vec![vec![None; cells]; grid.num_slices()];
        BevStack { grid, channels }
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn value(&self, channel: usize, row: usize, col: usize) -> Option<f64> {
        self.channels[channel][row * self.grid.width() + col]
    }

    pub fn channel(&self, channel: usize) -> &[Option<f64>] {
        &self.channels[channel]
    }

    /// Per-cell minimum over the non-empty channel values: an estimate of
    /// the lowest surface seen in each cell.
    pub fn composite_min(&self) -> Vec<Option<f64>> {
        let mut out = vec![None; self.grid.num_cells()];
        for channel in &self.channels {
            for (cell, value) in out.iter_mut().zip(channel.iter()) {
                if let Some(v) = value {
                    *cell = Some(cell.map_or(*v, |c: f64| c.min(*v)));
                }
            }
        }
        out
    }

    /// Renders one channel as an 8-bit grayscale image with linear min-max
    /// normalization; empty cells map to the channel minimum (0).
    pub fn channel_to_image(&self, channel: usize) -> image::GrayImage {
        let values = &self.channels[channel];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values.iter().flatten() {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        let w = self.grid.width() as u32;
        let h = self.grid.height() as u32;
        image::GrayImage::from_fn(w, h, |x, y| {
            let cell = values[y as usize * self.grid.width() + x as usize];
            let g = cell.map_or(0.0, |v| (v - lo) / span * 255.0);
            image::Luma([g.round().clamp(0.0, 255.0) as u8])
        })
    }
}

/// Per-pixel list of `(point id, z)` for every in-extent point of the scan,
/// regardless of slice: the lift needs candidates below the lowest slice.
#[derive(Debug, Clone)]
pub struct PixelPointIndex {
    grid: GridConfig,
    cells: Vec<Vec<(usize, f64)>>,
}

impl PixelPointIndex {
    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn candidates(&self, row: usize, col: usize) -> &[(usize, f64)] {
        &self.cells[row * self.grid.width() + col]
    }

    pub fn total_entries(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }
}

/// Counts from one projection pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionSummary {
    pub total_points: usize,
    pub in_extent: usize,
    pub outside_extent: usize,
    /// In-extent points whose height falls outside the slice stack; they
    /// appear in the index but in no channel.
    pub outside_slices: usize,
}

/// Projects a scan onto the grid.
pub fn project(scan: &Scan, grid: &GridConfig) -> (BevStack, PixelPointIndex, ProjectionSummary) {
    let mut stack = BevStack::empty(grid.clone());
    let mut index = PixelPointIndex {
        grid: grid.clone(),
        cells: vec![Vec::new(); grid.num_cells()],
    };
    let mut summary = ProjectionSummary {
        total_points: scan.points.len(),
        ..ProjectionSummary::default()
    };
    let width = grid.width();
    for p in &scan.points {
        let Some((row, col)) = grid.metric_to_pixel(p.x, p.y) else {
            summary.outside_extent += 1;
            continue;
        };
        summary.in_extent += 1;
        index.cells[row * width + col].push((p.id, p.z));
        match grid.slice_of(p.z) {
            Some(slice) => {
                let cell = &mut stack.channels[slice][row * width + col];
                *cell = Some(cell.map_or(p.z, |c: f64| c.max(p.z)));
            }
            None => summary.outside_slices += 1,
        }
    }
    (stack, index, summary)
}
