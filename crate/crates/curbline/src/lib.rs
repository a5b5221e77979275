//! Sequence-level 3D curb pre-annotation from LiDAR point clouds.
//!
//! The pipeline turns a directory of scans plus a vehicle odometry file into
//! simplified 3D curb polylines stored as ASAM OpenLABEL JSON:
//!
//! 1. **bev** – project each scan into an M-slice bird's-eye-view height-map
//!    stack, keeping a pixel → point index for the later 3D lift.
//! 2. **mask** – obtain a per-scan binary curb mask from one of several
//!    interchangeable sources (model-output image files, rasterized ground
//!    truth, or a classical height-gradient heuristic).
//! 3. **lift** – join curb pixels with the points that project into them,
//!    keep the lowest return per pixel, and filter by curb height.
//! 4. **reconstruct** – accumulate the per-scan curb points into a single
//!    world-frame cloud using the odometry poses.
//! 5. **annotate** – voxel downsampling, DBSCAN clustering, skeletonization
//!    and Ramer–Douglas–Peucker simplification yield one polyline per curb.
//! 6. **openlabel** – canonical serialization of the curb set.
//!
//! The [`eval`] module scores binary masks (pixel precision/recall at a pixel
//! tolerance) and polyline sets (sampled 3D point matching at a metric
//! tolerance). The [`synth`] module generates synthetic street scenes with
//! exact ground truth so the whole pipeline can be verified end to end.

pub mod annotate;
pub mod bev;
pub mod error;
pub mod eval;
pub mod geom;
pub mod io;
pub mod lift;
pub mod mask;
pub mod openlabel;
pub mod pipeline;
pub mod polyline;
pub mod reconstruct;
pub mod synth;

pub use error::{Error, Result};
