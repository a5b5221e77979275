//! Ramer–Douglas–Peucker polyline simplification with 3D point-to-segment
//! distances. Endpoints are always retained; an interior vertex survives iff
//! its distance to the current chord exceeds the tolerance at some level.

use crate::polyline::{point_segment_distance, Polyline3D};

pub fn simplify_rdp(polyline: &Polyline3D, epsilon: f64) -> Polyline3D {
    assert!(epsilon >= 0.0, "epsilon must be non-negative");
    let vertices = polyline.vertices();
    let n = vertices.len();
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((a, b)) = stack.pop() {
        if b - a < 2 {
            continue;
        }
        let mut best = (a + 1, f64::NEG_INFINITY);
        for i in (a + 1)..b {
            let d = point_segment_distance(&vertices[i], &vertices[a], &vertices[b]);
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.1 > epsilon {
            keep[best.0] = true;
            stack.push((a, best.0));
            stack.push((best.0, b));
        }
    }
    let kept: Vec<_> = vertices
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(v, _)| *v)
        .collect();
    Polyline3D::new_unchecked(kept)
}
