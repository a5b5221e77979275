//! Skeleton extraction for elongated point clusters.
//!
//! Points are first contracted onto their local centroids so ribbon-shaped
//! clusters collapse toward a centerline. The contracted cloud is voxelized,
//! occupied-voxel centroids become graph nodes (near-coincident nodes from
//! boundary-straddling sheets are merged), nodes in 26-adjacent voxels are
//! linked, disconnected components are bridged by their shortest links, a
//! minimum spanning tree is taken, and short leaf branches are pruned. The
//! surviving tree decomposes into maximal degree-2 paths, the linear traces
//! of the curbs.

use std::collections::{BTreeSet, HashMap};

use nalgebra::Vector3;

use super::voxel::voxel_key;
use crate::polyline::{Polyline3D, MIN_VERTEX_SEPARATION};

/// Local-centroid contraction passes before voxelization.
const CONTRACTION_ITERS: usize = 3;

/// Nodes closer than this fraction of the voxel edge merge into one.
const MERGE_FRACTION: f64 = 0.5;

/// An undirected graph over 3D node positions. After construction it is a
/// tree (or a single node) per input cluster.
#[derive(Debug, Clone, Default)]
pub struct SkeletonGraph {
    nodes: Vec<Vector3<f64>>,
    edges: Vec<(usize, usize)>,
}

impl SkeletonGraph {
    pub fn nodes(&self) -> &[Vector3<f64>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.nodes.len()];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> DisjointSet {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Keep the smaller index as root for deterministic compaction.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Pulls every point toward the centroid of its `radius`-neighborhood.
/// Ribbons narrower than about twice the radius collapse onto their
/// centerline, which keeps the voxel graph one node thick.
fn contract_to_local_centers(points: &[Vector3<f64>], radius: f64) -> Vec<Vector3<f64>> {
    let mut positions = points.to_vec();
    let r2 = radius * radius;
    for _ in 0..CONTRACTION_ITERS {
        let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in positions.iter().enumerate() {
            buckets.entry(voxel_key(p, radius)).or_default().push(i);
        }
        positions = positions
            .iter()
            .map(|p| {
                let center = voxel_key(p, radius);
                let mut sum = Vector3::zeros();
                let mut count = 0usize;
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for dz in -1..=1 {
                            let key = (center.0 + dx, center.1 + dy, center.2 + dz);
                            if let Some(bucket) = buckets.get(&key) {
                                for &j in bucket {
                                    if (positions[j] - p).norm_squared() <= r2 {
                                        sum += positions[j];
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                }
                sum / count as f64
            })
            .collect();
    }
    positions
}

/// Builds the pruned skeleton tree of one cluster.
pub fn skeletonize(cluster: &[Vector3<f64>], skeleton_voxel: f64, prune_len: f64) -> SkeletonGraph {
    assert!(skeleton_voxel > 0.0, "skeleton_voxel must be positive");
    if cluster.is_empty() {
        return SkeletonGraph::default();
    }
    let contracted = contract_to_local_centers(cluster, skeleton_voxel);

    // Occupied-voxel centroids, slots in first-seen order.
    let mut slot_of: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut slot_keys: Vec<(i64, i64, i64)> = Vec::new();
    let mut sums: Vec<(Vector3<f64>, usize)> = Vec::new();
    for p in &contracted {
        let key = voxel_key(p, skeleton_voxel);
        let slot = *slot_of.entry(key).or_insert_with(|| {
            slot_keys.push(key);
            sums.push((Vector3::zeros(), 0));
            sums.len() - 1
        });
        sums[slot].0 += p;
        sums[slot].1 += 1;
    }
    let centroids: Vec<Vector3<f64>> = sums.iter().map(|(s, c)| s / *c as f64).collect();

    // Adjacent slots whose centroids nearly coincide are artifacts of a thin
    // sheet straddling a voxel boundary: merge them.
    let merge_limit = MERGE_FRACTION * skeleton_voxel;
    let mut merged = DisjointSet::new(centroids.len());
    let neighbor_slots = |slot: usize| -> Vec<usize> {
        let key = slot_keys[slot];
        let mut out = Vec::new();
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    if (dx, dy, dz) == (0, 0, 0) {
                        continue;
                    }
                    if let Some(&j) = slot_of.get(&(key.0 + dx, key.1 + dy, key.2 + dz)) {
                        out.push(j);
                    }
                }
            }
        }
        out
    };
    for slot in 0..centroids.len() {
        for j in neighbor_slots(slot) {
            if (centroids[slot] - centroids[j]).norm() < merge_limit {
                merged.union(slot, j);
            }
        }
    }
    let mut node_of_slot = vec![usize::MAX; centroids.len()];
    let mut node_sums: Vec<(Vector3<f64>, usize)> = Vec::new();
    for slot in 0..centroids.len() {
        let root = merged.find(slot);
        if node_of_slot[root] == usize::MAX {
            node_of_slot[root] = node_sums.len();
            node_sums.push((Vector3::zeros(), 0));
        }
        let node = node_of_slot[root];
        node_of_slot[slot] = node;
        node_sums[node].0 += sums[slot].0;
        node_sums[node].1 += sums[slot].1;
    }
    let nodes: Vec<Vector3<f64>> = node_sums.iter().map(|(s, c)| s / *c as f64).collect();

    // 26-neighborhood adjacency, lifted to merged nodes.
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for slot in 0..centroids.len() {
        let a = node_of_slot[slot];
        for j in neighbor_slots(slot) {
            let b = node_of_slot[j];
            if a != b {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut edges: Vec<(f64, usize, usize)> = pairs
        .into_iter()
        .map(|(u, v)| ((nodes[u] - nodes[v]).norm(), u, v))
        .collect();

    // Bridge disconnected components by their shortest inter-component link.
    let mut components = DisjointSet::new(nodes.len());
    for &(_, u, v) in &edges {
        components.union(u, v);
    }
    loop {
        let mut roots: Vec<usize> = (0..nodes.len()).map(|i| components.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() <= 1 {
            break;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if components.find(i) == components.find(j) {
                    continue;
                }
                let d = (nodes[i] - nodes[j]).norm();
                let candidate = (d, i, j);
                if best.is_none_or(|b| candidate.partial_cmp(&b) == Some(std::cmp::Ordering::Less))
                {
                    best = Some(candidate);
                }
            }
        }
        let (d, i, j) = best.expect("disconnected graph has a bridging pair");
        edges.push((d, i, j));
        components.union(i, j);
    }

    // Minimum spanning tree (Kruskal, deterministic tie order).
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite edge weights"));
    let mut forest = DisjointSet::new(nodes.len());
    let mut tree: Vec<(usize, usize)> = Vec::new();
    for &(_, u, v) in &edges {
        if forest.union(u, v) {
            tree.push((u, v));
        }
    }

    prune(SkeletonGraph { nodes, edges: tree }, prune_len)
}

/// Iteratively removes leaf branches shorter than `prune_len` that hang off
/// a junction. Branches ending at another leaf form the trunk itself and
/// are kept.
fn prune(graph: SkeletonGraph, prune_len: f64) -> SkeletonGraph {
    let n = graph.nodes.len();
    let mut removed = vec![false; n];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &graph.edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    loop {
        let degree = |i: usize, removed: &[bool]| -> usize {
            adjacency[i].iter().filter(|&&j| !removed[j]).count()
        };
        let mut pruned_any = false;
        for leaf in 0..n {
            if removed[leaf] || degree(leaf, &removed) != 1 {
                continue;
            }
            // Walk inward until a junction or the opposite leaf.
            let mut branch = vec![leaf];
            let mut length = 0.0;
            let mut prev = leaf;
            let mut cur = *adjacency[leaf]
                .iter()
                .find(|&&j| !removed[j])
                .expect("leaf has a live neighbor");
            length += (graph.nodes[leaf] - graph.nodes[cur]).norm();
            while degree(cur, &removed) == 2 {
                let next = *adjacency[cur]
                    .iter()
                    .find(|&&j| !removed[j] && j != prev)
                    .expect("degree-2 node has a second live neighbor");
                branch.push(cur);
                length += (graph.nodes[cur] - graph.nodes[next]).norm();
                prev = cur;
                cur = next;
            }
            if degree(cur, &removed) >= 3 && length < prune_len {
                for node in branch {
                    removed[node] = true;
                }
                pruned_any = true;
                break;
            }
        }
        if !pruned_any {
            break;
        }
    }

    // Compact the surviving nodes.
    let mut remap = vec![usize::MAX; n];
    let mut nodes = Vec::new();
    for i in 0..n {
        if !removed[i] {
            remap[i] = nodes.len();
            nodes.push(graph.nodes[i]);
        }
    }
    let edges = graph
        .edges
        .iter()
        .filter(|(u, v)| !removed[*u] && !removed[*v])
        .map(|&(u, v)| (remap[u], remap[v]))
        .collect();
    SkeletonGraph { nodes, edges }
}

/// Decomposes a pruned tree into maximal paths whose interior nodes all have
/// degree 2. Every edge lands in exactly one path; single nodes vanish.
pub fn graph_to_polylines(graph: &SkeletonGraph) -> Vec<Polyline3D> {
    let n = graph.nodes.len();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (edge_id, &(u, v)) in graph.edges.iter().enumerate() {
        adjacency[u].push((v, edge_id));
        adjacency[v].push((u, edge_id));
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let degrees = graph.degrees();
    let mut used = vec![false; graph.edges.len()];
    let mut polylines = Vec::new();

    for start in 0..n {
        if degrees[start] == 2 {
            continue;
        }
        for k in 0..adjacency[start].len() {
            let (mut cur, first_edge) = adjacency[start][k];
            if used[first_edge] {
                continue;
            }
            used[first_edge] = true;
            let mut path = vec![start, cur];
            while degrees[cur] == 2 {
                let Some(&(next, edge)) = adjacency[cur].iter().find(|(_, e)| !used[*e]) else {
                    break;
                };
                used[edge] = true;
                path.push(next);
                cur = next;
            }
            if let Some(poly) = path_to_polyline(graph, &path) {
                polylines.push(poly);
            }
        }
    }
    polylines
}

fn path_to_polyline(graph: &SkeletonGraph, path: &[usize]) -> Option<Polyline3D> {
    let mut vertices: Vec<Vector3<f64>> = Vec::with_capacity(path.len());
    for &node in path {
        let v = graph.nodes[node];
        if vertices
            .last()
            .is_some_and(|last| (v - last).norm() < MIN_VERTEX_SEPARATION)
        {
            continue;
        }
        vertices.push(v);
    }
    (vertices.len() >= 2).then(|| Polyline3D::new_unchecked(vertices))
}
