//! Synthetic road-like networks.
//!
//! A bidirected grid of intersections whose streets are subdivided into
//! chains of short segments, with small dead-end trees hanging off some
//! intersections. Travel times come from segment length and a per-street
//! speed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CombineSpec, CostVector, MAX_ADD_COMPONENT};
use crate::graph::{Coord, Graph, NodeId};
use crate::io::haversine_meters;

#[derive(Debug, Clone, PartialEq)]
pub struct RoadGridConfig {
    pub rows: usize,
    pub cols: usize,
    /// Segments per street, inclusive range.
    pub min_segments: u32,
    pub max_segments: u32,
    /// Fraction of intersections that get a dead-end tree.
    pub tree_fraction: f64,
    /// Largest number of nodes in one dead-end tree.
    pub max_tree_nodes: usize,
    /// Distance between neighboring intersections in degrees.
    pub spacing: f64,
}

impl RoadGridConfig {
    pub fn new(rows: usize, cols: usize) -> Self {
        RoadGridConfig {
            rows,
            cols,
            min_segments: 2,
            max_segments: 10,
            tree_fraction: 0.2,
            max_tree_nodes: 6,
            spacing: 0.005,
        }
    }
}

/// Output of [`road_grid`]. Intersections are nodes `0..rows*cols` in
/// row-major order.
#[derive(Debug, Clone)]
pub struct RoadGrid {
    pub graph: Graph,
    pub intersections: usize,
}

/// Deciseconds to drive `meters` at `kmh`, at least 1.
fn travel_time(meters: u64, kmh: u32) -> u32 {
    let ds = (meters as f64 * 36.0 / kmh as f64).round() as u64;
    ds.clamp(1, MAX_ADD_COMPONENT as u64) as u32
}

/// Builds the network with one additive cost component (travel time in
/// deciseconds) and coordinates.
pub fn road_grid(cfg: &RoadGridConfig, seed: u64) -> RoadGrid {
    assert!(cfg.rows >= 1 && cfg.cols >= 1, "grid needs at least one intersection");
    assert!(1 <= cfg.min_segments && cfg.min_segments <= cfg.max_segments);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Coord { lat: 48.0, lon: 8.0 };
    let mut coords: Vec<Coord> = Vec::new();
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            coords.push(Coord {
                lat: base.lat + r as f64 * cfg.spacing,
                lon: base.lon + c as f64 * cfg.spacing,
            });
        }
    }
    let intersections = coords.len();
    let mut arcs: Vec<(NodeId, NodeId, u32)> = Vec::new();
    let mut street = |a: NodeId, b: NodeId, coords: &mut Vec<Coord>, rng: &mut ChaCha8Rng| {
        let segments = rng.gen_range(cfg.min_segments..=cfg.max_segments);
        let kmh = *[30u32, 50, 50, 70, 100].get(rng.gen_range(0..5)).unwrap();
        let (ca, cb) = (coords[a as usize], coords[b as usize]);
        let jitter = cfg.spacing / (8.0 * segments as f64);
        let mut prev = a;
        for s in 1..=segments {
            let next = if s == segments {
                b
            } else {
                let f = s as f64 / segments as f64;
                coords.push(Coord {
                    lat: ca.lat + f * (cb.lat - ca.lat) + rng.gen_range(-jitter..=jitter),
                    lon: ca.lon + f * (cb.lon - ca.lon) + rng.gen_range(-jitter..=jitter),
                });
                (coords.len() - 1) as NodeId
            };
            let t = travel_time(
                haversine_meters(coords[prev as usize], coords[next as usize]),
                kmh,
            );
            arcs.push((prev, next, t));
            arcs.push((next, prev, t));
            prev = next;
        }
    };
    let id = |r: usize, c: usize| (r * cfg.cols + c) as NodeId;
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            if c + 1 < cfg.cols {
                street(id(r, c), id(r, c + 1), &mut coords, &mut rng);
            }
            if r + 1 < cfg.rows {
                street(id(r, c), id(r + 1, c), &mut coords, &mut rng);
            }
        }
    }

    // dead-end trees: every new node hangs off a random earlier tree node
    let mut tree: Vec<NodeId> = Vec::new();
    for v in 0..intersections as NodeId {
        if !rng.gen_bool(cfg.tree_fraction) {
            continue;
        }
        tree.clear();
        tree.push(v);
        let size = rng.gen_range(1..=cfg.max_tree_nodes.max(1));
        for _ in 0..size {
            let parent = tree[rng.gen_range(0..tree.len())];
            let p = coords[parent as usize];
            let off = cfg.spacing / 6.0;
            coords.push(Coord {
                lat: p.lat + rng.gen_range(-off..=off),
                lon: p.lon + rng.gen_range(-off..=off),
            });
            let child = (coords.len() - 1) as NodeId;
            let t = travel_time(haversine_meters(p, coords[child as usize]), 30);
            arcs.push((parent, child, t));
            arcs.push((child, parent, t));
            tree.push(child);
        }
    }

    let n = coords.len();
    let mut graph = Graph::from_arcs(
        n,
        CombineSpec::additive(1),
        arcs.into_iter().map(|(u, v, t)| (u, v, CostVector(vec![t]))),
    )
    .expect("generated endpoints are valid");
    graph.set_coords(Some(coords)).expect("one coordinate per node");
    RoadGrid {
        graph,
        intersections,
    }
}
