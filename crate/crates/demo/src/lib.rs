//! Browser demo: generate a street grid, look at its core layers and route
//! between two clicked nodes. The page lives in `www/`.

pub mod model;

use wasm_bindgen::prelude::*;

pub use model::{Layer, Model, Route};

#[wasm_bindgen]
pub struct Demo {
    model: Model,
    last: Option<Route>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(rows: usize, cols: usize, seed: u32, contract: bool) -> Demo {
        Demo {
            model: Model::generate(rows, cols, seed as u64, contract),
            last: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.model.graph().node_count()
    }

    /// `lon, lat` pairs.
    pub fn coords(&self) -> Vec<f64> {
        let c = self.model.graph().coords().unwrap_or(&[]);
        c.iter().flat_map(|p| [p.lon, p.lat]).collect()
    }

    /// `tail, head` pairs.
    pub fn arcs(&self) -> Vec<u32> {
        self.model.graph().arcs().flat_map(|(u, v, _)| [u, v]).collect()
    }

    /// One [`Layer`] code per node.
    pub fn layers(&self) -> Vec<u8> {
        self.model.layers().iter().map(|&l| l as u8).collect()
    }

    pub fn summary(&self) -> String {
        self.model.summary().to_string()
    }

    /// Node id nearest to a position, or -1 for an empty graph.
    pub fn nearest(&self, lon: f64, lat: f64) -> i32 {
        self.model.nearest(lon, lat).map_or(-1, |v| v as i32)
    }

    /// Runs a query and returns the node sequence; details via the
    /// accessors below.
    pub fn route(&mut self, s: u32, t: u32, time_weight: u32, dist_weight: u32) -> Vec<u32> {
        self.last = self.model.route(s, t, time_weight, dist_weight);
        self.last.as_ref().map(|r| r.nodes.clone()).unwrap_or_default()
    }

    /// Distance of the last route, -1 when unreachable.
    pub fn last_distance(&self) -> f64 {
        match self.last.as_ref().and_then(|r| r.distance) {
            Some(d) => d as f64,
            None => -1.0,
        }
    }

    pub fn last_bilevel_pops(&self) -> u32 {
        self.last.as_ref().map_or(0, |r| r.bilevel_pops as u32)
    }

    pub fn last_uni_pops(&self) -> u32 {
        self.last.as_ref().map_or(0, |r| r.uni_pops as u32)
    }
}
