//! Browser-independent state of the demo.

use topocore::io::{synthesize_costs, CostMode};
use topocore::synth::{road_grid, RoadGridConfig};
use topocore::topocore::PipelineOutput;
use topocore::{
    run_pipeline, BilevelQuery, CorePrep, Dijkstra, Graph, NodeId, Objective, Strategy, Variant,
};

/// Where a node ended up in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Layer {
    /// Outside the largest biconnected component.
    DeadEnd = 0,
    /// Interior of a bypassed chain.
    Chain = 1,
    /// Contracted as part of the independent set.
    Contracted = 2,
    Core = 3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// `None` when unreachable.
    pub distance: Option<u64>,
    pub nodes: Vec<NodeId>,
    pub bilevel_pops: u64,
    pub uni_pops: u64,
}

pub struct Model {
    graph: Graph,
    prep: CorePrep,
    layers: Vec<Layer>,
    summary: String,
}

impl Model {
    /// A `rows` x `cols` street grid with basic synthetic costs.
    pub fn generate(rows: usize, cols: usize, seed: u64, contract: bool) -> Model {
        let mut cfg = RoadGridConfig::new(rows.max(2), cols.max(2));
        cfg.max_segments = 4;
        let base = road_grid(&cfg, seed).graph;
        let table = synthesize_costs(&base, CostMode::Basic, seed).expect("grid has coordinates");
        let graph = table.attach(base).expect("one row per arc");
        let variant = if contract { Variant::TopoCoreIs } else { Variant::TopoCore };
        let out = run_pipeline(&graph, variant);
        let layers = layers_of(&out);
        let summary = summarize(&graph, &out);
        Model {
            graph,
            prep: out.prep,
            layers,
            summary,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn summary(&self) -> &str {
        &self.summary
    }

    /// Node closest to a position in degrees.
    pub fn nearest(&self, lon: f64, lat: f64) -> Option<NodeId> {
        let coords = self.graph.coords()?;
        let d = |i: usize| (coords[i].lon - lon).powi(2) + (coords[i].lat - lat).powi(2);
        (0..coords.len())
            .min_by(|&a, &b| d(a).total_cmp(&d(b)))
            .map(|v| v as NodeId)
    }

    /// Route under `time_weight * t + dist_weight * d`.
    pub fn route(&self, s: NodeId, t: NodeId, time_weight: u32, dist_weight: u32) -> Option<Route> {
        let n = self.graph.node_count() as NodeId;
        if s >= n || t >= n {
            return None;
        }
        let spec = self.graph.spec();
        let mut w = vec![0; spec.k()];
        w[0] = time_weight;
        w[1] = dist_weight;
        let ev = Objective::linear(spec, w).evaluator(spec).ok()?;
        let prep = &self.prep;
        let r = BilevelQuery::new(prep, Strategy::MinQueue)
            .query(prep.search_id(s), prep.search_id(t), &ev, true)
            .ok()?;
        let uni = Dijkstra::new(&self.graph).query(s, t, &ev, false).ok()?;
        debug_assert_eq!(uni.distance, r.distance);
        let mut nodes = vec![s];
        nodes.extend(r.path.iter().map(|&a| self.graph.head(a as usize)));
        Some(Route {
            distance: r.distance.finite(),
            nodes: if r.distance.is_finite() { nodes } else { Vec::new() },
            bilevel_pops: r.stats.pops(),
            uni_pops: uni.stats.pops(),
        })
    }
}

fn layers_of(out: &PipelineOutput) -> Vec<Layer> {
    let mut layers: Vec<Layer> = out
        .bcc_core
        .iter()
        .zip(&out.topocore.in_core)
        .map(|(&bcc, &topo)| match (bcc, topo) {
            (false, _) => Layer::DeadEnd,
            (true, false) => Layer::Chain,
            (true, true) => Layer::Core,
        })
        .collect();
    for &v in &out.contracted {
        layers[v as usize] = Layer::Contracted;
    }
    layers
}

fn summarize(graph: &Graph, out: &PipelineOutput) -> String {
    let n = graph.node_count();
    let s = &out.stats;
    let pct = |x: usize| 100.0 * x as f64 / n as f64;
    let mut text = format!(
        "{n} nodes, {} arcs. BCC {:.1}%, TopoCore {:.1}%",
        graph.arc_count(),
        pct(s.bcc_nodes),
        pct(s.topocore_nodes)
    );
    if let Some(is) = s.is_nodes {
        text.push_str(&format!(", TopoCore-IS {:.1}%", pct(is)));
    }
    text.push_str(&format!(". {} shortcuts.", out.prep.shortcuts().len()));
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_cover_every_node() {
        let m = Model::generate(6, 7, 3, true);
        assert_eq!(m.layers().len(), m.graph().node_count());
        let core = m.layers().iter().filter(|&&l| l == Layer::Core).count();
        assert_eq!(core, m.prep.core_count() as usize);
        assert!(m.layers().contains(&Layer::Chain));
        assert!(m.summary().contains("TopoCore-IS"));
        assert!(!Model::generate(6, 7, 3, false).layers().contains(&Layer::Contracted));
    }

    #[test]
    fn routes_are_walks_with_the_right_cost() {
        let m = Model::generate(5, 5, 9, true);
        let g = m.graph();
        let n = g.node_count() as NodeId;
        for (s, t) in [(0, n - 1), (n / 2, 3), (7, 7)] {
            let r = m.route(s, t, 1, 0).unwrap();
            assert!(r.bilevel_pops > 0 || s == t);
            assert_eq!(r.nodes.first(), Some(&s));
            assert_eq!(r.nodes.last(), Some(&t));
            let mut sum = 0u64;
            for w in r.nodes.windows(2) {
                let best = g
                    .out_arcs(w[0])
                    .filter(|&a| g.head(a) == w[1])
                    .map(|a| g.cost(a)[0] as u64)
                    .min()
                    .unwrap();
                sum += best;
            }
            assert_eq!(Some(sum), r.distance);
        }
        assert!(m.route(0, n, 1, 0).is_none());
    }

    #[test]
    fn nearest_finds_the_corner() {
        let m = Model::generate(4, 4, 1, false);
        let c = m.graph().coords().unwrap()[0];
        assert_eq!(m.nearest(c.lon - 1.0, c.lat - 1.0), Some(0));
    }
}
