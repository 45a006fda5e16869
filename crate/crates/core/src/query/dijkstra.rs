use std::time::Instant;

use super::{check_node, QueryError, QueryResult, SearchSpace, SearchStats};
use crate::cost::{Distance, Evaluator};
use crate::graph::{Graph, NodeId, INVALID};

/// Unidirectional Dijkstra with a 4-ary heap. Stops once the target is
/// settled.
#[derive(Debug)]
pub struct Dijkstra<'g> {
    graph: &'g Graph,
    space: SearchSpace,
}

impl<'g> Dijkstra<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Dijkstra {
            graph,
            space: SearchSpace::new(graph.node_count()),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn query(
        &mut self,
        s: NodeId,
        t: NodeId,
        ev: &Evaluator,
        want_path: bool,
    ) -> Result<QueryResult, QueryError> {
        let n = self.graph.node_count();
        check_node(s, n)?;
        check_node(t, n)?;
        let start = Instant::now();
        let g = self.graph;
        let space = &mut self.space;
        let mut stats = SearchStats::default();
        space.reset();
        space.relax(s, 0, INVALID, INVALID, u32::MAX);
        let mut distance = Distance::Infinite;
        while let Some((u, d)) = space.pop(u32::MAX) {
            stats.forward_pops += 1;
            if u == t {
                distance = Distance::Finite(d);
                break;
            }
            for a in g.out_arcs(u) {
                let Some(w) = ev.eval(g.cost(a)) else {
                    continue;
                };
                stats.relaxed_arcs += 1;
                space.relax(g.head(a), d.saturating_add(w), a as u32, u, u32::MAX);
            }
        }
        let path = if want_path && distance.is_finite() {
            space.tree_arcs(t)
        } else {
            Vec::new()
        };
        stats.elapsed = start.elapsed();
        Ok(QueryResult {
            distance,
            path,
            stats,
        })
    }
}
