//! Shortest-path searches with per-query objectives.
//!
//! All engines evaluate arcs lazily with the query's [`Evaluator`]; arcs that
//! evaluate to infinity are skipped. Tentative distances are 64-bit and reset
//! in O(touched nodes) via generation stamps.

mod bidirectional;
mod dijkstra;
mod unpack;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

pub use bidirectional::{BidirectionalQuery, BilevelQuery};
pub use dijkstra::Dijkstra;
pub use unpack::unpack_path;

use crate::cost::{CostError, Distance, Objective};
use crate::graph::{ArcId, Graph, NodeId, INVALID};
use crate::heap::QuaternaryHeap;
use crate::topocore::CorePrep;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("node {node} outside 0..{node_count}")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("malformed arc sequence: {0}")]
    MalformedPath(String),
}

/// Which side of a bidirectional search advances next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Switch sides every step.
    Alternate,
    /// Forward if its smallest key is not larger than the backward one.
    MinKey,
    /// Forward if the backward queue is not smaller than the forward queue.
    MinQueue,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Alternate, Strategy::MinKey, Strategy::MinQueue];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Alternate => "alt",
            Strategy::MinKey => "mk",
            Strategy::MinQueue => "mq",
        }
    }

    /// Decides the side for one step. `alt_forward` is the alternation bit.
    pub fn pick_forward(
        self,
        alt_forward: bool,
        forward_key: u64,
        backward_key: u64,
        forward_len: usize,
        backward_len: usize,
    ) -> bool {
        match self {
            Strategy::Alternate => alt_forward,
            Strategy::MinKey => forward_key <= backward_key,
            Strategy::MinQueue => backward_len >= forward_len,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alt" => Ok(Strategy::Alternate),
            "mk" => Ok(Strategy::MinKey),
            "mq" => Ok(Strategy::MinQueue),
            other => Err(format!("unknown strategy `{other}` (alt, mk, mq)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub forward_pops: u64,
    pub backward_pops: u64,
    pub relaxed_arcs: u64,
    pub elapsed: Duration,
}

impl SearchStats {
    pub fn pops(&self) -> u64 {
        self.forward_pops + self.backward_pops
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub distance: Distance,
    /// Input arc ids from source to target; empty when unreachable or when
    /// source equals target or when no path was requested.
    pub path: Vec<ArcId>,
    pub stats: SearchStats,
}

/// Per-direction search state, reusable across queries.
#[derive(Debug, Clone)]
pub(crate) struct SearchSpace {
    dist: Vec<u64>,
    parent_arc: Vec<u32>,
    parent_node: Vec<NodeId>,
    stamp: Vec<u32>,
    generation: u32,
    heap: QuaternaryHeap,
    /// Queued nodes with id >= the core boundary.
    noncore_queued: usize,
}

impl SearchSpace {
    pub(crate) fn new(n: usize) -> Self {
        SearchSpace {
            dist: vec![0; n],
            parent_arc: vec![INVALID; n],
            parent_node: vec![INVALID; n],
            stamp: vec![0; n],
            generation: 0,
            heap: QuaternaryHeap::new(n),
            noncore_queued: 0,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.heap.clear();
        self.noncore_queued = 0;
    }

    #[inline]
    pub(crate) fn reached(&self, v: NodeId) -> bool {
        self.stamp[v as usize] == self.generation
    }

    #[inline]
    pub(crate) fn dist(&self, v: NodeId) -> u64 {
        self.dist[v as usize]
    }

    #[inline]
    pub(crate) fn relax(&mut self, v: NodeId, d: u64, arc: u32, from: NodeId, boundary: u32) {
        let i = v as usize;
        if self.stamp[i] != self.generation {
            self.stamp[i] = self.generation;
            self.dist[i] = d;
            self.parent_arc[i] = arc;
            self.parent_node[i] = from;
            self.heap.push(v, d);
            if v >= boundary {
                self.noncore_queued += 1;
            }
        } else if d < self.dist[i] && self.heap.contains(v) {
            self.dist[i] = d;
            self.parent_arc[i] = arc;
            self.parent_node[i] = from;
            self.heap.decrease_key(v, d);
        }
    }

    #[inline]
    pub(crate) fn pop(&mut self, boundary: u32) -> Option<(NodeId, u64)> {
        let (v, d) = self.heap.pop()?;
        if v >= boundary {
            self.noncore_queued -= 1;
        }
        Some((v, d))
    }

    /// Parent arcs from the root down to `v`.
    pub(crate) fn tree_arcs(&self, mut v: NodeId) -> Vec<u32> {
        let mut arcs = Vec::new();
        while self.parent_arc[v as usize] != INVALID {
            arcs.push(self.parent_arc[v as usize]);
            v = self.parent_node[v as usize];
        }
        arcs.reverse();
        arcs
    }
}

fn check_node(node: NodeId, n: usize) -> Result<(), QueryError> {
    if node as usize >= n {
        return Err(QueryError::NodeOutOfRange {
            node,
            node_count: n,
        });
    }
    Ok(())
}

/// One-shot unidirectional Dijkstra.
pub fn dijkstra_uni(
    graph: &Graph,
    s: NodeId,
    t: NodeId,
    obj: &Objective,
) -> Result<QueryResult, QueryError> {
    let ev = obj.evaluator(graph.spec())?;
    Dijkstra::new(graph).query(s, t, &ev, true)
}

/// One-shot bidirectional Dijkstra on `graph` and its reversal.
pub fn dijkstra_bi(
    graph: &Graph,
    s: NodeId,
    t: NodeId,
    obj: &Objective,
    strategy: Strategy,
) -> Result<QueryResult, QueryError> {
    let ev = obj.evaluator(graph.spec())?;
    BidirectionalQuery::new(graph, strategy).query(s, t, &ev, true)
}

/// One-shot bilevel query. `s` and `t` are search ids of `prep`.
pub fn bilevel_query(
    prep: &CorePrep,
    s: NodeId,
    t: NodeId,
    obj: &Objective,
) -> Result<QueryResult, QueryError> {
    let ev = obj.evaluator(prep.spec())?;
    BilevelQuery::new(prep, Strategy::MinQueue).query(s, t, &ev, true)
}
