use std::time::Instant;

use super::{check_node, unpack_path, QueryError, QueryResult, SearchSpace, SearchStats, Strategy};
use crate::cost::{Distance, Evaluator};
use crate::graph::{ArcId, Graph, NodeId, INVALID};
use crate::topocore::{ArcRef, CorePrep};

/// One direction of a bidirectional search.
#[derive(Clone, Copy)]
struct View<'a> {
    graph: &'a Graph,
    /// Arc id -> reference; identity when absent.
    refs: Option<&'a [ArcRef]>,
}

impl View<'_> {
    #[inline]
    fn arc_ref(&self, a: u32) -> ArcRef {
        self.refs.map_or(a, |r| r[a as usize])
    }
}

#[derive(Debug, Clone, Copy)]
enum Meet {
    None,
    Node(NodeId),
    /// The forward side scanned `from -> to` while `to` was reached backward.
    ForwardArc { from: NodeId, arc: u32, to: NodeId },
    /// The backward side scanned `from -> to`, an arc `to -> from` in the
    /// forward direction.
    BackwardArc { from: NodeId, arc: u32, to: NodeId },
}

/// Two search spaces plus the shared stopping logic.
///
/// Without a core boundary this is plain bidirectional Dijkstra stopping at
/// `k_f + k_b >= mu`. With a boundary, a side that still has queued nodes
/// outside the core also needs its own key to reach `mu`; those nodes may
/// still lead into the core.
#[derive(Debug, Clone)]
struct Engine {
    fwd: SearchSpace,
    bwd: SearchSpace,
}

struct Outcome {
    mu: u64,
    meet: Meet,
    stats: SearchStats,
}

impl Engine {
    fn new(n: usize) -> Self {
        Engine {
            fwd: SearchSpace::new(n),
            bwd: SearchSpace::new(n),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run(
        &mut self,
        fv: View<'_>,
        bv: View<'_>,
        boundary: u32,
        s: NodeId,
        t: NodeId,
        ev: &Evaluator,
        strategy: Strategy,
    ) -> Outcome {
        let mut stats = SearchStats::default();
        let f = &mut self.fwd;
        let b = &mut self.bwd;
        f.reset();
        b.reset();
        f.relax(s, 0, INVALID, INVALID, boundary);
        b.relax(t, 0, INVALID, INVALID, boundary);
        let (mut mu, mut meet) = if s == t {
            (0, Meet::Node(s))
        } else {
            (u64::MAX, Meet::None)
        };
        let mut alt_forward = true;

        loop {
            let kf = f.heap.min_key().unwrap_or(u64::MAX);
            let kb = b.heap.min_key().unwrap_or(u64::MAX);
            let f_done = f.noncore_queued == 0 || kf >= mu;
            let b_done = b.noncore_queued == 0 || kb >= mu;
            let sum_done = kf.saturating_add(kb) >= mu;
            if (sum_done && f_done && b_done) || (f.heap.is_empty() && b.heap.is_empty()) {
                break;
            }
            let mut forward = if sum_done {
                // only the non-core condition keeps us going
                !f_done
            } else {
                strategy.pick_forward(alt_forward, kf, kb, f.heap.len(), b.heap.len())
            };
            if strategy == Strategy::Alternate {
                alt_forward = !alt_forward;
            }
            if forward && f.heap.is_empty() {
                forward = false;
            } else if !forward && b.heap.is_empty() {
                forward = true;
            }

            let (this, other, view) = if forward {
                (&mut *f, &*b, fv)
            } else {
                (&mut *b, &*f, bv)
            };
            let (u, d) = this.pop(boundary).expect("queue checked non-empty");
            if forward {
                stats.forward_pops += 1;
            } else {
                stats.backward_pops += 1;
            }
            if other.reached(u) {
                let c = d.saturating_add(other.dist(u));
                if c < mu {
                    mu = c;
                    meet = Meet::Node(u);
                }
            }
            let g = view.graph;
            for a in g.out_arcs(u) {
                let Some(w) = ev.eval(g.cost(a)) else {
                    continue;
                };
                stats.relaxed_arcs += 1;
                let v = g.head(a);
                let nd = d.saturating_add(w);
                if other.reached(v) {
                    let c = nd.saturating_add(other.dist(v));
                    if c < mu {
                        mu = c;
                        let (from, arc, to) = (u, a as u32, v);
                        meet = if forward {
                            Meet::ForwardArc { from, arc, to }
                        } else {
                            Meet::BackwardArc { from, arc, to }
                        };
                    }
                }
                this.relax(v, nd, a as u32, u, boundary);
            }
        }
        Outcome { mu, meet, stats }
    }

    /// Arc references from `s` to `t` in forward orientation.
    fn refs(&self, fv: View<'_>, bv: View<'_>, meet: Meet) -> Vec<ArcRef> {
        let fwd_part = |x: NodeId| -> Vec<ArcRef> {
            self.fwd.tree_arcs(x).into_iter().map(|a| fv.arc_ref(a)).collect()
        };
        // the backward tree runs from t; walking it from x goes toward t
        let bwd_part = |x: NodeId| -> Vec<ArcRef> {
            let mut arcs = self.bwd.tree_arcs(x);
            arcs.reverse();
            arcs.into_iter().map(|a| bv.arc_ref(a)).collect()
        };
        match meet {
            Meet::None => Vec::new(),
            Meet::Node(x) => {
                let mut p = fwd_part(x);
                p.extend(bwd_part(x));
                p
            }
            Meet::ForwardArc { from, arc, to } => {
                let mut p = fwd_part(from);
                p.push(fv.arc_ref(arc));
                p.extend(bwd_part(to));
                p
            }
            Meet::BackwardArc { from, arc, to } => {
                let mut p = fwd_part(to);
                p.push(bv.arc_ref(arc));
                p.extend(bwd_part(from));
                p
            }
        }
    }
}

/// Bidirectional Dijkstra on an unprocessed graph. The reverse graph is
/// built once on construction.
#[derive(Debug, Clone)]
pub struct BidirectionalQuery<'g> {
    graph: &'g Graph,
    reverse: Graph,
    /// Reverse arc id -> forward arc id.
    reverse_ref: Vec<ArcId>,
    strategy: Strategy,
    engine: Engine,
}

impl<'g> BidirectionalQuery<'g> {
    pub fn new(graph: &'g Graph, strategy: Strategy) -> Self {
        let (reverse, reverse_ref) = graph.reverse_indexed();
        BidirectionalQuery {
            graph,
            reverse,
            reverse_ref,
            strategy,
            engine: Engine::new(graph.node_count()),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn set_strategy(&mut self, strategy: Strategy) {
        self.strategy = strategy;
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
        let fv = View {
            graph: self.graph,
            refs: None,
        };
        let bv = View {
            graph: &self.reverse,
            refs: Some(&self.reverse_ref),
        };
        let out = self.engine.run(fv, bv, u32::MAX, s, t, ev, self.strategy);
        let path = if want_path {
            self.engine.refs(fv, bv, out.meet)
        } else {
            Vec::new()
        };
        let mut stats = out.stats;
        stats.elapsed = start.elapsed();
        Ok(QueryResult {
            distance: Distance::from_raw(out.mu),
            path,
            stats,
        })
    }
}

/// Bilevel bidirectional search over a preprocessed core.
///
/// Node ids are search ids of the preparation. Paths are returned as input
/// arc ids with shortcuts unpacked.
#[derive(Debug, Clone)]
pub struct BilevelQuery<'p> {
    prep: &'p CorePrep,
    strategy: Strategy,
    engine: Engine,
}

impl<'p> BilevelQuery<'p> {
    pub fn new(prep: &'p CorePrep, strategy: Strategy) -> Self {
        BilevelQuery {
            prep,
            strategy,
            engine: Engine::new(prep.node_count()),
        }
    }

    pub fn prep(&self) -> &'p CorePrep {
        self.prep
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn set_strategy(&mut self, strategy: Strategy) {
        self.strategy = strategy;
    }

    fn views(&self) -> (View<'p>, View<'p>) {
        let p = self.prep;
        (
            View {
                graph: &p.forward.graph,
                refs: Some(&p.forward.arc_ref),
            },
            View {
                graph: &p.backward.graph,
                refs: Some(&p.backward.arc_ref),
            },
        )
    }

    pub fn query(
        &mut self,
        s: NodeId,
        t: NodeId,
        ev: &Evaluator,
        want_path: bool,
    ) -> Result<QueryResult, QueryError> {
        let n = self.prep.node_count();
        check_node(s, n)?;
        check_node(t, n)?;
        let start = Instant::now();
        let (fv, bv) = self.views();
        let out = self
            .engine
            .run(fv, bv, self.prep.core_count, s, t, ev, self.strategy);
        let path = if want_path {
            let refs = self.engine.refs(fv, bv, out.meet);
            unpack_path(self.prep, &refs)?
        } else {
            Vec::new()
        };
        let mut stats = out.stats;
        stats.elapsed = start.elapsed();
        Ok(QueryResult {
            distance: Distance::from_raw(out.mu),
            path,
            stats,
        })
    }

    /// Runs a search and returns its path as input arcs and shortcuts,
    /// without unpacking.
    pub fn packed_path(
        &mut self,
        s: NodeId,
        t: NodeId,
        ev: &Evaluator,
    ) -> Result<Vec<ArcRef>, QueryError> {
        let n = self.prep.node_count();
        check_node(s, n)?;
        check_node(t, n)?;
        let (fv, bv) = self.views();
        let out = self
            .engine
            .run(fv, bv, self.prep.core_count, s, t, ev, self.strategy);
        Ok(self.engine.refs(fv, bv, out.meet))
    }
}
