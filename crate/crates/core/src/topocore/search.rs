//! Core-first reordering and forward/backward search graphs.

use super::{ArcRef, CoreGraph, ShortcutTable, Variant};
use crate::cost::CombineSpec;
use crate::graph::{build_indexed, Graph, GraphError, NodeId, Permutation};

/// Stable partition: core nodes first, relative order kept in both parts.
pub fn build_core_first_order(in_core: &[bool]) -> Permutation {
    let order: Vec<NodeId> = (0..in_core.len() as NodeId)
        .filter(|&v| in_core[v as usize])
        .chain((0..in_core.len() as NodeId).filter(|&v| !in_core[v as usize]))
        .collect();
    Permutation::from_order(&order).expect("partition of 0..n")
}

/// A search graph whose arcs carry a reference to an input arc or shortcut.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGraph {
    pub graph: Graph,
    pub arc_ref: Vec<ArcRef>,
}

/// Preprocessed data for bilevel queries. Node ids below `core_count` are
/// core nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CorePrep {
    pub(crate) variant: Variant,
    pub(crate) core_count: u32,
    pub(crate) input_arc_count: u32,
    /// Pipeline input id -> search id.
    pub(crate) perm: Permutation,
    pub(crate) forward: SearchGraph,
    pub(crate) backward: SearchGraph,
    /// Endpoints in search ids.
    pub(crate) shortcuts: ShortcutTable,
    /// Ids of the pipeline input nodes in some outer numbering (for example
    /// before cleanup). Empty when not tracked.
    pub(crate) source_ids: Vec<NodeId>,
    /// Search-id endpoints of every input arc. Derived, not serialized.
    pub(crate) input_endpoints: Vec<(NodeId, NodeId)>,
}

impl CorePrep {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn spec(&self) -> &CombineSpec {
        self.forward.graph.spec()
    }

    pub fn node_count(&self) -> usize {
        self.forward.graph.node_count()
    }

    pub fn core_count(&self) -> u32 {
        self.core_count
    }

    pub fn is_core(&self, search_id: NodeId) -> bool {
        search_id < self.core_count
    }

    pub fn input_arc_count(&self) -> usize {
        self.input_arc_count as usize
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn forward(&self) -> &SearchGraph {
        &self.forward
    }

    pub fn backward(&self) -> &SearchGraph {
        &self.backward
    }

    pub fn shortcuts(&self) -> &ShortcutTable {
        &self.shortcuts
    }

    pub fn source_ids(&self) -> &[NodeId] {
        &self.source_ids
    }

    pub fn set_source_ids(&mut self, ids: Vec<NodeId>) -> Result<(), GraphError> {
        if !ids.is_empty() && ids.len() != self.node_count() {
            return Err(GraphError::Malformed(format!(
                "{} source ids for {} nodes",
                ids.len(),
                self.node_count()
            )));
        }
        self.source_ids = ids;
        Ok(())
    }

    /// Search id of a pipeline input node.
    pub fn search_id(&self, input_id: NodeId) -> NodeId {
        self.perm.new_id(input_id)
    }

    pub fn is_shortcut(&self, r: ArcRef) -> bool {
        r >= self.input_arc_count
    }

    /// Search-id endpoints of an input arc or shortcut.
    pub fn endpoints(&self, r: ArcRef) -> Option<(NodeId, NodeId)> {
        if self.is_shortcut(r) {
            let i = (r - self.input_arc_count) as usize;
            (i < self.shortcuts.len()).then(|| (self.shortcuts.tail(i), self.shortcuts.head(i)))
        } else {
            self.input_endpoints.get(r as usize).copied()
        }
    }

    /// Number of arcs leaving the core in the input graph.
    pub fn core_leaving_arcs(&self) -> usize {
        self.input_endpoints
            .iter()
            .filter(|&&(u, v)| self.is_core(u) && !self.is_core(v))
            .count()
    }

    /// Number of arcs of the core graph (input arcs and shortcuts between
    /// core nodes that the forward graph keeps).
    pub fn core_arc_count(&self) -> usize {
        let g = &self.forward.graph;
        (0..self.core_count).map(|u| g.out_degree(u)).sum()
    }

    /// Additional bytes for the core graph with 32-bit ids and costs.
    pub fn core_memory_bytes(&self) -> u64 {
        crate::io::memory_estimate(
            self.core_count as u64,
            self.core_arc_count() as u64,
            self.spec().k() as u64,
        )
    }

    /// Prepends `outer`: afterwards `perm` maps ids of the graph `outer` was
    /// applied to onto search ids.
    pub(crate) fn compose_input_permutation(&mut self, outer: &Permutation) {
        self.perm = outer.then(&self.perm);
    }

    /// Renames input arcs: `id` becomes `old_of_new[id]`.
    pub(crate) fn rename_input_arcs(&mut self, old_of_new: &[crate::graph::ArcId]) {
        let m = self.input_arc_count;
        let rename = |r: &mut ArcRef| {
            if *r < m {
                *r = old_of_new[*r as usize];
            }
        };
        self.forward.arc_ref.iter_mut().for_each(rename);
        self.backward.arc_ref.iter_mut().for_each(rename);
        self.shortcuts.unpack_items.iter_mut().for_each(rename);
        self.derive_input_endpoints();
    }

    pub(crate) fn derive_input_endpoints(&mut self) {
        let m = self.input_arc_count as usize;
        let mut ends = vec![(crate::graph::INVALID, crate::graph::INVALID); m];
        for (u, v, a) in self.forward.graph.arcs() {
            let r = self.forward.arc_ref[a as usize];
            if (r as usize) < m {
                ends[r as usize] = (u, v);
            }
        }
        for (u, v, a) in self.backward.graph.arcs() {
            let r = self.backward.arc_ref[a as usize];
            if (r as usize) < m {
                ends[r as usize] = (v, u);
            }
        }
        self.input_endpoints = ends;
    }

    /// Structural checks for containers read from disk.
    pub(crate) fn validate(&self) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::Malformed(m));
        let n = self.node_count();
        let m = self.input_arc_count as usize;
        let s = self.shortcuts.len();
        if self.backward.graph.node_count() != n || self.perm.len() != n {
            return bad("node counts disagree".into());
        }
        if self.core_count as usize > n {
            return bad("core count exceeds node count".into());
        }
        if self.backward.graph.spec() != self.spec() || self.shortcuts.k() != self.spec().k() {
            return bad("cost specs disagree".into());
        }
        for sg in [&self.forward, &self.backward] {
            if sg.arc_ref.len() != sg.graph.arc_count() {
                return bad("arc reference count mismatch".into());
            }
            if sg.arc_ref.iter().any(|&r| r as usize >= m + s) {
                return bad("arc reference out of range".into());
            }
        }
        for i in 0..s {
            if self.shortcuts.tail(i) as usize >= n || self.shortcuts.head(i) as usize >= n {
                return bad(format!("shortcut {i} endpoint out of range"));
            }
            let items = self.shortcuts.unpack(i);
            if items.is_empty() || items.iter().any(|&r| r as usize >= m + i) {
                return bad(format!("shortcut {i} unpack sequence invalid"));
            }
        }
        if !self.source_ids.is_empty() && self.source_ids.len() != n {
            return bad("source id count mismatch".into());
        }
        if self
            .input_endpoints
            .iter()
            .any(|&(u, _)| u == crate::graph::INVALID)
        {
            return bad("input arc missing from both search graphs".into());
        }
        Ok(())
    }
}

/// Builds the search graphs of a finished core.
///
/// The forward graph holds all input arcs and core shortcuts except arcs
/// leaving the core. The backward graph holds the reversal of the same arc
/// set, again without arcs leaving the core. Nodes are renumbered core
/// first.
pub fn build_search_graphs(graph: &Graph, core: &CoreGraph, variant: Variant) -> CorePrep {
    let n = graph.node_count();
    let m = graph.arc_count();
    let k = graph.k();
    let spec = graph.spec().clone();
    let in_core = &core.in_core;
    let perm = build_core_first_order(in_core);
    let core_count = in_core.iter().filter(|&&c| c).count() as u32;

    struct Lists {
        tails: Vec<NodeId>,
        heads: Vec<NodeId>,
        refs: Vec<ArcRef>,
        costs: Vec<u32>,
    }
    let new_lists = || Lists {
        tails: Vec::new(),
        heads: Vec::new(),
        refs: Vec::new(),
        costs: Vec::new(),
    };
    let mut fwd = new_lists();
    let mut bwd = new_lists();
    let leaves = |u: NodeId, v: NodeId| in_core[u as usize] && !in_core[v as usize];

    let mut add = |u: NodeId, v: NodeId, r: ArcRef, cost: &[u32]| {
        if !leaves(u, v) {
            fwd.tails.push(perm.new_id(u));
            fwd.heads.push(perm.new_id(v));
            fwd.refs.push(r);
            fwd.costs.extend_from_slice(cost);
        }
        if !leaves(v, u) {
            bwd.tails.push(perm.new_id(v));
            bwd.heads.push(perm.new_id(u));
            bwd.refs.push(r);
            bwd.costs.extend_from_slice(cost);
        }
    };
    for (u, v, a) in graph.arcs() {
        add(u, v, a, graph.cost(a as usize));
    }
    for &(u, v, r) in &core.arcs {
        if core.is_shortcut(r) {
            add(u, v, r, core.ref_cost(graph, r));
        }
    }

    let finish = |l: Lists| -> SearchGraph {
        debug_assert_eq!(l.costs.len(), l.refs.len() * k);
        let (mut g, order) = build_indexed(n, spec.clone(), &l.tails, &l.heads, &l.costs)
            .expect("search graph endpoints are valid");
        if let Some(c) = graph.coords() {
            let mut moved = c.to_vec();
            for (old, &p) in c.iter().enumerate() {
                moved[perm.new_id(old as NodeId) as usize] = p;
            }
            g.set_coords(Some(moved)).expect("node count matches");
        }
        SearchGraph {
            graph: g,
            arc_ref: order.iter().map(|&i| l.refs[i as usize]).collect(),
        }
    };
    let forward = finish(fwd);
    let backward = finish(bwd);

    let mut shortcuts = core.shortcuts.clone();
    for t in shortcuts.tail.iter_mut() {
        *t = perm.new_id(*t);
    }
    for h in shortcuts.head.iter_mut() {
        *h = perm.new_id(*h);
    }

    let mut prep = CorePrep {
        variant,
        core_count,
        input_arc_count: m as u32,
        perm,
        forward,
        backward,
        shortcuts,
        source_ids: Vec::new(),
        input_endpoints: Vec::new(),
    };
    prep.derive_input_endpoints();
    prep
}
