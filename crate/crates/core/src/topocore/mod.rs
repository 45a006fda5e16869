//! Topology-only core selection.
//!
//! The pipeline shrinks the set of core nodes in three steps:
//!
//! 1. keep only the largest biconnected component (dead ends leave the core,
//!    no shortcuts needed);
//! 2. bypass chains of nodes with exactly two core neighbors by shortcuts;
//! 3. optionally contract an independent set of degree-3 core nodes.
//!
//! The result after step 2 is the *TopoCore*, after step 3 the
//! *TopoCore-IS*. [`build_search_graphs`] then turns the core into the
//! forward and backward graphs used by the bilevel query.

mod bcc;
mod chains;
mod contract;
mod search;

use std::fmt;
use std::time::{Duration, Instant};

pub use bcc::{biconnected_components, Bcc};
pub use chains::{step1_largest_bcc, step2_remove_chains, ChainStats};
pub use contract::{core_degrees, step3_contract, step3_independent_set, ContractStats};
pub use search::{build_core_first_order, build_search_graphs, CorePrep, SearchGraph};

use crate::graph::{dfs_preorder, Graph, NodeId, NodeOrder};

/// Shortcut reference space: ids below the input arc count are input arcs,
/// `input_arc_count + i` is shortcut `i`.
pub type ArcRef = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    TopoCore,
    TopoCoreIs,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::TopoCore => "topocore",
            Variant::TopoCoreIs => "topocore-is",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Variant::TopoCore => 0,
            Variant::TopoCoreIs => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Variant::TopoCore),
            1 => Some(Variant::TopoCoreIs),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "topocore" => Ok(Variant::TopoCore),
            "topocore-is" => Ok(Variant::TopoCoreIs),
            other => Err(format!("unknown variant `{other}` (topocore, topocore-is)")),
        }
    }
}

/// Shortcut arcs with their cost vectors and unpack sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortcutTable {
    k: usize,
    pub(crate) tail: Vec<NodeId>,
    pub(crate) head: Vec<NodeId>,
    pub(crate) costs: Vec<u32>,
    pub(crate) unpack_first: Vec<u32>,
    pub(crate) unpack_items: Vec<ArcRef>,
}

impl ShortcutTable {
    pub fn new(k: usize) -> Self {
        ShortcutTable {
            k,
            tail: Vec::new(),
            head: Vec::new(),
            costs: Vec::new(),
            unpack_first: vec![0],
            unpack_items: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tail.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tail(&self, i: usize) -> NodeId {
        self.tail[i]
    }

    pub fn head(&self, i: usize) -> NodeId {
        self.head[i]
    }

    pub fn cost(&self, i: usize) -> &[u32] {
        &self.costs[i * self.k..(i + 1) * self.k]
    }

    /// Direct constituents of shortcut `i` (input arcs or older shortcuts).
    pub fn unpack(&self, i: usize) -> &[ArcRef] {
        &self.unpack_items[self.unpack_first[i] as usize..self.unpack_first[i + 1] as usize]
    }

    pub(crate) fn push(&mut self, tail: NodeId, head: NodeId, cost: &[u32], unpack: &[ArcRef]) -> usize {
        debug_assert_eq!(cost.len(), self.k);
        self.tail.push(tail);
        self.head.push(head);
        self.costs.extend_from_slice(cost);
        self.unpack_items.extend_from_slice(unpack);
        self.unpack_first.push(self.unpack_items.len() as u32);
        self.tail.len() - 1
    }
}

/// A core graph under construction, in pipeline input ids.
#[derive(Debug, Clone)]
pub struct CoreGraph {
    pub in_core: Vec<bool>,
    /// `(tail, head, ref)` of every arc between core nodes.
    pub arcs: Vec<(NodeId, NodeId, ArcRef)>,
    pub shortcuts: ShortcutTable,
    pub input_arc_count: usize,
}

impl CoreGraph {
    pub fn node_count(&self) -> usize {
        self.in_core.iter().filter(|&&c| c).count()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_shortcut(&self, r: ArcRef) -> bool {
        r as usize >= self.input_arc_count
    }

    pub fn ref_cost<'a>(&'a self, graph: &'a Graph, r: ArcRef) -> &'a [u32] {
        if self.is_shortcut(r) {
            self.shortcuts.cost(r as usize - self.input_arc_count)
        } else {
            graph.cost(r as usize)
        }
    }
}

/// Sizes and timings per pipeline stage.
#[derive(Debug, Clone, Default)]
pub struct PrepStats {
    pub input_nodes: usize,
    pub input_arcs: usize,
    pub bcc_nodes: usize,
    pub bcc_arcs: usize,
    pub topocore_nodes: usize,
    pub topocore_arcs: usize,
    pub topocore_degree3: usize,
    pub chains: ChainStats,
    pub is_nodes: Option<usize>,
    pub is_arcs: Option<usize>,
    pub is_degree3: Option<usize>,
    pub contract: Option<ContractStats>,
    pub shortcut_count: usize,
    pub saturated_shortcuts: usize,
    pub bcc_time: Duration,
    pub chain_time: Duration,
    pub contract_time: Duration,
    pub search_graph_time: Duration,
}

/// Everything the pipeline produced, including intermediate cores.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub prep: CorePrep,
    pub stats: PrepStats,
    /// Core membership after step 1, in pipeline input ids.
    pub bcc_core: Vec<bool>,
    /// Core graph after step 2, in pipeline input ids.
    pub topocore: CoreGraph,
    /// Nodes contracted in step 3 (empty for the TopoCore variant).
    pub contracted: Vec<NodeId>,
    /// Step-3 degrees before contraction.
    pub degree_snapshot: Vec<u32>,
}

/// Runs steps 1-2 (and 3 for [`Variant::TopoCoreIs`]) and builds the search
/// graphs. Step 3 visits nodes in DFS pre-order rooted at node 0.
pub fn run_pipeline(graph: &Graph, variant: Variant) -> PipelineOutput {
    let mut stats = PrepStats {
        input_nodes: graph.node_count(),
        input_arcs: graph.arc_count(),
        ..Default::default()
    };

    let t = Instant::now();
    let bcc = biconnected_components(graph);
    let bcc_core = step1_largest_bcc(graph, &bcc);
    stats.bcc_time = t.elapsed();
    stats.bcc_nodes = bcc_core.iter().filter(|&&c| c).count();
    stats.bcc_arcs = graph
        .arcs()
        .filter(|&(u, v, _)| bcc_core[u as usize] && bcc_core[v as usize])
        .count();

    let t = Instant::now();
    let (topocore, chain_stats) = step2_remove_chains(graph, &bcc_core);
    stats.chain_time = t.elapsed();
    stats.chains = chain_stats;
    stats.topocore_nodes = topocore.node_count();
    stats.topocore_arcs = topocore.arc_count();
    let degrees = core_degrees(&topocore);
    stats.topocore_degree3 = count_degree3(&topocore, &degrees);

    let mut core = topocore.clone();
    let mut contracted = Vec::new();
    let mut degree_snapshot = Vec::new();
    if variant == Variant::TopoCoreIs {
        let t = Instant::now();
        let order = dfs_preorder(graph, 0).order();
        contracted = step3_independent_set(&core, &order);
        let cs = step3_contract(graph, &mut core, &contracted);
        stats.contract_time = t.elapsed();
        degree_snapshot = degrees;
        stats.is_nodes = Some(core.node_count());
        stats.is_arcs = Some(core.arc_count());
        stats.is_degree3 = Some(count_degree3(&core, &core_degrees(&core)));
        stats.saturated_shortcuts += cs.saturated;
        stats.contract = Some(cs);
    }
    stats.saturated_shortcuts += stats.chains.saturated;
    if stats.saturated_shortcuts > 0 {
        log::warn!(
            "{} shortcut cost vectors saturated at 2^32-1; distances through them are not exact",
            stats.saturated_shortcuts
        );
    }
    stats.shortcut_count = core.shortcuts.len();

    let t = Instant::now();
    let prep = build_search_graphs(graph, &core, variant);
    stats.search_graph_time = t.elapsed();

    PipelineOutput {
        prep,
        stats,
        bcc_core,
        topocore,
        contracted,
        degree_snapshot,
    }
}

/// Applies a node order, then runs the pipeline. In the result, the
/// permutation maps ids of `graph` to search ids and input arc ids are arc
/// ids of `graph`. The intermediate cores in the output stay in reordered
/// ids.
pub fn prepare(graph: &Graph, order: NodeOrder, seed: u64, variant: Variant) -> PipelineOutput {
    let perm = order.permutation(graph, seed);
    let (reordered, old_arcs) =
        crate::graph::apply_permutation_indexed(graph, &perm).expect("valid permutation");
    let mut out = run_pipeline(&reordered, variant);
    out.prep.compose_input_permutation(&perm);
    out.prep.rename_input_arcs(&old_arcs);
    out
}

fn count_degree3(core: &CoreGraph, degrees: &[u32]) -> usize {
    core.in_core
        .iter()
        .zip(degrees)
        .filter(|&(&c, &d)| c && d == 3)
        .count()
}
