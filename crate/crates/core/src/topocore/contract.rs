//! Step 3: contraction of an independent set of degree-3 core nodes.

use super::{ArcRef, CoreGraph};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContractStats {
    pub contracted: usize,
    pub removed_arcs: usize,
    pub added_arcs: usize,
    pub saturated: usize,
}

/// Per node `(neighbor, index into core.arcs, outgoing)`.
struct Incidence {
    first: Vec<u32>,
    entries: Vec<(NodeId, u32, bool)>,
}

impl Incidence {
    fn new(core: &CoreGraph) -> Self {
        let n = core.in_core.len();
        let mut first = vec![0u32; n + 1];
        for &(u, v, _) in &core.arcs {
            first[u as usize + 1] += 1;
            first[v as usize + 1] += 1;
        }
        for i in 0..n {
            first[i + 1] += first[i];
        }
        let mut fill = first.clone();
        let mut entries = vec![(0, 0, false); first[n] as usize];
        for (i, &(u, v, _)) in core.arcs.iter().enumerate() {
            entries[fill[u as usize] as usize] = (v, i as u32, true);
            fill[u as usize] += 1;
            entries[fill[v as usize] as usize] = (u, i as u32, false);
            fill[v as usize] += 1;
        }
        Incidence { first, entries }
    }

    fn of(&self, v: NodeId) -> &[(NodeId, u32, bool)] {
        &self.entries[self.first[v as usize] as usize..self.first[v as usize + 1] as usize]
    }
}

/// Direction-blind incident-arc count of every node in the core graph.
///
/// Per neighbor the larger of the two directed arc counts is taken, so a
/// bidirected road counts once while parallel shortcuts count separately.
/// Non-core nodes get 0.
pub fn core_degrees(core: &CoreGraph) -> Vec<u32> {
    let inc = Incidence::new(core);
    let mut degrees = vec![0u32; core.in_core.len()];
    let mut scratch: Vec<(NodeId, bool)> = Vec::new();
    for v in 0..core.in_core.len() {
        if !core.in_core[v] {
            continue;
        }
        scratch.clear();
        scratch.extend(inc.of(v as NodeId).iter().map(|&(w, _, out)| (w, out)));
        scratch.sort_unstable();
        let mut d = 0;
        let mut i = 0;
        while i < scratch.len() {
            let w = scratch[i].0;
            let (mut ins, mut outs) = (0, 0);
            while i < scratch.len() && scratch[i].0 == w {
                if scratch[i].1 {
                    outs += 1;
                } else {
                    ins += 1;
                }
                i += 1;
            }
            d += ins.max(outs);
        }
        degrees[v] = d;
    }
    degrees
}

/// Greedy independent set of degree-3 core nodes, visiting nodes in `order`.
/// Degrees are taken from one snapshot before any contraction.
pub fn step3_independent_set(core: &CoreGraph, order: &[NodeId]) -> Vec<NodeId> {
    let degrees = core_degrees(core);
    let inc = Incidence::new(core);
    let mut in_set = vec![false; core.in_core.len()];
    let mut set = Vec::new();
    for &v in order {
        if !core.in_core[v as usize] || degrees[v as usize] != 3 {
            continue;
        }
        if inc.of(v).iter().any(|&(w, _, _)| in_set[w as usize]) {
            continue;
        }
        in_set[v as usize] = true;
        set.push(v);
    }
    set
}

/// Removes `set` from the core. Every in-arc `(u, v)` and out-arc `(v, w)`
/// with `u != w` of a removed node `v` is replaced by a shortcut `(u, w)`.
pub fn step3_contract(graph: &Graph, core: &mut CoreGraph, set: &[NodeId]) -> ContractStats {
    let spec = graph.spec().clone();
    let inc = Incidence::new(core);
    let mut removed = vec![false; core.arcs.len()];
    let mut added: Vec<(NodeId, NodeId, ArcRef)> = Vec::new();
    let mut stats = ContractStats::default();
    let mut cost = vec![0u32; spec.k()];

    for &v in set {
        debug_assert!(core.in_core[v as usize]);
        let entries = inc.of(v);
        for &(u, ai, out) in entries {
            removed[ai as usize] = true;
            if out {
                continue;
            }
            let in_ref = core.arcs[ai as usize].2;
            for &(w, ao, out2) in entries {
                if !out2 || w == u {
                    continue;
                }
                let out_ref = core.arcs[ao as usize].2;
                let saturated = spec.combine_into(
                    core.ref_cost(graph, in_ref),
                    core.ref_cost(graph, out_ref),
                    &mut cost,
                );
                stats.saturated += saturated as usize;
                let idx = core.shortcuts.push(u, w, &cost, &[in_ref, out_ref]);
                added.push((u, w, (core.input_arc_count + idx) as ArcRef));
            }
        }
        stats.removed_arcs += entries.len();
        core.in_core[v as usize] = false;
        stats.contracted += 1;
    }
    stats.added_arcs = added.len();

    let mut arcs: Vec<_> = core
        .arcs
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(&a, _)| a)
        .collect();
    arcs.extend(added);
    core.arcs = arcs;
    stats
}
