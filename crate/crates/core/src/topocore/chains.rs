//! Steps 1 and 2: dead-end removal and chain bypassing.

use super::{ArcRef, Bcc, CoreGraph, ShortcutTable};
use crate::graph::{Graph, NodeId, INVALID};

/// Core membership after step 1: nodes of the largest biconnected component.
pub fn step1_largest_bcc(graph: &Graph, bcc: &Bcc) -> Vec<bool> {
    let mut core = vec![false; graph.node_count()];
    if let Some(c) = bcc.largest() {
        for &v in bcc.nodes(c) {
            core[v as usize] = true;
        }
    }
    core
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChainStats {
    /// Chains removed, including chains that return to their start.
    pub chains: usize,
    /// Arcs on removed chains (one direction counted).
    pub chain_arcs: usize,
    pub shortcuts: usize,
    pub saturated: usize,
}

impl ChainStats {
    pub fn average_arcs(&self) -> f64 {
        if self.chains == 0 {
            0.0
        } else {
            self.chain_arcs as f64 / self.chains as f64
        }
    }
}

/// Incidence over the current core arcs: `(neighbor, index into core.arcs,
/// outgoing)` per node.
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

/// The two distinct neighbors of a chain interior candidate.
fn chain_neighbors(inc: &[(NodeId, u32, bool)]) -> Option<[NodeId; 2]> {
    let mut nbrs = [INVALID; 2];
    for &(w, _, _) in inc {
        if nbrs[0] == INVALID || nbrs[0] == w {
            nbrs[0] = w;
        } else if nbrs[1] == INVALID || nbrs[1] == w {
            nbrs[1] = w;
        } else {
            return None;
        }
    }
    (nbrs[1] != INVALID).then_some(nbrs)
}

/// Step 2. Bypasses every maximal chain of core nodes with exactly two
/// distinct core neighbors, repeating until no chain is left: a shortcut
/// may turn one of its endpoints into a chain node.
///
/// Per direction, a chain yields one shortcut for every combination of
/// parallel arcs along it, after dropping arcs that a parallel arc
/// dominates. Chains missing an arc in some direction yield no shortcut for
/// that direction. A core made of a single cycle collapses onto its
/// smallest node.
pub fn step2_remove_chains(graph: &Graph, step1_core: &[bool]) -> (CoreGraph, ChainStats) {
    let in_core = step1_core.to_vec();
    let arcs = graph
        .arcs()
        .filter(|&(u, v, _)| u != v && in_core[u as usize] && in_core[v as usize])
        .collect();
    let mut core = CoreGraph {
        in_core,
        arcs,
        shortcuts: ShortcutTable::new(graph.k()),
        input_arc_count: graph.arc_count(),
    };
    let mut stats = ChainStats::default();
    while bypass_round(graph, &mut core, &mut stats) > 0 {}
    drop_bypassed_shortcuts(&mut core);
    stats.shortcuts = core.shortcuts.len();
    (core, stats)
}

/// Removes shortcuts that a later round bypassed again. Chain shortcuts
/// unpack to input arcs only, so renumbering touches `core.arcs` alone.
fn drop_bypassed_shortcuts(core: &mut CoreGraph) {
    let m = core.input_arc_count;
    let k = core.shortcuts.k();
    let old = std::mem::replace(&mut core.shortcuts, ShortcutTable::new(k));
    let mut used = vec![false; old.len()];
    for &(_, _, r) in &core.arcs {
        if r as usize >= m {
            used[r as usize - m] = true;
        }
    }
    let mut new_ref = vec![INVALID; old.len()];
    for i in (0..old.len()).filter(|&i| used[i]) {
        let j = core.shortcuts.push(old.tail(i), old.head(i), old.cost(i), old.unpack(i));
        new_ref[i] = (m + j) as ArcRef;
    }
    for arc in core.arcs.iter_mut() {
        if arc.2 as usize >= m {
            arc.2 = new_ref[arc.2 as usize - m];
        }
    }
}

/// Length of a reference in input arcs.
fn flat_len(core: &CoreGraph, r: ArcRef) -> usize {
    if core.is_shortcut(r) {
        core.shortcuts.unpack(r as usize - core.input_arc_count).len()
    } else {
        1
    }
}

/// One pass over all current chains. Returns the number of chains removed.
fn bypass_round(graph: &Graph, core: &mut CoreGraph, stats: &mut ChainStats) -> usize {
    let n = core.in_core.len();
    let spec = graph.spec();
    let inc = Incidence::new(core);
    let neighbors: Vec<Option<[NodeId; 2]>> = (0..n)
        .map(|v| {
            if core.in_core[v] {
                chain_neighbors(inc.of(v as NodeId))
            } else {
                None
            }
        })
        .collect();
    let candidate = |v: NodeId| neighbors[v as usize].is_some();

    let mut removed_arc = vec![false; core.arcs.len()];
    let mut visited = vec![false; n];
    let mut new_arcs: Vec<(NodeId, NodeId, ArcRef)> = Vec::new();
    let mut nodes: Vec<NodeId> = Vec::new();
    let mut chains = 0;

    for e in 0..n as NodeId {
        if !core.in_core[e as usize] || candidate(e) {
            continue;
        }
        for i in 0..inc.of(e).len() {
            let x = inc.of(e)[i].0;
            if !candidate(x) || visited[x as usize] {
                continue;
            }
            nodes.clear();
            nodes.push(e);
            let (mut prev, mut cur) = (e, x);
            while candidate(cur) {
                visited[cur as usize] = true;
                nodes.push(cur);
                let [a, b] = neighbors[cur as usize].unwrap();
                let next = if a == prev { b } else { a };
                prev = cur;
                cur = next;
            }
            nodes.push(cur);
            let f = cur;
            chains += 1;
            stats.chains += 1;

            // segment arcs in both directions, looked up at the interior end
            let mut fwd: Vec<Vec<ArcRef>> = Vec::with_capacity(nodes.len() - 1);
            let mut bwd: Vec<Vec<ArcRef>> = Vec::with_capacity(nodes.len() - 1);
            for w in nodes.windows(2) {
                let (a, b) = (w[0], w[1]);
                let at = if candidate(b) { b } else { a };
                let other = if at == a { b } else { a };
                let mut ab = Vec::new();
                let mut ba = Vec::new();
                for &(nb, ai, out) in inc.of(at) {
                    if nb != other {
                        continue;
                    }
                    removed_arc[ai as usize] = true;
                    let r = core.arcs[ai as usize].2;
                    if out == (at == a) {
                        ab.push(r);
                    } else {
                        ba.push(r);
                    }
                }
                stats.chain_arcs += ab.first().or(ba.first()).map_or(1, |&r| flat_len(core, r));
                fwd.push(prune_dominated(graph, core, ab));
                ba = prune_dominated(graph, core, ba);
                bwd.push(ba);
            }
            for &v in &nodes[1..nodes.len() - 1] {
                core.in_core[v as usize] = false;
            }
            if e == f {
                continue;
            }
            bwd.reverse();
            for (tail, head, segments) in [(e, f, &fwd), (f, e, &bwd)] {
                add_chain_shortcuts(graph, core, spec, tail, head, segments, stats, &mut new_arcs);
            }
        }
    }

    // cycles without endpoints: keep the smallest node as anchor
    for v in 0..n as NodeId {
        if !core.in_core[v as usize] || !candidate(v) || visited[v as usize] {
            continue;
        }
        visited[v as usize] = true;
        let (mut prev, mut cur) = (v, neighbors[v as usize].unwrap()[0]);
        let mut len = 0;
        loop {
            for &(nb, ai, _) in inc.of(cur) {
                if nb == prev {
                    removed_arc[ai as usize] = true;
                }
            }
            len += 1;
            if cur == v {
                break;
            }
            visited[cur as usize] = true;
            core.in_core[cur as usize] = false;
            let [a, b] = neighbors[cur as usize].unwrap();
            let next = if a == prev { b } else { a };
            prev = cur;
            cur = next;
        }
        chains += 1;
        stats.chains += 1;
        stats.chain_arcs += len;
    }

    if chains > 0 {
        let mut arcs: Vec<_> = core
            .arcs
            .iter()
            .zip(&removed_arc)
            .filter(|(_, &r)| !r)
            .map(|(&a, _)| a)
            .collect();
        arcs.extend(new_arcs);
        core.arcs = arcs;
    }
    chains
}

/// Drops references whose cost another reference in the list dominates.
/// Among equal costs the first one stays.
fn prune_dominated(graph: &Graph, core: &CoreGraph, refs: Vec<ArcRef>) -> Vec<ArcRef> {
    if refs.len() < 2 {
        return refs;
    }
    let spec = graph.spec();
    let cost = |r: ArcRef| core.ref_cost(graph, r);
    refs.iter()
        .enumerate()
        .filter(|&(i, &r)| {
            !refs.iter().enumerate().any(|(j, &q)| {
                j != i
                    && spec.dominates(cost(q), cost(r))
                    && (j < i || !spec.dominates(cost(r), cost(q)))
            })
        })
        .map(|(_, &r)| r)
        .collect()
}

/// One shortcut per combination of segment arcs; none if a segment is empty.
#[allow(clippy::too_many_arguments)]
fn add_chain_shortcuts(
    graph: &Graph,
    core: &mut CoreGraph,
    spec: &crate::cost::CombineSpec,
    tail: NodeId,
    head: NodeId,
    segments: &[Vec<ArcRef>],
    stats: &mut ChainStats,
    new_arcs: &mut Vec<(NodeId, NodeId, ArcRef)>,
) {
    if segments.iter().any(|s| s.is_empty()) {
        return;
    }
    let k = spec.k();
    let mut pick = vec![0usize; segments.len()];
    let mut cost = vec![0u32; k];
    let mut tmp = vec![0u32; k];
    let mut unpack: Vec<ArcRef> = Vec::new();
    loop {
        cost.copy_from_slice(&spec.identity().0);
        unpack.clear();
        let mut saturated = false;
        for (seg, &p) in segments.iter().zip(&pick) {
            let r = seg[p];
            saturated |= spec.combine_into(&cost, core.ref_cost(graph, r), &mut tmp);
            cost.copy_from_slice(&tmp);
            if core.is_shortcut(r) {
                unpack.extend_from_slice(core.shortcuts.unpack(r as usize - core.input_arc_count));
            } else {
                unpack.push(r);
            }
        }
        stats.saturated += saturated as usize;
        let idx = core.shortcuts.push(tail, head, &cost, &unpack);
        new_arcs.push((tail, head, (core.input_arc_count + idx) as ArcRef));

        // next combination
        let mut i = 0;
        loop {
            if i == pick.len() {
                return;
            }
            pick[i] += 1;
            if pick[i] < segments[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::biconnected_components;
    use super::*;
    use crate::cost::{CombineOp, CombineSpec, CostVector, INF_THRESHOLD};

    fn graph(arcs: &[(u32, u32, u32)], n: usize) -> Graph {
        Graph::from_arcs(
            n,
            CombineSpec::additive(1),
            arcs.iter().map(|&(u, v, c)| (u, v, CostVector(vec![c]))),
        )
        .unwrap()
    }

    fn both(edges: &[(u32, u32)]) -> Vec<(u32, u32, u32)> {
        edges
            .iter()
            .enumerate()
            .flat_map(|(i, &(u, v))| [(u, v, i as u32 + 1), (v, u, 10 * (i as u32 + 1))])
            .collect()
    }

    fn run(g: &Graph) -> (Vec<bool>, CoreGraph, ChainStats) {
        let step1 = step1_largest_bcc(g, &biconnected_components(g));
        let (core, stats) = step2_remove_chains(g, &step1);
        (step1, core, stats)
    }

    #[test]
    fn step1_triangle_with_pendant() {
        let g = graph(&both(&[(0, 1), (1, 2), (2, 0), (2, 3)]), 4);
        let (step1, _, _) = run(&g);
        assert_eq!(step1, vec![true, true, true, false]);
    }

    #[test]
    fn bidirected_chain_between_hubs() {
        // hubs 0 and 3 joined by three parallel routes: a direct K4-ish
        // structure so they keep degree >= 3, plus the chain 0-4-5-3.
        let edges = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (0, 4), (4, 5), (5, 3)];
        let g = graph(&both(&edges), 6);
        let (_, core, stats) = run(&g);
        assert!(!core.in_core[4] && !core.in_core[5]);
        assert_eq!(stats.chains, 1);
        assert_eq!(stats.chain_arcs, 3);
        let sc = &core.shortcuts;
        assert_eq!(sc.len(), 2);
        let mut ends: Vec<_> = (0..2).map(|i| (sc.tail(i), sc.head(i), sc.unpack(i).len())).collect();
        ends.sort();
        assert_eq!(ends, vec![(0, 3, 3), (3, 0, 3)]);
        // forward costs 6 + 7 + 8, backward 60 + 70 + 80
        for i in 0..2 {
            let expect = if sc.tail(i) == 0 { 21 } else { 210 };
            assert_eq!(sc.cost(i), &[expect]);
        }
    }

    #[test]
    fn one_way_chain_gets_one_shortcut() {
        // 0 and 2 are hubs of a bidirected triangle-fan; chain 0 -> 3 -> 2 is one-way
        let mut arcs = both(&[(0, 1), (1, 2), (0, 4), (4, 2), (1, 4)]);
        arcs.extend([(0, 3, 5), (3, 2, 6)]);
        let g = graph(&arcs, 5);
        let (_, core, _) = run(&g);
        assert!(!core.in_core[3]);
        let sc = &core.shortcuts;
        let chain: Vec<_> = (0..sc.len())
            .filter(|&i| sc.unpack(i).len() == 2 && sc.cost(i) == [11])
            .collect();
        assert_eq!(chain.len(), 1);
        assert_eq!((sc.tail(chain[0]), sc.head(chain[0])), (0, 2));
    }

    #[test]
    fn broken_direction_gets_no_shortcut() {
        // 0 -> 3 -> 2 forward, but only 2 -> 3 backward (no 3 -> 0)
        let mut arcs = both(&[(0, 1), (1, 2), (0, 4), (4, 2), (1, 4)]);
        arcs.extend([(0, 3, 5), (3, 2, 6), (2, 3, 7)]);
        let g = graph(&arcs, 5);
        let (_, core, _) = run(&g);
        let sc = &core.shortcuts;
        let into_zero = (0..sc.len()).filter(|&i| sc.head(i) == 0 && sc.tail(i) == 2).count();
        assert_eq!(into_zero, 0);
    }

    #[test]
    fn pure_cycle_collapses_to_anchor() {
        let g = graph(&both(&[(0, 1), (1, 2), (2, 3), (3, 0)]), 4);
        let (_, core, stats) = run(&g);
        assert_eq!(core.in_core, vec![true, false, false, false]);
        assert!(core.shortcuts.is_empty());
        assert!(core.arcs.is_empty());
        assert_eq!(stats.chains, 1);
    }

    #[test]
    fn cycle_block_next_to_triangle() {
        // the largest block is the 4-cycle 0-3-4-5, the triangle is dropped
        let g = graph(&both(&[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 5), (5, 0)]), 6);
        let (_, core, _) = run(&g);
        assert_eq!(core.node_count(), 1);
        assert!(core.in_core[0]);
    }

    #[test]
    fn dominated_parallel_arc_is_skipped() {
        // 3 sits between 0 and 2; 0 -> 3 exists twice with costs 1 and 2
        let mut arcs = both(&[(0, 1), (1, 2), (0, 4), (4, 2), (1, 4), (3, 2)]);
        arcs.extend([(0, 3, 1), (0, 3, 2), (3, 0, 3)]);
        let g = graph(&arcs, 5);
        let (_, core, _) = run(&g);
        assert!(!core.in_core[3]);
        let sc = &core.shortcuts;
        let costs: Vec<_> = (0..sc.len())
            .filter(|&i| (sc.tail(i), sc.head(i)) == (0, 2))
            .map(|i| sc.cost(i)[0])
            .collect();
        assert_eq!(costs, vec![7]);
    }

    #[test]
    fn incomparable_parallel_arcs_multiply() {
        let spec = CombineSpec::new(vec![CombineOp::Add, CombineOp::Min]).unwrap();
        let mut arcs: Vec<(u32, u32, [u32; 2])> = both(&[(0, 1), (1, 2), (0, 4), (4, 2), (1, 4), (3, 2)])
            .into_iter()
            .map(|(u, v, c)| (u, v, [c, INF_THRESHOLD]))
            .collect();
        arcs.extend([(0, 3, [1, 5]), (0, 3, [2, 9]), (3, 0, [3, INF_THRESHOLD])]);
        let g = Graph::from_arcs(
            5,
            spec,
            arcs.iter().map(|&(u, v, c)| (u, v, CostVector(c.to_vec()))),
        )
        .unwrap();
        let (_, core, _) = run(&g);
        let sc = &core.shortcuts;
        let mut costs: Vec<_> = (0..sc.len())
            .filter(|&i| (sc.tail(i), sc.head(i)) == (0, 2))
            .map(|i| sc.cost(i).to_vec())
            .collect();
        costs.sort();
        assert_eq!(costs, vec![vec![7, 5], vec![8, 9]]);
    }

    #[test]
    fn shortcut_creates_second_round_chain() {
        // K4 on 0..4; node 4 touches 0, 1 and the chain 4-5-6-0
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        edges.extend([(4, 0), (4, 1), (4, 5), (5, 6), (6, 0)]);
        let g = graph(&both(&edges), 7);
        let (_, core, stats) = run(&g);
        assert_eq!(core.in_core, vec![true, true, true, true, false, false, false]);
        assert_eq!(stats.chains, 2);
        for i in 0..core.shortcuts.len() {
            let (t, h) = (core.shortcuts.tail(i), core.shortcuts.head(i));
            assert!(t < 4 && h < 4);
            assert!(core.shortcuts.unpack(i).iter().all(|&r| (r as usize) < g.arc_count()));
        }
        assert!(core.arcs.iter().all(|&(u, v, _)| u < 4 && v < 4));
    }
}
