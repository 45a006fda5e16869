#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topocore::cost::INF_THRESHOLD;
use topocore::{CombineOp, CombineSpec, CostVector, Graph, NodeId, Objective};

/// Additive, threshold and bitfield components.
pub fn mixed_spec() -> CombineSpec {
    use CombineOp::*;
    CombineSpec::new(vec![Add, Add, Add, Add, Min, Min, BitAnd, BitAnd]).unwrap()
}

pub fn random_costs(spec: &CombineSpec, rng: &mut ChaCha8Rng) -> CostVector {
    CostVector(
        spec.ops()
            .iter()
            .map(|op| match op {
                CombineOp::Add => rng.gen_range(0..=100),
                CombineOp::Min => {
                    if rng.gen_bool(0.8) {
                        INF_THRESHOLD
                    } else {
                        rng.gen_range(0..=100)
                    }
                }
                CombineOp::BitAnd => {
                    if rng.gen_bool(0.7) {
                        0b1111
                    } else {
                        rng.gen_range(0..16)
                    }
                }
            })
            .collect(),
    )
}

/// A road-flavored random multigraph: a random tree plus extra edges, some
/// of them subdivided into chains, mostly bidirected, with the occasional
/// parallel arc. At most `max_n` nodes and 1000 arcs.
pub fn random_graph(seed: u64, max_n: usize, spec: &CombineSpec) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hubs = rng.gen_range(2..=(max_n / 3).max(2));
    let mut n = hubs;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for v in 1..hubs {
        edges.push((rng.gen_range(0..v) as NodeId, v as NodeId));
    }
    let extra = rng.gen_range(0..=hubs * 2);
    for _ in 0..extra {
        let u = rng.gen_range(0..hubs) as NodeId;
        let v = rng.gen_range(0..hubs) as NodeId;
        edges.push((u, v));
    }
    let mut arcs: Vec<(NodeId, NodeId, CostVector)> = Vec::new();
    for (u, v) in edges {
        // subdivide into a chain while nodes remain
        let len = if rng.gen_bool(0.5) { rng.gen_range(1..=4) } else { 1 };
        let mut path = vec![u];
        for _ in 1..len {
            if n >= max_n {
                break;
            }
            path.push(n as NodeId);
            n += 1;
        }
        path.push(v);
        let kind = rng.gen_range(0..10);
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            if kind != 0 {
                arcs.push((a, b, random_costs(spec, &mut rng)));
            }
            if kind >= 2 {
                arcs.push((b, a, random_costs(spec, &mut rng)));
            }
            if rng.gen_bool(0.03) {
                arcs.push((a, b, random_costs(spec, &mut rng)));
            }
        }
    }
    arcs.shuffle(&mut rng);
    arcs.truncate(1000);
    Graph::from_arcs(n, spec.clone(), arcs).unwrap()
}

pub fn random_objective(spec: &CombineSpec, rng: &mut ChaCha8Rng, kind: usize) -> Objective {
    let adds = spec.count(CombineOp::Add);
    let mins = spec.count(CombineOp::Min);
    let bits = spec.count(CombineOp::BitAnd);
    let mut obj = Objective::new(
        (0..adds).map(|_| rng.gen_range(0..=100)).collect(),
        vec![0; mins],
        vec![0; bits],
    );
    if kind % 2 == 1 {
        obj.vehicle = (0..mins).map(|_| rng.gen_range(0..=100)).collect();
    }
    if kind % 4 >= 2 {
        obj.required_bits = (0..bits).map(|_| 1 << rng.gen_range(0..4)).collect();
    }
    obj
}

/// Objective value of one cost vector, written out from the definition.
pub fn value(spec: &CombineSpec, obj: &Objective, c: &[u32]) -> Option<u64> {
    let (mut a, mut m, mut b) = (0, 0, 0);
    let mut sum = 0u64;
    for (i, op) in spec.ops().iter().enumerate() {
        match op {
            CombineOp::Add => {
                sum += obj.add_weights[a] as u64 * c[i] as u64;
                a += 1;
            }
            CombineOp::Min => {
                if c[i] < obj.vehicle[m] {
                    return None;
                }
                m += 1;
            }
            CombineOp::BitAnd => {
                if c[i] & obj.required_bits[b] != obj.required_bits[b] {
                    return None;
                }
                b += 1;
            }
        }
    }
    Some(sum)
}

/// Single-source distances by Bellman-Ford; `None` is unreachable.
pub fn bellman_ford(graph: &Graph, obj: &Objective, s: NodeId) -> Vec<Option<u64>> {
    let spec = graph.spec();
    let arcs: Vec<(usize, usize, Option<u64>)> = graph
        .arcs()
        .map(|(u, v, a)| (u as usize, v as usize, value(spec, obj, graph.cost(a as usize))))
        .collect();
    let mut dist = vec![None; graph.node_count()];
    dist[s as usize] = Some(0);
    loop {
        let mut changed = false;
        for &(u, v, w) in &arcs {
            if let (Some(du), Some(w)) = (dist[u], w) {
                if dist[v].is_none_or(|dv| du + w < dv) {
                    dist[v] = Some(du + w);
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Checks that `path` is a walk from `s` to `t` and returns the objective
/// value of its combined cost vector.
pub fn walk_value(
    graph: &Graph,
    obj: &Objective,
    s: NodeId,
    t: NodeId,
    path: &[u32],
) -> Result<Option<u64>, String> {
    let tails = graph.tails();
    let mut at = s;
    let spec = graph.spec();
    let mut acc = spec.identity().0;
    for (i, &a) in path.iter().enumerate() {
        let a = a as usize;
        if a >= graph.arc_count() {
            return Err(format!("arc {a} out of range"));
        }
        if tails[a] != at {
            return Err(format!("position {i}: arc {a} starts at {} not {at}", tails[a]));
        }
        acc = spec.combine(&acc, graph.cost(a)).unwrap().0;
        at = graph.head(a);
    }
    if at != t {
        return Err(format!("walk ends at {at}, target {t}"));
    }
    Ok(value(spec, obj, &acc))
}

/// Distinct neighbors of every core node over a core arc list.
pub fn distinct_core_neighbors(core: &topocore::topocore::CoreGraph) -> Vec<usize> {
    let n = core.in_core.len();
    let mut nbrs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for &(u, v, _) in &core.arcs {
        nbrs[u as usize].push(v);
        nbrs[v as usize].push(u);
    }
    nbrs.into_iter()
        .map(|mut l| {
            l.sort_unstable();
            l.dedup();
            l.len()
        })
        .collect()
}

/// Fully unpacked input arcs of a reference.
pub fn unpack_ref(prep: &topocore::CorePrep, r: u32) -> Vec<u32> {
    topocore::query::unpack_path(prep, &[r]).unwrap()
}

/// Structural invariants of one pipeline run on `graph`. Returns a list of
/// violations.
pub fn pipeline_violations(graph: &Graph, out: &topocore::topocore::PipelineOutput) -> Vec<String> {
    let mut bad = Vec::new();
    let prep = &out.prep;
    let spec = graph.spec();
    let tails = graph.tails();

    // step 2 leaves no two-neighbor node behind
    let nb = distinct_core_neighbors(&out.topocore);
    for v in 0..graph.node_count() {
        if out.topocore.in_core[v] && nb[v] == 2 {
            bad.push(format!("topocore node {v} has two distinct neighbors"));
        }
    }

    // step 3 set: independent, degree 3 in the snapshot
    let mut in_set = vec![false; graph.node_count()];
    for &v in &out.contracted {
        in_set[v as usize] = true;
        if out.degree_snapshot[v as usize] != 3 {
            bad.push(format!("contracted node {v} had degree {}", out.degree_snapshot[v as usize]));
        }
    }
    for &(u, v, _) in &out.topocore.arcs {
        if in_set[u as usize] && in_set[v as usize] {
            bad.push(format!("contracted nodes {u} and {v} are adjacent"));
        }
    }

    // bidirected parallel-free cores keep their arc count under step 3
    if let Some(is_arcs) = out.stats.is_arcs {
        let mut pairs: Vec<(NodeId, NodeId)> = out.topocore.arcs.iter().map(|&(u, v, _)| (u, v)).collect();
        pairs.sort_unstable();
        let parallel_free = pairs.windows(2).all(|w| w[0] != w[1]);
        let bidirected = pairs.iter().all(|&(u, v)| pairs.binary_search(&(v, u)).is_ok());
        if parallel_free && bidirected && is_arcs != out.topocore.arcs.len() {
            bad.push(format!("step 3 changed arc count {} -> {is_arcs}", out.topocore.arcs.len()));
        }
    }

    // shortcut soundness
    let m = prep.input_arc_count() as u32;
    for i in 0..prep.shortcuts().len() {
        let arcs = unpack_ref(prep, m + i as u32);
        let folded = spec
            .fold(arcs.iter().map(|&a| graph.cost(a as usize)))
            .unwrap();
        if folded.as_slice() != prep.shortcuts().cost(i) {
            bad.push(format!("shortcut {i} cost differs from its fold"));
        }
        let sid = |v: NodeId| prep.search_id(v);
        if sid(tails[arcs[0] as usize]) != prep.shortcuts().tail(i)
            || sid(graph.head(*arcs.last().unwrap() as usize)) != prep.shortcuts().head(i)
        {
            bad.push(format!("shortcut {i} endpoints differ from its path"));
        }
        let mut seen = vec![tails[arcs[0] as usize]];
        for w in arcs.windows(2) {
            let mid = graph.head(w[0] as usize);
            if mid != tails[w[1] as usize] {
                bad.push(format!("shortcut {i} unpacks to a broken walk"));
            }
            if prep.is_core(sid(mid)) {
                bad.push(format!("shortcut {i} passes core node {mid}"));
            }
            seen.push(mid);
        }
        seen.push(graph.head(*arcs.last().unwrap() as usize));
        let len = seen.len();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != len {
            bad.push(format!("shortcut {i} path is not loop-free"));
        }
    }

    // core-closed search graphs and arc accounting
    let core_shortcuts = prep
        .forward()
        .arc_ref
        .iter()
        .filter(|&&r| r >= m)
        .count();
    for (name, sg) in [("forward", prep.forward()), ("backward", prep.backward())] {
        for (u, v, _) in sg.graph.arcs() {
            if prep.is_core(u) && !prep.is_core(v) {
                bad.push(format!("{name} graph leaves the core at {u}->{v}"));
            }
        }
    }
    if prep.forward().graph.arc_count() != graph.arc_count() + core_shortcuts - prep.core_leaving_arcs() {
        bad.push("forward arc count does not match |A| + |A_C| - leaving".into());
    }

    let s = &out.stats;
    let is_nodes = s.is_nodes.unwrap_or(s.topocore_nodes);
    if !(is_nodes <= s.topocore_nodes && s.topocore_nodes <= s.bcc_nodes && s.bcc_nodes <= graph.node_count()) {
        bad.push("core sizes are not monotone".into());
    }
    bad
}
