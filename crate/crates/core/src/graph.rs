//! Directed multigraph in adjacency-array form.

use std::collections::HashMap;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cost::{CombineSpec, CostVector};

pub type NodeId = u32;
pub type ArcId = u32;

/// Marker for "no node" / "no arc".
pub const INVALID: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc {index} ({tail}->{head}) has an endpoint outside 0..{node_count}")]
    EndpointOutOfRange {
        index: usize,
        tail: u32,
        head: u32,
        node_count: usize,
    },
    #[error("arc {index} has {got} cost components, expected {expected}")]
    CostShape {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("malformed adjacency array: {0}")]
    Malformed(String),
    #[error("graph too large for 32-bit ids")]
    TooLarge,
}

/// Position in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    first_out: Vec<u32>,
    head: Vec<NodeId>,
    /// Row-major, `k` entries per arc.
    costs: Vec<u32>,
    spec: CombineSpec,
    coords: Option<Vec<Coord>>,
}

impl Graph {
    /// Validates and wraps raw adjacency arrays.
    pub fn from_parts(
        first_out: Vec<u32>,
        head: Vec<NodeId>,
        costs: Vec<u32>,
        spec: CombineSpec,
        coords: Option<Vec<Coord>>,
    ) -> Result<Self, GraphError> {
        let malformed = |m: &str| Err(GraphError::Malformed(m.to_string()));
        if first_out.is_empty() || first_out[0] != 0 {
            return malformed("first_out must start with 0");
        }
        if first_out.windows(2).any(|w| w[0] > w[1]) {
            return malformed("first_out must be non-decreasing");
        }
        if *first_out.last().unwrap() as usize != head.len() {
            return malformed("first_out must end with the arc count");
        }
        if costs.len() != head.len() * spec.k() {
            return malformed("cost array does not match arc count");
        }
        let n = first_out.len() - 1;
        if let Some(idx) = head.iter().position(|&h| h as usize >= n) {
            return Err(GraphError::EndpointOutOfRange {
                index: idx,
                tail: INVALID,
                head: head[idx],
                node_count: n,
            });
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return malformed("coordinate count does not match node count");
            }
        }
        Ok(Graph {
            first_out,
            head,
            costs,
            spec,
            coords,
        })
    }

    /// Builds a graph from `(tail, head, cost)` triples. Arcs are sorted by
    /// tail; arcs sharing a tail keep their input order.
    pub fn from_arcs<I>(node_count: usize, spec: CombineSpec, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, CostVector)>,
    {
        let mut tails = Vec::new();
        let mut heads = Vec::new();
        let mut costs = Vec::new();
        for (i, (t, h, c)) in arcs.into_iter().enumerate() {
            if c.len() != spec.k() {
                return Err(GraphError::CostShape {
                    index: i,
                    expected: spec.k(),
                    got: c.len(),
                });
            }
            tails.push(t);
            heads.push(h);
            costs.extend_from_slice(&c);
        }
        Ok(build_indexed(node_count, spec, &tails, &heads, &costs)?.0)
    }

    /// A graph without arcs.
    pub fn empty(node_count: usize, spec: CombineSpec) -> Self {
        Graph {
            first_out: vec![0; node_count + 1],
            head: Vec::new(),
            costs: Vec::new(),
            spec,
            coords: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.first_out.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.head.len()
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn spec(&self) -> &CombineSpec {
        &self.spec
    }

    pub fn first_out(&self) -> &[u32] {
        &self.first_out
    }

    pub fn heads(&self) -> &[NodeId] {
        &self.head
    }

    pub fn costs_flat(&self) -> &[u32] {
        &self.costs
    }

    pub fn coords(&self) -> Option<&[Coord]> {
        self.coords.as_deref()
    }

    pub fn set_coords(&mut self, coords: Option<Vec<Coord>>) -> Result<(), GraphError> {
        if let Some(c) = &coords {
            if c.len() != self.node_count() {
                return Err(GraphError::Malformed(
                    "coordinate count does not match node count".into(),
                ));
            }
        }
        self.coords = coords;
        Ok(())
    }

    #[inline]
    pub fn out_arcs(&self, node: NodeId) -> Range<usize> {
        self.first_out[node as usize] as usize..self.first_out[node as usize + 1] as usize
    }

    #[inline]
    pub fn head(&self, arc: usize) -> NodeId {
        self.head[arc]
    }

    #[inline]
    pub fn cost(&self, arc: usize) -> &[u32] {
        let k = self.spec.k();
        &self.costs[arc * k..(arc + 1) * k]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out_arcs(node).len()
    }

    /// Tail of every arc.
    pub fn tails(&self) -> Vec<NodeId> {
        let mut tails = Vec::with_capacity(self.arc_count());
        for u in 0..self.node_count() {
            tails.extend(std::iter::repeat_n(u as NodeId, self.out_degree(u as NodeId)));
        }
        tails
    }

    /// `(tail, head, arc id)` in arc order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, ArcId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.out_arcs(u)
                .map(move |a| (u, self.head[a], a as ArcId))
        })
    }

    /// Replaces all cost vectors. `costs` is row-major in arc order.
    pub fn with_costs(mut self, spec: CombineSpec, costs: Vec<u32>) -> Result<Self, GraphError> {
        if costs.len() != self.arc_count() * spec.k() {
            return Err(GraphError::Malformed(format!(
                "{} cost entries for {} arcs with k={}",
                costs.len(),
                self.arc_count(),
                spec.k()
            )));
        }
        self.spec = spec;
        self.costs = costs;
        Ok(self)
    }

    /// Arc-reversed graph together with the original arc id of every
    /// reversed arc.
    pub fn reverse_indexed(&self) -> (Graph, Vec<ArcId>) {
        let tails = self.tails();
        let (mut g, map) =
            build_indexed(self.node_count(), self.spec.clone(), &self.head, &tails, &self.costs)
                .expect("reversal of a valid graph is valid");
        g.coords = self.coords.clone();
        (g, map)
    }

    /// Subgraph induced by nodes with `keep[v]`, ids compacted in order.
    /// Returns the graph, the old id of every new node and the old id of
    /// every new arc.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<NodeId>, Vec<ArcId>) {
        let n = self.node_count();
        let mut new_id = vec![INVALID; n];
        let mut old_nodes = Vec::new();
        for v in 0..n {
            if keep[v] {
                new_id[v] = old_nodes.len() as NodeId;
                old_nodes.push(v as NodeId);
            }
        }
        let k = self.k();
        let mut first_out = Vec::with_capacity(old_nodes.len() + 1);
        first_out.push(0u32);
        let mut head = Vec::new();
        let mut costs = Vec::new();
        let mut old_arcs = Vec::new();
        for &u in &old_nodes {
            for a in self.out_arcs(u) {
                let h = new_id[self.head[a] as usize];
                if h != INVALID {
                    head.push(h);
                    costs.extend_from_slice(&self.costs[a * k..(a + 1) * k]);
                    old_arcs.push(a as ArcId);
                }
            }
            first_out.push(head.len() as u32);
        }
        let coords = self
            .coords
            .as_ref()
            .map(|c| old_nodes.iter().map(|&v| c[v as usize]).collect());
        (
            Graph {
                first_out,
                head,
                costs,
                spec: self.spec.clone(),
                coords,
            },
            old_nodes,
            old_arcs,
        )
    }

    /// Reverse adjacency: for every node the tails of its incoming arcs.
    pub(crate) fn in_adjacency(&self) -> (Vec<u32>, Vec<NodeId>) {
        let n = self.node_count();
        let mut first_in = vec![0u32; n + 1];
        for &h in &self.head {
            first_in[h as usize + 1] += 1;
        }
        for i in 0..n {
            first_in[i + 1] += first_in[i];
        }
        let mut fill = first_in.clone();
        let mut tails = vec![0; self.arc_count()];
        for (u, h, _) in self.arcs() {
            tails[fill[h as usize] as usize] = u;
            fill[h as usize] += 1;
        }
        (first_in, tails)
    }
}

/// Counting-sort construction. Returns the graph and, for every arc of it,
/// the index of the input triple it came from.
pub fn build_indexed(
    node_count: usize,
    spec: CombineSpec,
    tails: &[NodeId],
    heads: &[NodeId],
    costs: &[u32],
) -> Result<(Graph, Vec<ArcId>), GraphError> {
    let m = tails.len();
    let k = spec.k();
    if node_count >= u32::MAX as usize || m >= u32::MAX as usize {
        return Err(GraphError::TooLarge);
    }
    assert_eq!(heads.len(), m);
    assert_eq!(costs.len(), m * k);
    for i in 0..m {
        if tails[i] as usize >= node_count || heads[i] as usize >= node_count {
            return Err(GraphError::EndpointOutOfRange {
                index: i,
                tail: tails[i],
                head: heads[i],
                node_count,
            });
        }
    }
    let mut first_out = vec![0u32; node_count + 1];
    for &t in tails {
        first_out[t as usize + 1] += 1;
    }
    for i in 0..node_count {
        first_out[i + 1] += first_out[i];
    }
    let mut fill = first_out.clone();
    let mut order = vec![0 as ArcId; m];
    for (i, &t) in tails.iter().enumerate() {
        order[fill[t as usize] as usize] = i as ArcId;
        fill[t as usize] += 1;
    }
    let mut head = Vec::with_capacity(m);
    let mut sorted_costs = Vec::with_capacity(m * k);
    for &i in &order {
        let i = i as usize;
        head.push(heads[i]);
        sorted_costs.extend_from_slice(&costs[i * k..(i + 1) * k]);
    }
    Ok((
        Graph {
            first_out,
            head,
            costs: sorted_costs,
            spec,
            coords: None,
        },
        order,
    ))
}

/// Builds a graph from `(tail, head, cost)` triples.
pub fn build_graph<I>(node_count: usize, spec: CombineSpec, arcs: I) -> Result<Graph, GraphError>
where
    I: IntoIterator<Item = (NodeId, NodeId, CostVector)>,
{
    Graph::from_arcs(node_count, spec, arcs)
}

/// Bijection from old node ids to new node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    new_id: Vec<NodeId>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            new_id: (0..n as NodeId).collect(),
        }
    }

    pub fn from_new_ids(new_id: Vec<NodeId>) -> Result<Self, GraphError> {
        let n = new_id.len();
        let mut seen = vec![false; n];
        for (old, &new) in new_id.iter().enumerate() {
            if new as usize >= n {
                return Err(GraphError::InvalidPermutation(format!(
                    "node {old} maps to {new}, outside 0..{n}"
                )));
            }
            if std::mem::replace(&mut seen[new as usize], true) {
                return Err(GraphError::InvalidPermutation(format!(
                    "id {new} assigned twice"
                )));
            }
        }
        Ok(Permutation { new_id })
    }

    /// `order[i]` is the old id of the node placed at position `i`.
    pub fn from_order(order: &[NodeId]) -> Result<Self, GraphError> {
        let n = order.len();
        let mut new_id = vec![INVALID; n];
        for (pos, &old) in order.iter().enumerate() {
            if old as usize >= n || new_id[old as usize] != INVALID {
                return Err(GraphError::InvalidPermutation(format!(
                    "order entry {old} at position {pos} is out of range or repeated"
                )));
            }
            new_id[old as usize] = pos as NodeId;
        }
        Ok(Permutation { new_id })
    }

    pub fn len(&self) -> usize {
        self.new_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_id.is_empty()
    }

    #[inline]
    pub fn new_id(&self, old: NodeId) -> NodeId {
        self.new_id[old as usize]
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.new_id
    }

    /// Old id of every new id.
    pub fn order(&self) -> Vec<NodeId> {
        let mut order = vec![0; self.len()];
        for (old, &new) in self.new_id.iter().enumerate() {
            order[new as usize] = old as NodeId;
        }
        order
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            new_id: self.order(),
        }
    }

    /// First `self`, then `then`.
    pub fn then(&self, then: &Permutation) -> Permutation {
        assert_eq!(self.len(), then.len());
        Permutation {
            new_id: self.new_id.iter().map(|&v| then.new_id(v)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.new_id.iter().enumerate().all(|(i, &v)| i as NodeId == v)
    }
}

/// Relabels nodes. Arc lists are re-sorted by new tail; costs and
/// coordinates move along.
pub fn apply_permutation(graph: &Graph, perm: &Permutation) -> Result<Graph, GraphError> {
    Ok(apply_permutation_indexed(graph, perm)?.0)
}

/// Like [`apply_permutation`], also returning the old id of every new arc.
pub fn apply_permutation_indexed(
    graph: &Graph,
    perm: &Permutation,
) -> Result<(Graph, Vec<ArcId>), GraphError> {
    if perm.len() != graph.node_count() {
        return Err(GraphError::InvalidPermutation(format!(
            "permutation of {} nodes applied to a graph of {}",
            perm.len(),
            graph.node_count()
        )));
    }
    Permutation::from_new_ids(perm.as_slice().to_vec())?;
    let tails: Vec<NodeId> = graph.tails().into_iter().map(|t| perm.new_id(t)).collect();
    let heads: Vec<NodeId> = graph.head.iter().map(|&h| perm.new_id(h)).collect();
    let (mut g, map) = build_indexed(
        graph.node_count(),
        graph.spec.clone(),
        &tails,
        &heads,
        &graph.costs,
    )?;
    if let Some(c) = &graph.coords {
        let mut moved = vec![Coord { lat: 0.0, lon: 0.0 }; c.len()];
        for (old, &p) in c.iter().enumerate() {
            moved[perm.new_id(old as NodeId) as usize] = p;
        }
        g.coords = Some(moved);
    }
    Ok((g, map))
}

/// Result of [`cleanup`].
#[derive(Debug, Clone)]
pub struct Cleaned {
    pub graph: Graph,
    /// Input id of every retained node.
    pub original_ids: Vec<NodeId>,
}

/// Drops self-loops, collapses parallel arcs (keeping the lexicographically
/// smallest cost vector, at the position of the first occurrence), and keeps
/// only the largest strongly connected component. Among several largest
/// components the one containing the smallest node id wins.
pub fn cleanup(graph: &Graph) -> Cleaned {
    let n = graph.node_count();
    let k = graph.k();
    let mut tails = Vec::with_capacity(graph.arc_count());
    let mut heads = Vec::with_capacity(graph.arc_count());
    let mut costs: Vec<u32> = Vec::with_capacity(graph.costs.len());
    let mut slot: HashMap<NodeId, usize> = HashMap::new();
    for u in 0..n as NodeId {
        slot.clear();
        for a in graph.out_arcs(u) {
            let h = graph.head[a];
            if h == u {
                continue;
            }
            let c = graph.cost(a);
            match slot.get(&h) {
                Some(&i) => {
                    if c < &costs[i * k..(i + 1) * k] {
                        costs[i * k..(i + 1) * k].copy_from_slice(c);
                    }
                }
                None => {
                    slot.insert(h, tails.len());
                    tails.push(u);
                    heads.push(h);
                    costs.extend_from_slice(c);
                }
            }
        }
    }
    let (mut simple, _) = build_indexed(n, graph.spec.clone(), &tails, &heads, &costs)
        .expect("subset of a valid graph");
    simple.coords = graph.coords.clone();

    let comp = strongly_connected_components(&simple);
    let keep = largest_component(&comp);
    let (g, original_ids, _) = simple.induced(&keep);
    Cleaned {
        graph: g,
        original_ids,
    }
}

/// Component label of every node (Kosaraju, iterative).
pub fn strongly_connected_components(graph: &Graph) -> Vec<u32> {
    let n = graph.node_count();
    let mut visited = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    let mut stack: Vec<(NodeId, usize)> = Vec::new();
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        stack.push((root as NodeId, graph.out_arcs(root as NodeId).start));
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            let end = graph.out_arcs(u).end;
            if *next < end {
                let v = graph.head[*next];
                *next += 1;
                if !visited[v as usize] {
                    visited[v as usize] = true;
                    stack.push((v, graph.out_arcs(v).start));
                }
            } else {
                finish.push(u);
                stack.pop();
            }
        }
    }

    let (first_in, in_tails) = graph.in_adjacency();
    let mut comp = vec![INVALID; n];
    let mut count = 0;
    let mut todo = Vec::new();
    for &root in finish.iter().rev() {
        if comp[root as usize] != INVALID {
            continue;
        }
        comp[root as usize] = count;
        todo.push(root);
        while let Some(u) = todo.pop() {
            for i in first_in[u as usize]..first_in[u as usize + 1] {
                let v = in_tails[i as usize];
                if comp[v as usize] == INVALID {
                    comp[v as usize] = count;
                    todo.push(v);
                }
            }
        }
        count += 1;
    }
    comp
}

/// Membership mask of the largest component; ties go to the component
/// holding the smallest node id.
fn largest_component(comp: &[u32]) -> Vec<bool> {
    if comp.is_empty() {
        return Vec::new();
    }
    let count = *comp.iter().max().unwrap() as usize + 1;
    let mut size = vec![0usize; count];
    let mut min_node = vec![usize::MAX; count];
    for (v, &c) in comp.iter().enumerate() {
        size[c as usize] += 1;
        min_node[c as usize] = min_node[c as usize].min(v);
    }
    let best = (0..count)
        .max_by(|&a, &b| size[a].cmp(&size[b]).then(min_node[b].cmp(&min_node[a])))
        .unwrap() as u32;
    comp.iter().map(|&c| c == best).collect()
}

/// Undirected neighbor lists: out-heads in adjacency order followed by
/// in-tails in tail order. Parallel entries are kept.
pub(crate) fn undirected_adjacency(graph: &Graph) -> (Vec<u32>, Vec<NodeId>) {
    let n = graph.node_count();
    let (first_in, in_tails) = graph.in_adjacency();
    let mut first = Vec::with_capacity(n + 1);
    let mut nbrs = Vec::with_capacity(2 * graph.arc_count());
    first.push(0u32);
    for u in 0..n {
        nbrs.extend_from_slice(&graph.head[graph.out_arcs(u as NodeId)]);
        nbrs.extend_from_slice(&in_tails[first_in[u] as usize..first_in[u + 1] as usize]);
        first.push(nbrs.len() as u32);
    }
    (first, nbrs)
}

/// DFS pre-order over the undirected view, starting at `root` and restarting
/// at the smallest unvisited node for further components.
pub fn dfs_preorder(graph: &Graph, root: NodeId) -> Permutation {
    let n = graph.node_count();
    if n == 0 {
        return Permutation::identity(0);
    }
    assert!((root as usize) < n, "dfs root out of range");
    let (first, nbrs) = undirected_adjacency(graph);
    let mut new_id = vec![INVALID; n];
    let mut next_id = 0u32;
    let mut stack: Vec<(NodeId, u32)> = Vec::new();
    let roots = std::iter::once(root).chain(0..n as NodeId);
    for r in roots {
        if new_id[r as usize] != INVALID {
            continue;
        }
        new_id[r as usize] = next_id;
        next_id += 1;
        stack.push((r, first[r as usize]));
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < first[u as usize + 1] {
                let v = nbrs[*next as usize];
                *next += 1;
                if new_id[v as usize] == INVALID {
                    new_id[v as usize] = next_id;
                    next_id += 1;
                    stack.push((v, first[v as usize]));
                }
            } else {
                stack.pop();
            }
        }
    }
    Permutation { new_id }
}

/// DFS pre-order from a root drawn with `seed`.
pub fn dfs_preorder_random_root(graph: &Graph, seed: u64) -> Permutation {
    use rand::Rng;
    if graph.node_count() == 0 {
        return Permutation::identity(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = rng.gen_range(0..graph.node_count()) as NodeId;
    dfs_preorder(graph, root)
}

/// Uniform random order, reproducible for a fixed seed.
pub fn random_order(node_count: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut new_id: Vec<NodeId> = (0..node_count as NodeId).collect();
    new_id.shuffle(&mut rng);
    Permutation { new_id }
}

/// Node orders applied before preprocessing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeOrder {
    Input,
    Random,
    Dfs,
}

impl NodeOrder {
    pub fn name(self) -> &'static str {
        match self {
            NodeOrder::Input => "input",
            NodeOrder::Random => "random",
            NodeOrder::Dfs => "dfs",
        }
    }

    /// Permutation realizing this order. The seed only affects `Random`;
    /// `Dfs` is rooted at node 0.
    pub fn permutation(self, graph: &Graph, seed: u64) -> Permutation {
        match self {
            NodeOrder::Input => Permutation::identity(graph.node_count()),
            NodeOrder::Random => random_order(graph.node_count(), seed),
            NodeOrder::Dfs => dfs_preorder(graph, 0),
        }
    }
}

impl std::fmt::Display for NodeOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NodeOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "input" => Ok(NodeOrder::Input),
            "random" => Ok(NodeOrder::Random),
            "dfs" => Ok(NodeOrder::Dfs),
            other => Err(format!("unknown node order `{other}` (input, random, dfs)")),
        }
    }
}

/// Node counts per number of distinct undirected neighbors. Bucket 5 holds
/// all degrees of five and more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    pub buckets: [u64; 6],
}

impl DegreeHistogram {
    pub fn total(&self) -> u64 {
        self.buckets.iter().sum()
    }

    pub fn percent(&self, degree: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        100.0 * self.buckets[degree.min(5)] as f64 / total as f64
    }
}

pub fn degree_histogram(graph: &Graph) -> DegreeHistogram {
    let (first, nbrs) = undirected_adjacency(graph);
    let mut hist = DegreeHistogram::default();
    let mut scratch = Vec::new();
    for u in 0..graph.node_count() {
        scratch.clear();
        scratch.extend(
            nbrs[first[u] as usize..first[u + 1] as usize]
                .iter()
                .copied()
                .filter(|&v| v as usize != u),
        );
        scratch.sort_unstable();
        scratch.dedup();
        hist.buckets[scratch.len().min(5)] += 1;
    }
    hist
}
