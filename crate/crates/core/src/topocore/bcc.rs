//! Biconnected components of the undirected view (Tarjan, iterative).

use crate::graph::{Graph, NodeId, INVALID};

/// Every arc is treated as one undirected edge; antiparallel arcs become
/// parallel edges. Self-loops belong to no component.
#[derive(Debug, Clone)]
pub struct Bcc {
    /// Component of every arc, `INVALID` for self-loops.
    pub arc_component: Vec<u32>,
    comp_first: Vec<u32>,
    comp_nodes: Vec<NodeId>,
}

impl Bcc {
    pub fn component_count(&self) -> usize {
        self.comp_first.len() - 1
    }

    pub fn nodes(&self, comp: usize) -> &[NodeId] {
        &self.comp_nodes[self.comp_first[comp] as usize..self.comp_first[comp + 1] as usize]
    }

    /// Components each node belongs to. Cut nodes appear in several.
    pub fn membership(&self, node_count: usize) -> Vec<Vec<u32>> {
        let mut m = vec![Vec::new(); node_count];
        for c in 0..self.component_count() {
            for &v in self.nodes(c) {
                m[v as usize].push(c as u32);
            }
        }
        m
    }

    /// Component with the most nodes; ties go to the one holding the
    /// smallest node id.
    pub fn largest(&self) -> Option<usize> {
        (0..self.component_count()).max_by(|&a, &b| {
            let (na, nb) = (self.nodes(a), self.nodes(b));
            let min_a = na.iter().min().copied().unwrap_or(INVALID);
            let min_b = nb.iter().min().copied().unwrap_or(INVALID);
            na.len().cmp(&nb.len()).then(min_b.cmp(&min_a))
        })
    }
}

pub fn biconnected_components(graph: &Graph) -> Bcc {
    let n = graph.node_count();
    let m = graph.arc_count();
    let tails = graph.tails();

    // incidence lists: (neighbor, edge)
    let mut first = vec![0u32; n + 1];
    for (u, v, _) in graph.arcs() {
        if u != v {
            first[u as usize + 1] += 1;
            first[v as usize + 1] += 1;
        }
    }
    for i in 0..n {
        first[i + 1] += first[i];
    }
    let mut fill = first.clone();
    let mut inc = vec![(0 as NodeId, 0u32); first[n] as usize];
    for (u, v, a) in graph.arcs() {
        if u != v {
            inc[fill[u as usize] as usize] = (v, a);
            fill[u as usize] += 1;
            inc[fill[v as usize] as usize] = (u, a);
            fill[v as usize] += 1;
        }
    }

    let mut disc = vec![INVALID; n];
    let mut low = vec![0u32; n];
    let mut time = 0u32;
    let mut arc_component = vec![INVALID; m];
    let mut comp_first = vec![0u32];
    let mut comp_nodes = Vec::new();
    let mut stamp = vec![INVALID; n];
    let mut edge_stack: Vec<u32> = Vec::new();
    // (node, parent edge, next incidence index)
    let mut frames: Vec<(NodeId, u32, u32)> = Vec::new();

    for root in 0..n {
        if disc[root] != INVALID || first[root] == first[root + 1] {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        frames.push((root as NodeId, INVALID, first[root]));
        while let Some(frame) = frames.last_mut() {
            let (v, parent_edge, next) = *frame;
            if next < first[v as usize + 1] {
                frame.2 += 1;
                let (w, e) = inc[next as usize];
                if e == parent_edge {
                    continue;
                }
                if disc[w as usize] == INVALID {
                    edge_stack.push(e);
                    disc[w as usize] = time;
                    low[w as usize] = time;
                    time += 1;
                    frames.push((w, e, first[w as usize]));
                } else if disc[w as usize] < disc[v as usize] {
                    low[v as usize] = low[v as usize].min(disc[w as usize]);
                    edge_stack.push(e);
                }
            } else {
                frames.pop();
                if let Some(&(p, _, _)) = frames.last() {
                    low[p as usize] = low[p as usize].min(low[v as usize]);
                    if low[v as usize] >= disc[p as usize] {
                        let comp = (comp_first.len() - 1) as u32;
                        loop {
                            let e = edge_stack.pop().expect("tree edge on stack");
                            arc_component[e as usize] = comp;
                            for x in [tails[e as usize], graph.head(e as usize)] {
                                if stamp[x as usize] != comp {
                                    stamp[x as usize] = comp;
                                    comp_nodes.push(x);
                                }
                            }
                            if e == parent_edge {
                                break;
                            }
                        }
                        comp_first.push(comp_nodes.len() as u32);
                    }
                }
            }
        }
    }

    Bcc {
        arc_component,
        comp_first,
        comp_nodes,
    }
}
