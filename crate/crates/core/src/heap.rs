//! Addressable 4-ary min-heap keyed by node id.

use crate::graph::{NodeId, INVALID};

const ARITY: usize = 4;

#[derive(Debug, Clone)]
pub struct QuaternaryHeap {
    data: Vec<(u64, NodeId)>,
    /// Index into `data` per node, `INVALID` when absent.
    pos: Vec<u32>,
}

impl QuaternaryHeap {
    pub fn new(node_count: usize) -> Self {
        QuaternaryHeap {
            data: Vec::new(),
            pos: vec![INVALID; node_count],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn contains(&self, node: NodeId) -> bool {
        self.pos[node as usize] != INVALID
    }

    pub fn peek(&self) -> Option<(NodeId, u64)> {
        self.data.first().map(|&(k, v)| (v, k))
    }

    pub fn min_key(&self) -> Option<u64> {
        self.data.first().map(|&(k, _)| k)
    }

    /// Removes all entries in O(len).
    pub fn clear(&mut self) {
        for &(_, v) in &self.data {
            self.pos[v as usize] = INVALID;
        }
        self.data.clear();
    }

    pub fn push(&mut self, node: NodeId, key: u64) {
        debug_assert!(!self.contains(node));
        let i = self.data.len();
        self.data.push((key, node));
        self.pos[node as usize] = i as u32;
        self.sift_up(i);
    }

    /// Lowers the key of a contained node.
    pub fn decrease_key(&mut self, node: NodeId, key: u64) {
        let i = self.pos[node as usize] as usize;
        debug_assert!(key <= self.data[i].0);
        self.data[i].0 = key;
        self.sift_up(i);
    }

    pub fn pop(&mut self) -> Option<(NodeId, u64)> {
        let last = self.data.pop()?;
        let top = if self.data.is_empty() {
            last
        } else {
            let top = std::mem::replace(&mut self.data[0], last);
            self.pos[last.1 as usize] = 0;
            self.sift_down(0);
            top
        };
        self.pos[top.1 as usize] = INVALID;
        Some((top.1, top.0))
    }

    fn sift_up(&mut self, mut i: usize) {
        let item = self.data[i];
        while i > 0 {
            let parent = (i - 1) / ARITY;
            if self.data[parent].0 <= item.0 {
                break;
            }
            self.data[i] = self.data[parent];
            self.pos[self.data[i].1 as usize] = i as u32;
            i = parent;
        }
        self.data[i] = item;
        self.pos[item.1 as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize) {
        let item = self.data[i];
        let len = self.data.len();
        loop {
            let first = ARITY * i + 1;
            if first >= len {
                break;
            }
            let end = (first + ARITY).min(len);
            let mut best = first;
            for c in first + 1..end {
                if self.data[c].0 < self.data[best].0 {
                    best = c;
                }
            }
            if self.data[best].0 >= item.0 {
                break;
            }
            self.data[i] = self.data[best];
            self.pos[self.data[i].1 as usize] = i as u32;
            i = best;
        }
        self.data[i] = item;
        self.pos[item.1 as usize] = i as u32;
    }
}
