use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CombineOp, CombineSpec, Objective};
use crate::graph::{NodeId, Permutation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub source: NodeId,
    pub target: NodeId,
    pub objective: Objective,
}

/// Random query pairs with random objectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    pub seed: u64,
    pub queries: Vec<Query>,
}

impl Workload {
    /// Draws `count` uniform node pairs and one value in `0..=100` per cost
    /// component. Additive components use the value as weight, thresholds
    /// as vehicle value. A bitfield component requires bit `value % 8` when
    /// the value is at least 50 and nothing otherwise.
    pub fn generate(node_count: usize, count: usize, spec: &CombineSpec, seed: u64) -> Workload {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut queries = Vec::with_capacity(count);
        if node_count > 0 {
            for _ in 0..count {
                let source = rng.gen_range(0..node_count) as NodeId;
                let target = rng.gen_range(0..node_count) as NodeId;
                let mut obj = Objective::default();
                for op in spec.ops() {
                    let v: u32 = rng.gen_range(0..=100);
                    match op {
                        CombineOp::Add => obj.add_weights.push(v),
                        CombineOp::Min => obj.vehicle.push(v),
                        CombineOp::BitAnd => obj.required_bits.push(if v >= 50 { 1 << (v % 8) } else { 0 }),
                    }
                }
                queries.push(Query {
                    source,
                    target,
                    objective: obj,
                });
            }
        }
        Workload { seed, queries }
    }

    /// The same queries on a graph relabeled by `perm`.
    pub fn relabel(&self, perm: &Permutation) -> Workload {
        Workload {
            seed: self.seed,
            queries: self
                .queries
                .iter()
                .map(|q| Query {
                    source: perm.new_id(q.source),
                    target: perm.new_id(q.target),
                    objective: q.objective.clone(),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}
