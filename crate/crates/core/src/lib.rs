//! Exact shortest paths with per-query objectives on road networks.
//!
//! Arcs carry cost vectors with `k` components. Each component combines
//! along a path by addition, minimum or bitwise and ([`CombineSpec`]). A query
//! supplies an [`Objective`] that maps a cost vector to a scalar or infinity.
//!
//! Preprocessing only looks at topology: it keeps the largest biconnected
//! component, bypasses degree-2 chains and optionally contracts an
//! independent set of degree-3 nodes ([`topocore`]). Queries then run a
//! bidirectional search that stays inside the resulting core once it gets
//! there ([`BilevelQuery`]).
//!
//! ```
//! use topocore::{cost::CostVector, CombineSpec, Graph, Objective, Variant};
//!
//! let arcs = [(0, 1, 4), (1, 0, 4), (1, 2, 3), (2, 1, 3), (2, 0, 9), (0, 2, 9)];
//! let graph = Graph::from_arcs(
//!     3,
//!     CombineSpec::additive(1),
//!     arcs.iter().map(|&(u, v, c)| (u, v, CostVector(vec![c]))),
//! )
//! .unwrap();
//! let out = topocore::run_pipeline(&graph, Variant::TopoCoreIs);
//! let prep = &out.prep;
//! let obj = Objective::linear(graph.spec(), vec![1]);
//! let r = topocore::bilevel_query(prep, prep.search_id(0), prep.search_id(2), &obj).unwrap();
//! assert_eq!(r.distance.finite(), Some(7));
//! ```

pub mod cost;
pub mod graph;
pub mod heap;
pub mod io;
pub mod query;
pub mod synth;
pub mod topocore;

pub use cost::{CombineOp, CombineSpec, CostVector, Distance, Evaluator, Objective};
pub use graph::{Graph, NodeId, NodeOrder, Permutation};
pub use query::{
    bilevel_query, dijkstra_bi, dijkstra_uni, BidirectionalQuery, BilevelQuery, Dijkstra,
    QueryError, QueryResult, SearchStats, Strategy,
};
pub use topocore::{prepare, run_pipeline, CorePrep, Variant};
