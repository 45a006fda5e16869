//! Loading a graph with its cost vectors the same way for every command.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;

use topocore::graph::cleanup;
use topocore::io::{read_costs, read_dimacs, synthesize_costs, CostMode, CostTable};
use topocore::{Graph, NodeId};

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// DIMACS `.gr` file
    pub graph: PathBuf,
    /// DIMACS `.co` coordinate file
    #[arg(long)]
    pub coords: Option<PathBuf>,
    /// Cost file (text or binary); rows follow the arc order of the graph
    #[arg(long, conflicts_with = "mode")]
    pub costs: Option<PathBuf>,
    /// Synthesize eight cost components from travel time and coordinates
    #[arg(long)]
    pub mode: Option<CostMode>,
    /// Pad cost vectors with random additive components up to this size
    #[arg(long)]
    pub pad_costs: Option<usize>,
    /// Keep the graph as read: no multi-arc removal, no SCC restriction
    #[arg(long)]
    pub raw: bool,
}

pub struct Loaded {
    pub graph: Graph,
    /// Zero-based file id of every node of `graph`.
    pub file_ids: Vec<NodeId>,
    pub read_nodes: usize,
    pub read_arcs: usize,
}

impl GraphArgs {
    pub fn load(&self, seed: u64) -> anyhow::Result<Loaded> {
        let g = read_dimacs(&self.graph, self.coords.as_deref())
            .with_context(|| format!("reading {}", self.graph.display()))?;
        let (read_nodes, read_arcs) = (g.node_count(), g.arc_count());
        let mut table = match (&self.costs, self.mode) {
            (Some(path), _) => {
                read_costs(path).with_context(|| format!("reading {}", path.display()))?
            }
            (None, Some(mode)) => synthesize_costs(&g, mode, seed)?,
            (None, None) => CostTable::of_graph(&g),
        };
        if table.len() != g.arc_count() {
            bail!("cost file has {} rows, graph has {} arcs", table.len(), g.arc_count());
        }
        if let Some(k) = self.pad_costs {
            if k < table.spec().k() {
                bail!("--pad-costs {k} is smaller than the {} existing components", table.spec().k());
            }
            table = table.pad(k, seed);
        }
        let g = table.attach(g)?;
        let (graph, file_ids) = if self.raw {
            let ids = (0..g.node_count() as NodeId).collect();
            (g, ids)
        } else {
            let c = cleanup(&g);
            (c.graph, c.original_ids)
        };
        Ok(Loaded {
            graph,
            file_ids,
            read_nodes,
            read_arcs,
        })
    }
}
