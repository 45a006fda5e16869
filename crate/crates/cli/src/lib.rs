//! Command-line front end: degree statistics, preprocessing, single
//! queries, benchmarks and synthetic inputs.
//!
//! Node ids on the command line and in printed paths are the 1-based ids
//! of the DIMACS file.

pub mod bench;
pub mod input;
pub mod report;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use topocore::graph::degree_histogram;
use topocore::io::{
    load_prep, memory_estimate, save_prep, synthesize_costs, write_costs_binary, write_costs_text,
    write_dimacs, write_dimacs_coords, CostMode, CostTable, IoError, Workload,
};
use topocore::synth::{road_grid, RoadGridConfig};
use topocore::{prepare, BilevelQuery, CombineOp, NodeId, NodeOrder, Objective, Strategy, Variant};

use bench::{run_bench, CoreInput, EngineSpec};
use input::GraphArgs;

pub const SEED_ENV: &str = "TOPOCORE_SEED";

#[derive(Parser, Debug)]
#[command(name = "topocore", version, about = "Exact personalized shortest paths on road networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Node and arc counts and the degree histogram of a graph
    Stats {
        /// DIMACS `.gr` file
        graph: PathBuf,
    },
    /// Compute a core and write it as a TOPO1 file
    Preprocess(PreprocessArgs),
    /// Answer one query on a TOPO1 file
    Query(QueryArgs),
    /// Run a random workload on several engines
    Bench(BenchArgs),
    /// Synthesize a cost file from travel times and coordinates
    Costs(CostsArgs),
    /// Write a synthetic road-like network as `.gr` and `.co`
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub input: GraphArgs,
    #[arg(long, default_value = "topocore-is")]
    pub variant: Variant,
    #[arg(long, default_value = "dfs")]
    pub order: NodeOrder,
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    /// Output TOPO1 file
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    /// TOPO1 file
    pub prep: PathBuf,
    #[arg(long)]
    pub source: u32,
    #[arg(long)]
    pub target: u32,
    /// One weight per additive component
    #[arg(long, value_delimiter = ',', required = true)]
    pub weights: Vec<u32>,
    /// One vehicle value per threshold component
    #[arg(long, value_delimiter = ',')]
    pub vehicle: Vec<u32>,
    /// One required bit mask per bitfield component
    #[arg(long, value_delimiter = ',')]
    pub bits: Vec<u32>,
    #[arg(long, default_value = "mq")]
    pub strategy: Strategy,
    /// Also print the node sequence
    #[arg(long)]
    pub path: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: GraphArgs,
    /// TOPO1 file of the same graph; computed in memory when missing
    #[arg(long)]
    pub prep: Option<PathBuf>,
    /// Variant for an in-memory preparation
    #[arg(long, default_value = "topocore-is", conflicts_with = "prep")]
    pub variant: Variant,
    /// Node order for an in-memory preparation
    #[arg(long, default_value = "dfs", conflicts_with = "prep")]
    pub order: NodeOrder,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated engines: uni[@order], bi-<alt|mk|mq>[@order], core-<alt|mk|mq>
    #[arg(long, value_delimiter = ',', default_value = "uni,bi-mq,core-mq")]
    pub engines: Vec<EngineSpec>,
    /// Worker threads; queries are split between them
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Print tab-separated rows instead of the table
    #[arg(long)]
    pub tsv: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CostFormat {
    Text,
    Binary,
}

#[derive(Args, Debug)]
pub struct CostsArgs {
    /// DIMACS `.gr` file
    pub graph: PathBuf,
    /// DIMACS `.co` file
    #[arg(long)]
    pub coords: PathBuf,
    #[arg(long, default_value = "basic")]
    pub mode: CostMode,
    #[arg(long)]
    pub pad_costs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: CostFormat,
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 30)]
    pub rows: usize,
    #[arg(long, default_value_t = 30)]
    pub cols: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    /// Writes `<prefix>.gr` and `<prefix>.co`
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Usage errors exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.into())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Domain(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Domain(e) => write!(f, "{e:#}"),
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Stats { graph } => stats(&graph, out),
        Command::Preprocess(a) => preprocess(&a, out),
        Command::Query(a) => query(&a, out),
        Command::Bench(a) => bench(&a, out),
        Command::Costs(a) => costs(&a, out),
        Command::Generate(a) => generate(&a, out),
    }
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn stats(path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let g = topocore::io::read_dimacs(path, None)
        .with_context(|| format!("reading {}", path.display()))?;
    let h = degree_histogram(&g);
    writeln!(out, "nodes {}", g.node_count())?;
    writeln!(out, "arcs {}", g.arc_count())?;
    for d in 0..6 {
        let label = if d == 5 { "5+".to_string() } else { d.to_string() };
        writeln!(out, "degree {label:<2} {:>6} {:>5.1}%", h.buckets[d], h.percent(d))?;
    }
    Ok(())
}

fn preprocess(a: &PreprocessArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = a.input.load(a.seed)?;
    let g = &loaded.graph;
    let result = prepare(g, a.order, a.seed, a.variant);
    let mut prep = result.prep;
    prep.set_source_ids(loaded.file_ids.clone()).context("attaching file ids")?;
    save_prep(&prep, &a.output).with_context(|| format!("writing {}", a.output.display()))?;

    let s = &result.stats;
    let n = g.node_count();
    let m = g.arc_count();
    writeln!(out, "read        nodes {:>9}        arcs {:>9}", loaded.read_nodes, loaded.read_arcs)?;
    writeln!(out, "input       nodes {n:>9} {:>5.1}%  arcs {m:>9}", pct(n, loaded.read_nodes))?;
    writeln!(
        out,
        "bcc         nodes {:>9} {:>5.1}%  arcs {:>9}",
        s.bcc_nodes,
        pct(s.bcc_nodes, n),
        s.bcc_arcs
    )?;
    writeln!(
        out,
        "topocore    nodes {:>9} {:>5.1}%  arcs {:>9}  degree-3 {}",
        s.topocore_nodes,
        pct(s.topocore_nodes, n),
        s.topocore_arcs,
        s.topocore_degree3
    )?;
    writeln!(
        out,
        "chains      {} removed, {:.2} arcs per chain, {} shortcuts",
        s.chains.chains,
        s.chains.average_arcs(),
        s.chains.shortcuts
    )?;
    if let (Some(is_nodes), Some(is_arcs), Some(d3)) = (s.is_nodes, s.is_arcs, s.is_degree3) {
        writeln!(
            out,
            "topocore-is nodes {is_nodes:>9} {:>5.1}%  arcs {is_arcs:>9}  degree-3 {d3}",
            pct(is_nodes, n)
        )?;
    }
    writeln!(out, "shortcuts   {}", prep.shortcuts().len())?;
    let k = g.k() as u64;
    writeln!(
        out,
        "memory      graph {} bytes, core {} bytes",
        memory_estimate(n as u64, m as u64, k),
        prep.core_memory_bytes()
    )?;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1000.0;
    writeln!(
        out,
        "time        bcc {:.1} ms, chains {:.1} ms, contraction {:.1} ms, search graphs {:.1} ms",
        ms(s.bcc_time),
        ms(s.chain_time),
        ms(s.contract_time),
        ms(s.search_graph_time)
    )?;
    Ok(())
}

fn query(a: &QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let prep = load_prep(&a.prep).with_context(|| format!("reading {}", a.prep.display()))?;
    let spec = prep.spec();
    let shape = [
        ("--weights", a.weights.len(), spec.count(CombineOp::Add)),
        ("--vehicle", a.vehicle.len(), spec.count(CombineOp::Min)),
        ("--bits", a.bits.len(), spec.count(CombineOp::BitAnd)),
    ];
    for (flag, got, want) in shape {
        if got != want {
            return Err(CliError::Usage(format!(
                "{flag} has {got} values, the cost vectors need {want} (roles {})",
                spec.role_list()
            )));
        }
    }
    let obj = Objective::new(a.weights.clone(), a.vehicle.clone(), a.bits.clone());
    let ev = obj.evaluator(spec).map_err(|e| CliError::Usage(e.to_string()))?;

    // file id (0-based) -> pipeline input id
    let n = prep.node_count();
    let ids: Vec<NodeId> = if prep.source_ids().is_empty() {
        (0..n as NodeId).collect()
    } else {
        prep.source_ids().to_vec()
    };
    let index: HashMap<NodeId, NodeId> = ids.iter().enumerate().map(|(i, &f)| (f, i as NodeId)).collect();
    let lookup = |dimacs: u32| -> Result<NodeId, CliError> {
        dimacs
            .checked_sub(1)
            .and_then(|f| index.get(&f).copied())
            .ok_or_else(|| CliError::Domain(anyhow::anyhow!("node {dimacs} is not part of the preprocessed graph")))
    };
    let s = prep.search_id(lookup(a.source)?);
    let t = prep.search_id(lookup(a.target)?);
    let r = BilevelQuery::new(&prep, a.strategy)
        .query(s, t, &ev, a.path)
        .context("query failed")?;
    writeln!(out, "{}", r.distance)?;
    if a.path && r.distance.is_finite() {
        let back = prep.perm().inverse();
        let file_id = |search: NodeId| ids[back.new_id(search) as usize] + 1;
        let mut nodes = vec![file_id(s)];
        for &arc in &r.path {
            let (_, head) = prep.endpoints(arc).context("path arc out of range")?;
            nodes.push(file_id(head));
        }
        let text: Vec<String> = nodes.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", text.join(" "))?;
    }
    Ok(())
}

fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = a.input.load(a.seed)?;
    let g = &loaded.graph;
    let needs_core = a.engines.iter().any(|e| matches!(e, EngineSpec::Core(_)));
    let prep = match (&a.prep, needs_core) {
        (_, false) => None,
        (Some(path), true) => {
            let p = load_prep(path).with_context(|| format!("reading {}", path.display()))?;
            let same_ids = p.source_ids().is_empty() || p.source_ids() == loaded.file_ids.as_slice();
            if p.node_count() != g.node_count()
                || p.input_arc_count() != g.arc_count()
                || p.spec() != g.spec()
                || !same_ids
            {
                return Err(CliError::Domain(anyhow::anyhow!(
                    "{} was not computed from this graph and cost file",
                    path.display()
                )));
            }
            Some((p, "prep".to_string()))
        }
        (None, true) => Some((prepare(g, a.order, a.seed, a.variant).prep, a.order.name().to_string())),
    };
    let core = prep.as_ref().map(|(p, order)| CoreInput {
        prep: p,
        order: order.clone(),
    });
    let workload = Workload::generate(g.node_count(), a.queries, g.spec(), a.seed);
    let report = run_bench(g, core.as_ref(), &a.engines, &workload, a.seed, a.threads)?;
    if a.tsv {
        write!(out, "{}", report.to_tsv())?;
    } else {
        write!(out, "{}", report.to_table())?;
    }
    Ok(())
}

fn costs(a: &CostsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = topocore::io::read_dimacs(&a.graph, Some(&a.coords))
        .with_context(|| format!("reading {}", a.graph.display()))?;
    let mut table: CostTable = synthesize_costs(&g, a.mode, a.seed)?;
    if let Some(k) = a.pad_costs {
        table = table.pad(k, a.seed);
    }
    let file = BufWriter::new(File::create(&a.output)?);
    match a.format {
        CostFormat::Text => write_costs_text(&table, file)?,
        CostFormat::Binary => write_costs_binary(&table, file)?,
    }
    writeln!(out, "{} rows, {} components ({})", table.len(), table.spec().k(), table.spec().role_list())?;
    Ok(())
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.rows == 0 || a.cols == 0 {
        return Err(CliError::Usage("--rows and --cols must be positive".into()));
    }
    let grid = road_grid(&RoadGridConfig::new(a.rows, a.cols), a.seed);
    let g = &grid.graph;
    let gr = a.output.with_extension("gr");
    let co = a.output.with_extension("co");
    write_dimacs(g, 0, BufWriter::new(File::create(&gr)?))?;
    write_dimacs_coords(g, BufWriter::new(File::create(&co)?))?;
    writeln!(
        out,
        "{} nodes ({} intersections), {} arcs -> {}, {}",
        g.node_count(),
        grid.intersections,
        g.arc_count(),
        gr.display(),
        co.display()
    )?;
    Ok(())
}
