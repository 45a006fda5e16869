//! Running one workload on several engines.

use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};

use topocore::graph::apply_permutation;
use topocore::io::{Query, Workload};
use topocore::{
    BidirectionalQuery, BilevelQuery, CorePrep, Dijkstra, Distance, Graph, NodeOrder, Strategy,
};

use crate::report::{BenchReport, ReportRow};

/// Engine selector as written on the command line: `uni[@order]`,
/// `bi-<strategy>[@order]` or `core-<strategy>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineSpec {
    Uni(NodeOrder),
    Bi(Strategy, NodeOrder),
    Core(Strategy),
}

impl EngineSpec {
    pub const BASELINE: EngineSpec = EngineSpec::Uni(NodeOrder::Input);
}

impl FromStr for EngineSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, order) = match s.split_once('@') {
            Some((n, o)) => (n, Some(o.parse::<NodeOrder>()?)),
            None => (s, None),
        };
        let order_or_input = order.unwrap_or(NodeOrder::Input);
        if name == "uni" {
            return Ok(EngineSpec::Uni(order_or_input));
        }
        if let Some(st) = name.strip_prefix("bi-") {
            return Ok(EngineSpec::Bi(st.parse()?, order_or_input));
        }
        if let Some(st) = name.strip_prefix("core-") {
            if order.is_some() {
                return Err(format!("`{s}`: core engines use the order of the preparation"));
            }
            return Ok(EngineSpec::Core(st.parse()?));
        }
        Err(format!("unknown engine `{s}` (uni, bi-alt, bi-mk, bi-mq, core-alt, core-mk, core-mq)"))
    }
}

/// Distances and work of one engine over the whole workload.
struct Run {
    row: ReportRow,
    distances: Vec<Distance>,
    total: Duration,
}

/// Everything a core engine needs besides the strategy.
pub struct CoreInput<'a> {
    pub prep: &'a CorePrep,
    /// Order column in the report.
    pub order: String,
}

/// Runs `engines` on `workload` (ids of `graph`), checks that all of them
/// agree on every distance and returns the report. The input-order
/// unidirectional baseline is always run and listed first.
pub fn run_bench(
    graph: &Graph,
    core: Option<&CoreInput<'_>>,
    engines: &[EngineSpec],
    workload: &Workload,
    seed: u64,
    threads: usize,
) -> anyhow::Result<BenchReport> {
    if workload.is_empty() {
        return Ok(BenchReport::default());
    }
    let mut list = vec![EngineSpec::BASELINE];
    list.extend(engines.iter().copied().filter(|&e| e != EngineSpec::BASELINE));

    let mut runs: Vec<Run> = Vec::new();
    for &e in &list {
        let run = match e {
            EngineSpec::Uni(order) | EngineSpec::Bi(_, order) => {
                let perm = order.permutation(graph, seed);
                let g = apply_permutation(graph, &perm)?;
                let w = workload.relabel(&perm);
                let (engine, strategy) = match e {
                    EngineSpec::Bi(s, _) => ("bi", Some(s)),
                    _ => ("uni", None),
                };
                let f = |q: &[Query]| run_plain(&g, strategy, q);
                timed(engine, order.name(), strategy, &w, threads, f)?
            }
            EngineSpec::Core(strategy) => {
                let Some(c) = core else {
                    bail!("core engines need a preparation");
                };
                let prep = c.prep;
                let w = workload.relabel(prep.perm());
                let f = |q: &[Query]| run_core(prep, strategy, q);
                timed(prep.variant().name(), &c.order, Some(strategy), &w, threads, f)?
            }
        };
        runs.push(run);
    }

    // correctness gate
    let base = &runs[0];
    for r in &runs[1..] {
        for (i, (a, b)) in base.distances.iter().zip(&r.distances).enumerate() {
            if a != b {
                let q = &workload.queries[i];
                bail!(
                    "distance mismatch on query {i} ({} -> {}, weights {:?}): {} {} says {a}, {} {} {} says {b}",
                    q.source,
                    q.target,
                    q.objective.add_weights,
                    base.row.engine,
                    base.row.order,
                    r.row.engine,
                    r.row.strategy,
                    r.row.order
                );
            }
        }
    }

    let base_time = base.total.as_secs_f64();
    let rows = runs
        .into_iter()
        .map(|r| {
            let t = r.total.as_secs_f64();
            let mut row = r.row;
            row.speedup = if t > 0.0 { base_time / t } else { 1.0 };
            row
        })
        .collect();
    Ok(BenchReport { rows })
}

type Outcome = Vec<(Distance, u64, Duration)>;

fn run_plain(g: &Graph, strategy: Option<Strategy>, qs: &[Query]) -> anyhow::Result<Outcome> {
    let spec = g.spec();
    let mut out = Vec::with_capacity(qs.len());
    match strategy {
        None => {
            let mut d = Dijkstra::new(g);
            for q in qs {
                let ev = q.objective.evaluator(spec)?;
                let t = Instant::now();
                let r = d.query(q.source, q.target, &ev, false)?;
                out.push((r.distance, r.stats.pops(), t.elapsed()));
            }
        }
        Some(s) => {
            let mut b = BidirectionalQuery::new(g, s);
            for q in qs {
                let ev = q.objective.evaluator(spec)?;
                let t = Instant::now();
                let r = b.query(q.source, q.target, &ev, false)?;
                out.push((r.distance, r.stats.pops(), t.elapsed()));
            }
        }
    }
    Ok(out)
}

fn run_core(prep: &CorePrep, strategy: Strategy, qs: &[Query]) -> anyhow::Result<Outcome> {
    let mut b = BilevelQuery::new(prep, strategy);
    let mut out = Vec::with_capacity(qs.len());
    for q in qs {
        let ev = q.objective.evaluator(prep.spec())?;
        let t = Instant::now();
        let r = b.query(q.source, q.target, &ev, false)?;
        out.push((r.distance, r.stats.pops(), t.elapsed()));
    }
    Ok(out)
}

/// Splits the workload into `threads` contiguous chunks, each with its own
/// engine state.
fn timed<F>(
    engine: &str,
    order: &str,
    strategy: Option<Strategy>,
    w: &Workload,
    threads: usize,
    f: F,
) -> anyhow::Result<Run>
where
    F: Fn(&[Query]) -> anyhow::Result<Outcome> + Sync,
{
    let threads = threads.max(1);
    let chunk = w.queries.len().div_ceil(threads);
    let parts: Vec<anyhow::Result<Outcome>> = if threads == 1 {
        vec![f(&w.queries)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = w.queries.chunks(chunk).map(|c| scope.spawn(|| f(c))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut distances = Vec::with_capacity(w.len());
    let mut pops = 0u64;
    let mut total = Duration::ZERO;
    for p in parts {
        for (d, p, t) in p.with_context(|| format!("engine {engine}"))? {
            distances.push(d);
            pops += p;
            total += t;
        }
    }
    let n = w.len();
    Ok(Run {
        row: ReportRow {
            engine: engine.to_string(),
            order: order.to_string(),
            strategy: strategy.map_or("-".to_string(), |s| s.name().to_string()),
            queries: n,
            mean_ms: total.as_secs_f64() * 1000.0 / n as f64,
            mean_pops: pops as f64 / n as f64,
            speedup: 1.0,
        },
        distances,
        total,
    })
}
