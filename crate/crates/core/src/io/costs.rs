//! Cost tables: synthesis from travel times and coordinates, text and
//! binary cost files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{parse_error, IoError};
use crate::cost::{CombineOp, CombineSpec, INF_THRESHOLD, MAX_ADD_COMPONENT};
use crate::graph::{Coord, Graph};

const BINARY_MAGIC: &[u8; 8] = b"TOPOCST1";

/// Mean earth radius used for segment lengths.
const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// One cost vector per arc, in arc order of the associated graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    spec: CombineSpec,
    rows: Vec<u32>,
}

impl CostTable {
    pub fn new(spec: CombineSpec, rows: Vec<u32>) -> Result<Self, IoError> {
        if !rows.len().is_multiple_of(spec.k()) {
            return Err(IoError::Format(format!(
                "{} values do not form rows of {}",
                rows.len(),
                spec.k()
            )));
        }
        Ok(CostTable { spec, rows })
    }

    /// The table of a graph's own costs.
    pub fn of_graph(graph: &Graph) -> Self {
        CostTable {
            spec: graph.spec().clone(),
            rows: graph.costs_flat().to_vec(),
        }
    }

    pub fn spec(&self) -> &CombineSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.spec.k()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, arc: usize) -> &[u32] {
        let k = self.spec.k();
        &self.rows[arc * k..(arc + 1) * k]
    }

    pub fn flat(&self) -> &[u32] {
        &self.rows
    }

    /// Replaces the costs of `graph` by this table.
    pub fn attach(self, graph: Graph) -> Result<Graph, IoError> {
        if self.len() != graph.arc_count() {
            return Err(IoError::Format(format!(
                "cost table has {} rows, graph has {} arcs",
                self.len(),
                graph.arc_count()
            )));
        }
        Ok(graph.with_costs(self.spec, self.rows)?)
    }

    /// Appends additive components with uniform values in `0..=100` until
    /// the table has `k` components.
    pub fn pad(&self, k: usize, seed: u64) -> CostTable {
        let old = self.spec.k();
        if k <= old {
            return self.clone();
        }
        let mut ops = self.spec.ops().to_vec();
        ops.resize(k, CombineOp::Add);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(self.len() * k);
        for a in 0..self.len() {
            rows.extend_from_slice(self.row(a));
            for _ in old..k {
                rows.push(rng.gen_range(0..=100));
            }
        }
        CostTable {
            spec: CombineSpec::new(ops).expect("non-empty"),
            rows,
        }
    }
}

/// Which synthetic cost vectors to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostMode {
    /// Eight additive components.
    Basic,
    /// Four additive components and four thresholds.
    Generalized,
}

impl CostMode {
    pub fn name(self) -> &'static str {
        match self {
            CostMode::Basic => "basic",
            CostMode::Generalized => "generalized",
        }
    }

    pub fn spec(self) -> CombineSpec {
        match self {
            CostMode::Basic => CombineSpec::basic(),
            CostMode::Generalized => CombineSpec::generalized(),
        }
    }
}

impl std::fmt::Display for CostMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CostMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "basic" => Ok(CostMode::Basic),
            "generalized" => Ok(CostMode::Generalized),
            other => Err(format!("unknown cost mode `{other}` (basic, generalized)")),
        }
    }
}

/// Great-circle distance in meters, rounded half up.
pub fn haversine_meters(a: Coord, b: Coord) -> u64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dp = p2 - p1;
    let dl = (b.lon - a.lon).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    let d = 2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin();
    (d + 0.5).floor() as u64
}

fn clamp_add(v: u64) -> u32 {
    v.min(MAX_ADD_COMPONENT as u64) as u32
}

/// Builds eight cost components per arc from the travel time `t` (cost
/// component 0 of `graph`) and the segment length `d` from coordinates.
///
/// Basic: `t, d, 100t/d, 100d/t, 100/d, 100/t, 1` and a random value in
/// `0..=100`. Generalized: `t, d, 100t/d, 100d/t` and four thresholds, each
/// finite (uniform in `0..=100`) with probability 1/1000 and infinite
/// otherwise. Divisions floor, denominators are clamped to at least 1.
pub fn synthesize_costs(graph: &Graph, mode: CostMode, seed: u64) -> Result<CostTable, IoError> {
    let Some(coords) = graph.coords() else {
        return Err(IoError::Format(
            "cost synthesis needs node coordinates".into(),
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(graph.arc_count() * 8);
    for (u, v, a) in graph.arcs() {
        let t = graph.cost(a as usize)[0] as u64;
        let d = haversine_meters(coords[u as usize], coords[v as usize]);
        let (tc, dc) = (t.max(1), d.max(1));
        rows.extend([
            clamp_add(t),
            clamp_add(d),
            clamp_add(100 * t / dc),
            clamp_add(100 * d / tc),
        ]);
        match mode {
            CostMode::Basic => rows.extend([
                clamp_add(100 / dc),
                clamp_add(100 / tc),
                1,
                rng.gen_range(0..=100),
            ]),
            CostMode::Generalized => {
                for _ in 0..4 {
                    rows.push(if rng.gen_range(0..1000) == 0 {
                        rng.gen_range(0..=100)
                    } else {
                        INF_THRESHOLD
                    });
                }
            }
        }
    }
    CostTable::new(mode.spec(), rows)
}

/// Text form: `costs <k> <m> <role-list>`, then one line of `k` integers
/// per arc.
pub fn write_costs_text<W: Write>(table: &CostTable, w: W) -> Result<(), IoError> {
    let mut w = BufWriter::new(w);
    let k = table.spec.k();
    writeln!(w, "costs {k} {} {}", table.len(), table.spec.role_list())?;
    for a in 0..table.len() {
        let row = table.row(a);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                w.write_all(b" ")?;
            }
            write!(w, "{v}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Binary form, little endian: magic, `k: u32`, `m: u64`, one operator code
/// byte per component, then `m * k` values as `u32`.
pub fn write_costs_binary<W: Write>(table: &CostTable, w: W) -> Result<(), IoError> {
    let mut w = BufWriter::new(w);
    w.write_all(BINARY_MAGIC)?;
    w.write_u32::<LittleEndian>(table.spec.k() as u32)?;
    w.write_u64::<LittleEndian>(table.len() as u64)?;
    for op in table.spec.ops() {
        w.write_u8(op.code())?;
    }
    for &v in &table.rows {
        w.write_u32::<LittleEndian>(v)?;
    }
    w.flush()?;
    Ok(())
}

fn read_binary<R: Read>(mut r: R) -> Result<CostTable, IoError> {
    let truncated = |e: std::io::Error| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            IoError::Format("truncated cost file".into())
        } else {
            IoError::Io(e)
        }
    };
    let k = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let m = r.read_u64::<LittleEndian>().map_err(truncated)?;
    let mut ops = Vec::with_capacity(k.min(1024));
    for _ in 0..k {
        let c = r.read_u8().map_err(truncated)?;
        ops.push(
            CombineOp::from_code(c)
                .ok_or_else(|| IoError::Format(format!("unknown operator code {c}")))?,
        );
    }
    let spec = CombineSpec::new(ops)?;
    let mut rows = Vec::new();
    let total = m
        .checked_mul(k as u64)
        .ok_or_else(|| IoError::Format("cost file too large".into()))?;
    // grow as data arrives so a bogus header cannot force a huge allocation
    let mut buf = [0u8; 4];
    for _ in 0..total {
        r.read_exact(&mut buf).map_err(truncated)?;
        rows.push(u32::from_le_bytes(buf));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(IoError::Format("trailing bytes after cost rows".into()));
    }
    CostTable::new(spec, rows)
}

fn read_text<R: BufRead>(first: String, lines: std::io::Lines<R>) -> Result<CostTable, IoError> {
    let fields: Vec<&str> = first.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "costs" {
        return parse_error(1, "expected `costs <k> <m> <role-list>`");
    }
    let (Ok(k), Ok(m)) = (fields[1].parse::<usize>(), fields[2].parse::<usize>()) else {
        return parse_error(1, "k and m must be integers");
    };
    let spec = CombineSpec::parse_role_list(fields[3]).map_err(|e| IoError::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if spec.k() != k {
        return parse_error(1, format!("role list has {} entries, k is {k}", spec.k()));
    }
    let mut rows = Vec::with_capacity(m.min(1 << 24) * k);
    let mut count = 0;
    let mut lineno = 1;
    for line in lines {
        lineno += 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if count == m {
            return parse_error(lineno, format!("more than {m} rows"));
        }
        let before = rows.len();
        for f in line.split_whitespace() {
            match f.parse::<u32>() {
                Ok(v) => rows.push(v),
                Err(_) => return parse_error(lineno, format!("`{f}` is not a 32-bit value")),
            }
        }
        if rows.len() - before != k {
            return parse_error(lineno, format!("expected {k} values"));
        }
        for (op, &v) in spec.ops().iter().zip(&rows[before..]) {
            if *op == CombineOp::Add && v > MAX_ADD_COMPONENT {
                return parse_error(lineno, format!("additive value {v} exceeds {MAX_ADD_COMPONENT}"));
            }
        }
        count += 1;
    }
    if count != m {
        return parse_error(lineno + 1, format!("end of file after {count} rows, header announced {m}"));
    }
    CostTable::new(spec, rows)
}

/// Reads a text or binary cost file, detected by its first bytes.
pub fn read_costs(path: &Path) -> Result<CostTable, IoError> {
    let mut r = BufReader::new(File::open(path)?);
    let head = r.fill_buf()?;
    if head.starts_with(BINARY_MAGIC) {
        r.consume(BINARY_MAGIC.len());
        return read_binary(r);
    }
    let mut lines = r.lines();
    let first = match lines.next() {
        Some(l) => l?,
        None => return parse_error(1, "empty cost file"),
    };
    read_text(first, lines)
}
