//! DIMACS shortest-path challenge files: `.gr` arc lists and `.co`
//! coordinates.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{parse_error, IoError};
use crate::cost::{CombineSpec, MAX_ADD_COMPONENT};
use crate::graph::{build_indexed, Coord, Graph, NodeId};

fn numbers<const N: usize>(line: usize, fields: &[&str]) -> Result<[u64; N], IoError> {
    if fields.len() != N {
        return parse_error(line, format!("expected {N} numbers, found {}", fields.len()));
    }
    let mut out = [0u64; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = match f.parse() {
            Ok(v) => v,
            Err(_) => return parse_error(line, format!("`{f}` is not a non-negative integer")),
        };
    }
    Ok(out)
}

fn node_id(line: usize, raw: u64, n: usize) -> Result<NodeId, IoError> {
    if raw == 0 || raw as usize > n {
        return parse_error(line, format!("node {raw} outside 1..={n}"));
    }
    Ok((raw - 1) as NodeId)
}

/// Parses a `.gr` stream and an optional `.co` stream into a graph with one
/// additive cost component (the arc weight). Arcs are stored sorted by tail;
/// arcs sharing a tail keep their file order.
pub fn parse_dimacs<G: BufRead, C: BufRead>(gr: G, co: Option<C>) -> Result<Graph, IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut tails = Vec::new();
    let mut heads = Vec::new();
    let mut weights = Vec::new();
    let mut last_line = 0;
    for (i, line) in gr.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return parse_error(lineno, "second problem line");
                }
                if fields.get(1) != Some(&"sp") {
                    return parse_error(lineno, "expected `p sp <n> <m>`");
                }
                let [n, m] = numbers::<2>(lineno, &fields[2..])?;
                if n >= u32::MAX as u64 || m >= u32::MAX as u64 {
                    return parse_error(lineno, "graph too large for 32-bit ids");
                }
                header = Some((n as usize, m as usize));
                tails.reserve(m as usize);
                heads.reserve(m as usize);
                weights.reserve(m as usize);
            }
            Some("a") => {
                let Some((n, m)) = header else {
                    return parse_error(lineno, "arc before problem line");
                };
                let [u, v, w] = numbers::<3>(lineno, &fields[1..])?;
                if tails.len() == m {
                    return parse_error(lineno, format!("more than {m} arcs"));
                }
                tails.push(node_id(lineno, u, n)?);
                heads.push(node_id(lineno, v, n)?);
                if w > MAX_ADD_COMPONENT as u64 {
                    return parse_error(lineno, format!("weight {w} exceeds {MAX_ADD_COMPONENT}"));
                }
                weights.push(w as u32);
            }
            Some(other) => return parse_error(lineno, format!("unknown line type `{other}`")),
        }
    }
    let Some((n, m)) = header else {
        return parse_error(last_line + 1, "missing problem line");
    };
    if tails.len() != m {
        return parse_error(
            last_line + 1,
            format!("end of file after {} arcs, header announced {m}", tails.len()),
        );
    }
    let (mut graph, _) = build_indexed(n, CombineSpec::additive(1), &tails, &heads, &weights)?;
    if let Some(co) = co {
        graph.set_coords(Some(parse_coords(co, n)?))?;
    }
    Ok(graph)
}

/// `v <id> <x> <y>` lines with x = longitude and y = latitude in millionths
/// of a degree. Every node needs exactly one line.
fn parse_coords<C: BufRead>(co: C, n: usize) -> Result<Vec<Coord>, IoError> {
    let mut coords = vec![None; n];
    let mut last_line = 0;
    for (i, line) in co.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.first().copied() {
            None | Some("c") | Some("p") => {}
            Some("v") => {
                if fields.len() != 4 {
                    return parse_error(lineno, "expected `v <id> <x> <y>`");
                }
                let [id] = numbers::<1>(lineno, &fields[1..2])?;
                let v = node_id(lineno, id, n)?;
                let mut xy = [0i64; 2];
                for (o, f) in xy.iter_mut().zip(&fields[2..]) {
                    *o = match f.parse() {
                        Ok(x) => x,
                        Err(_) => return parse_error(lineno, format!("`{f}` is not an integer")),
                    };
                }
                if coords[v as usize].is_some() {
                    return parse_error(lineno, format!("node {id} listed twice"));
                }
                coords[v as usize] = Some(Coord {
                    lat: xy[1] as f64 / 1e6,
                    lon: xy[0] as f64 / 1e6,
                });
            }
            Some(other) => return parse_error(lineno, format!("unknown line type `{other}`")),
        }
    }
    coords
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            c.ok_or_else(|| IoError::Parse {
                line: last_line + 1,
                msg: format!("no coordinates for node {}", v + 1),
            })
        })
        .collect()
}

/// Reads a `.gr` file and an optional `.co` file.
pub fn read_dimacs(gr: &Path, co: Option<&Path>) -> Result<Graph, IoError> {
    let g = BufReader::new(File::open(gr)?);
    match co {
        Some(p) => parse_dimacs(g, Some(BufReader::new(File::open(p)?))),
        None => parse_dimacs(g, None::<BufReader<File>>),
    }
}

/// Writes arcs in adjacency order with cost component `component` as the
/// weight.
pub fn write_dimacs<W: Write>(graph: &Graph, component: usize, mut w: W) -> Result<(), IoError> {
    assert!(component < graph.k(), "cost component out of range");
    writeln!(w, "p sp {} {}", graph.node_count(), graph.arc_count())?;
    for (u, v, a) in graph.arcs() {
        writeln!(w, "a {} {} {}", u + 1, v + 1, graph.cost(a as usize)[component])?;
    }
    Ok(())
}

/// Writes the coordinates, rounded to millionths of a degree.
pub fn write_dimacs_coords<W: Write>(graph: &Graph, mut w: W) -> Result<(), IoError> {
    let Some(coords) = graph.coords() else {
        return Err(IoError::Format("graph has no coordinates".into()));
    };
    writeln!(w, "p aux sp co {}", graph.node_count())?;
    for (v, c) in coords.iter().enumerate() {
        let x = (c.lon * 1e6).round() as i64;
        let y = (c.lat * 1e6).round() as i64;
        writeln!(w, "v {} {x} {y}", v + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(gr: &str) -> Result<Graph, IoError> {
        parse_dimacs(gr.as_bytes(), None::<&[u8]>)
    }

    fn line_of(e: IoError) -> usize {
        match e {
            IoError::Parse { line, .. } => line,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn minimal_file() {
        let g = parse("c demo\np sp 2 1\na 1 2 5\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.heads(), &[1]);
        assert_eq!(g.cost(0), &[5]);
    }

    #[test]
    fn missing_arc_reported_at_eof() {
        assert_eq!(line_of(parse("p sp 2 2\na 1 2 5\n").unwrap_err()), 3);
    }

    #[test]
    fn endpoint_out_of_range() {
        assert_eq!(line_of(parse("p sp 2 1\na 1 3 5\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("p sp 2 1\na 0 1 5\n").unwrap_err()), 2);
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(line_of(parse("a 1 2 3\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("p sp 2 1\na 1 x 3\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("p sp 2 1\na 1 2 -3\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("p sp 2 1\nq\n").unwrap_err()), 2);
    }

    #[test]
    fn coordinates() {
        let co = "p aux sp co 2\nv 1 8400000 49000000\nv 2 -1500 0\n";
        let g = parse_dimacs("p sp 2 0\n".as_bytes(), Some(co.as_bytes())).unwrap();
        let c = g.coords().unwrap();
        assert_eq!(c[0], Coord { lat: 49.0, lon: 8.4 });
        assert_eq!(c[1].lon, -0.0015);
        let missing = parse_dimacs("p sp 2 0\n".as_bytes(), Some("v 1 0 0\n".as_bytes()));
        assert!(missing.is_err());
    }

    #[test]
    fn round_trip() {
        let src = "p sp 3 3\na 1 2 5\na 2 3 7\na 3 1 9\n";
        let g = parse(src).unwrap();
        let mut out = Vec::new();
        write_dimacs(&g, 0, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), src);
    }
}
