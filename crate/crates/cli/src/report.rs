//! Benchmark report: one row per engine.
//!
//! The machine-readable form is tab-separated with a `#`-prefixed header.
//! Floats are written in shortest round-trip form, so [`BenchReport::from_tsv`]
//! reads back exactly what [`BenchReport::to_tsv`] wrote.

use std::fmt::Write as _;

use anyhow::{bail, Context};

pub const TSV_HEADER: &str = "#engine\torder\tstrategy\tqueries\tmean_ms\tmean_pops\tspeedup";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// `uni`, `bi`, `topocore` or `topocore-is`.
    pub engine: String,
    /// Node order of the searched graph, `prep` for a loaded prep file.
    pub order: String,
    /// Alternation strategy, `-` for unidirectional search.
    pub strategy: String,
    pub queries: usize,
    pub mean_ms: f64,
    pub mean_pops: f64,
    /// Baseline mean time over this row's mean time.
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
}

impl BenchReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from(TSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.engine, r.order, r.strategy, r.queries, r.mean_ms, r.mean_pops, r.speedup
            )
            .unwrap();
        }
        s
    }

    pub fn from_tsv(text: &str) -> anyhow::Result<BenchReport> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                bail!("line {}: expected 7 fields, found {}", i + 1, f.len());
            }
            let num = |j: usize| -> anyhow::Result<f64> {
                f[j].parse().with_context(|| format!("line {}: field {}", i + 1, j + 1))
            };
            rows.push(ReportRow {
                engine: f[0].to_string(),
                order: f[1].to_string(),
                strategy: f[2].to_string(),
                queries: f[3].parse().with_context(|| format!("line {}: queries", i + 1))?,
                mean_ms: num(4)?,
                mean_pops: num(5)?,
                speedup: num(6)?,
            });
        }
        Ok(BenchReport { rows })
    }

    /// Aligned table for people.
    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:<12} {:<7} {:<8} {:>8} {:>12} {:>14} {:>8}\n",
            "engine", "order", "strategy", "queries", "time [ms]", "pops", "speedup"
        );
        for r in &self.rows {
            writeln!(
                s,
                "{:<12} {:<7} {:<8} {:>8} {:>12.3} {:>14.1} {:>8.2}",
                r.engine, r.order, r.strategy, r.queries, r.mean_ms, r.mean_pops, r.speedup
            )
            .unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = BenchReport::default();
        assert_eq!(r.to_tsv(), format!("{TSV_HEADER}\n"));
        assert_eq!(BenchReport::from_tsv(&r.to_tsv()).unwrap(), r);
    }

    #[test]
    fn bad_rows_are_rejected() {
        assert!(BenchReport::from_tsv("uni\tinput\t-\t3\n").is_err());
        assert!(BenchReport::from_tsv("uni\tinput\t-\tx\t1\t2\t3\n").is_err());
    }
}
