//! Grid scans over a worker pool and their CSV/JSON emission.

use std::io::Write;

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// One grid point: `(axis name, value)` in declaration order.
pub type Point = Vec<(String, f64)>;

/// Rows of a scan, row-major over the outer axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    /// `key: value` lines describing truncation and derived quantities.
    pub notes: Vec<String>,
    /// `(name, grid)` of every scanned axis.
    pub axes: Vec<(String, Vec<f64>)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Outer product of the non-`omega` axes, row-major in declaration order.
pub fn grid_points(config: &RunConfig) -> Vec<Point> {
    let mut points: Vec<Point> = vec![Vec::new()];
    for axis in config.outer_axes() {
        let values = axis.values();
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((axis.name().to_string(), *v));
                    q
                })
            })
            .collect();
    }
    points
}

pub fn coordinate(point: &Point, name: &str, fallback: f64) -> f64 {
    point.iter().find(|(n, _)| n == name).map_or(fallback, |(_, v)| *v)
}

/// Runs `eval` on every point with `jobs` workers; the merge keeps grid
/// order. A failed point logs a warning and yields `fallback(point)`.
pub fn run_points<F, G>(points: &[Point], jobs: usize, eval: F, fallback: G) -> Result<Vec<Vec<Vec<f64>>>>
where
    F: Fn(&Point) -> Result<Vec<Vec<f64>>> + Sync,
    G: Fn(&Point) -> Vec<Vec<f64>> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|p| match eval(p) {
                Ok(rows) => rows,
                Err(e) => {
                    log::warn!("point {p:?} failed: {e:#}");
                    fallback(p)
                }
            })
            .collect()
    }))
}

impl ScanResult {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "# usc-relax {}", self.version)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config:")?;
        for line in self.config.emit().lines() {
            writeln!(out, "#   {line}")?;
        }
        for note in &self.notes {
            writeln!(out, "# {note}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_row_major_in_declaration_order() {
        let c = RunConfig::parse("axes = [[\"epsilon\", 0.0, 1.0, 2], [\"g\", 0.0, 2.0, 3]]").unwrap();
        let pts = grid_points(&c);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vec![("epsilon".into(), 0.0), ("g".into(), 1.0)]);
        assert_eq!(pts[3], vec![("epsilon".into(), 1.0), ("g".into(), 0.0)]);
    }

    #[test]
    fn failures_become_fallback_rows_in_order() {
        let c = RunConfig::parse("axes = [[\"g\", 0.0, 9.0, 10]]").unwrap();
        let pts = grid_points(&c);
        let rows = run_points(
            &pts,
            4,
            |p| {
                let g = coordinate(p, "g", 0.0);
                if g == 3.0 {
                    anyhow::bail!("boom");
                }
                Ok(vec![vec![g, 2.0 * g]])
            },
            |p| vec![vec![coordinate(p, "g", 0.0), f64::NAN]],
        )
        .unwrap();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r[0][0], i as f64);
        }
        assert!(rows[3][0][1].is_nan());
    }
}
