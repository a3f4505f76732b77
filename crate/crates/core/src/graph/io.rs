//! Weight-graph files.
//!
//! CSV: `n` lines of `n` comma-separated values, row-major, shortest
//! round-trip decimal formatting.
//!
//! Binary: little-endian `u64` vertex count `n`, then `n²` little-endian
//! `f64` values in row-major order. No padding, no trailer.

use std::io::{BufRead, Read, Write};

use super::WeightGraph;
use crate::error::{Error, Result};

pub fn write_csv<W: Write>(graph: &WeightGraph, mut out: W) -> Result<()> {
    for i in 0..graph.n() {
        let line: Vec<String> = graph.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<WeightGraph> {
    let mut values = Vec::new();
    let mut rows = 0;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|e| Error::InvalidInput(format!("row {rows}: {e}")))?;
            values.push(v);
        }
        rows += 1;
    }
    WeightGraph::new(rows, values)
}

pub fn write_binary<W: Write>(graph: &WeightGraph, mut out: W) -> Result<()> {
    out.write_all(&(graph.n() as u64).to_le_bytes())?;
    for v in graph.as_slice() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<WeightGraph> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    let n = usize::try_from(u64::from_le_bytes(buf))
        .map_err(|_| Error::InvalidInput("vertex count overflows usize".into()))?;
    let len = n.checked_mul(n).ok_or_else(|| Error::InvalidInput("vertex count too large".into()))?;
    let mut w = Vec::with_capacity(len);
    for _ in 0..len {
        input.read_exact(&mut buf)?;
        w.push(f64::from_le_bytes(buf));
    }
    WeightGraph::new(n, w)
}
