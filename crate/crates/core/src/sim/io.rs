//! Dataset files.
//!
//! All integers are little-endian `u64`, all reals little-endian `f64`:
//!
//! ```text
//! magic    8 bytes  "HCUTDS01"
//! n        u64      image count
//! k        u64      class count, 0 when no ground truth is stored
//! labels   n × u64  true class of every image            (k > 0 only)
//! truth    n × 9 f64 true rotations, row-major             (k > 0 only)
//! pairs    for i < j in lexicographic order:
//!            u8 flag (1 valid, 0 invalid), then if valid
//!            4 × f64: c_ij.x, c_ij.y, c_ji.x, c_ji.y
//! ```

use std::io::{Read, Write};

use super::Dataset;
use crate::error::{Error, Result};
use crate::geometry::{CommonLine, CommonLineTable, Rotation};
use crate::graph::Partition;

const MAGIC: &[u8; 8] = b"HCUTDS01";

pub fn write_dataset<W: Write>(data: &Dataset, mut out: W) -> Result<()> {
    let n = data.table.n();
    out.write_all(MAGIC)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&(data.truth_partition.k() as u64).to_le_bytes())?;
    for &l in data.truth_partition.labels() {
        out.write_all(&(l as u64).to_le_bytes())?;
    }
    for r in &data.truth_rotations {
        for v in r.as_rows().iter().flatten() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    write_pairs(&data.table, &mut out)
}

/// Writes a table with no ground truth.
pub fn write_table<W: Write>(table: &CommonLineTable, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(table.n() as u64).to_le_bytes())?;
    out.write_all(&0u64.to_le_bytes())?;
    write_pairs(table, &mut out)
}

fn write_pairs<W: Write>(table: &CommonLineTable, out: &mut W) -> Result<()> {
    let n = table.n();
    for i in 0..n {
        for j in i + 1..n {
            match table.pair(i, j) {
                Some((a, b)) => {
                    out.write_all(&[1])?;
                    for v in [a.x(), a.y(), b.x(), b.y()] {
                        out.write_all(&v.to_le_bytes())?;
                    }
                }
                None => out.write_all(&[0])?,
            }
        }
    }
    Ok(())
}

/// A table with optional ground truth.
#[derive(Clone, Debug)]
pub struct StoredDataset {
    pub table: CommonLineTable,
    pub truth: Option<(Vec<Rotation>, Partition)>,
}

pub fn read_dataset<R: Read>(mut input: R) -> Result<StoredDataset> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidInput("not a dataset file".into()));
    }
    let n = read_count(&mut input)?;
    let k = read_count(&mut input)?;
    let truth = if k > 0 {
        let labels = (0..n).map(|_| read_count(&mut input)).collect::<Result<Vec<_>>>()?;
        let partition = Partition::new(labels, k)?;
        let rotations = (0..n)
            .map(|_| {
                let mut rows = [[0.0; 3]; 3];
                for v in rows.iter_mut().flatten() {
                    *v = read_f64(&mut input)?;
                }
                Rotation::from_rows(rows)
            })
            .collect::<Result<Vec<_>>>()?;
        Some((rotations, partition))
    } else {
        None
    };
    let mut table = CommonLineTable::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let mut flag = [0u8; 1];
            input.read_exact(&mut flag)?;
            match flag[0] {
                0 => {}
                1 => {
                    let mut v = [0.0; 4];
                    for x in v.iter_mut() {
                        *x = read_f64(&mut input)?;
                    }
                    table.set_pair(i, j, CommonLine::from_unit(v[0], v[1])?, CommonLine::from_unit(v[2], v[3])?);
                }
                other => return Err(Error::InvalidInput(format!("pair ({i}, {j}): bad flag {other}"))),
            }
        }
    }
    Ok(StoredDataset { table, truth })
}

fn read_count<R: Read>(input: &mut R) -> Result<usize> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    usize::try_from(u64::from_le_bytes(buf)).map_err(|_| Error::InvalidInput("count overflows usize".into()))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
