use std::io::{Read, Write};

use super::Hypergraph;
use crate::error::{Error, Result};

/// Writes `edge_id,v_1,..,v_r` rows, one per edge.
pub fn write_edges_csv<W: Write>(h: &Hypergraph, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["edge_id".to_string()];
    header.extend((1..=h.r()).map(|i| format!("v_{i}")));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(h.r() + 1);
    for (i, e) in h.edges().enumerate() {
        row.clear();
        row.push(i.to_string());
        row.extend(e.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the format of [`write_edges_csv`]. Rows must appear in edge-id order.
/// When `n` is `None` the vertex count is one more than the largest id.
pub fn read_edges_csv<R: Read>(input: R, n: Option<usize>, multi_allowed: bool) -> Result<Hypergraph> {
    let mut rd = csv::Reader::from_reader(input);
    let r = rd.headers()?.len().checked_sub(1).filter(|&r| r > 0).ok_or_else(|| {
        Error::Parse("edge CSV needs an edge_id column and at least one vertex column".into())
    })?;
    let mut slots = Vec::new();
    for (expected, rec) in rd.records().enumerate() {
        let rec = rec?;
        let id: usize = rec[0].trim().parse().map_err(|_| Error::Parse(format!("bad edge id {:?}", &rec[0])))?;
        if id != expected {
            return Err(Error::Parse(format!("edge id {id} out of order, expected {expected}")));
        }
        for f in rec.iter().skip(1) {
            slots.push(f.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad vertex {f:?}")))?);
        }
    }
    let n = n.unwrap_or_else(|| slots.iter().map(|&v| v as usize + 1).max().unwrap_or(0));
    Hypergraph::from_slots(n, r, slots, multi_allowed)
}
