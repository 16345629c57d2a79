//! Plain-text output formats. Every real number is rounded to 9
//! significant digits; CSV files start with a header row and use LF line
//! endings.

use std::io::Write;

use serde_json::{json, Value};

use crate::crg::HouseholdPartition;
use crate::error::Result;
use crate::explore::ExplorationState;
use crate::graph::{Graph, Positions};
use crate::mc::McSummary;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// `x` rounded to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal text of [`round_sig`]`(x)`; exponent notation outside
/// `[1e-4, 1e15)`.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// One edge per line, `u v` with `u < v`, no header.
pub fn write_edge_list<W: Write>(mut w: W, graph: &Graph) -> Result<()> {
    for (u, v) in graph.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// Coordinates, one point per row, header `x0,x1,...`.
pub fn write_positions_csv<W: Write>(mut w: W, positions: &Positions) -> Result<()> {
    let header: Vec<String> = (0..positions.dim).map(|i| format!("x{i}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for v in 0..positions.len() {
        let row: Vec<String> = positions.point(v).iter().map(|&x| fmt_num(x)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `vertex,household` rows.
pub fn write_households_csv<W: Write>(mut w: W, households: &HouseholdPartition) -> Result<()> {
    writeln!(w, "vertex,household")?;
    for (v, h) in households.assignment.iter().enumerate() {
        writeln!(w, "{v},{h}")?;
    }
    Ok(())
}

/// Exploration trajectory as `t,x,y` rows.
pub fn write_trace_csv<W: Write>(mut w: W, trace: &[ExplorationState]) -> Result<()> {
    writeln!(w, "t,x,y")?;
    for s in trace {
        writeln!(w, "{},{},{}", s.t, s.x, s.y)?;
    }
    Ok(())
}

/// One replication per row: `rep_index,jam_count,jam_fraction`.
pub fn write_replications_csv<W: Write>(mut w: W, summary: &McSummary) -> Result<()> {
    writeln!(w, "rep_index,jam_count,jam_fraction")?;
    for r in &summary.replications {
        writeln!(w, "{},{},{}", r.rep_index, r.jam_count, fmt_num(r.jam_fraction))?;
    }
    Ok(())
}

/// Summary as a JSON object with keys `reps, mean, var, scaled_var, stderr,
/// bins, counts`.
pub fn summary_json(summary: &McSummary) -> Value {
    json!({
        "reps": summary.reps,
        "mean": round_sig(summary.mean),
        "var": round_sig(summary.var),
        "scaled_var": round_sig(summary.scaled_var),
        "stderr": round_sig(summary.stderr),
        "bins": summary.bins.iter().map(|&b| round_sig(b)).collect::<Vec<_>>(),
        "counts": summary.counts,
    })
}

pub fn write_summary_json<W: Write>(mut w: W, summary: &McSummary) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &summary_json(summary))?;
    writeln!(w)?;
    Ok(())
}

/// The same numbers as [`summary_json`] in long form: `section,index,value`,
/// with index 0 for scalars and the position for `bins` and `counts`.
pub fn write_summary_csv<W: Write>(mut w: W, summary: &McSummary) -> Result<()> {
    writeln!(w, "section,index,value")?;
    writeln!(w, "reps,0,{}", summary.reps)?;
    for (key, value) in [
        ("mean", summary.mean),
        ("var", summary.var),
        ("scaled_var", summary.scaled_var),
        ("stderr", summary.stderr),
    ] {
        writeln!(w, "{key},0,{}", fmt_num(value))?;
    }
    for (i, b) in summary.bins.iter().enumerate() {
        writeln!(w, "bins,{i},{}", fmt_num(*b))?;
    }
    for (i, c) in summary.counts.iter().enumerate() {
        writeln!(w, "counts,{i},{c}")?;
    }
    Ok(())
}
