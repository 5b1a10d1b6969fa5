use std::io::{Read, Write};

use super::afem::ConvergenceRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 14] = [
    "level", "ndof", "Eh", "Estar", "LEB", "RHS", "gap", "osc", "err_stress", "err_grad", "err_l2",
    "eta_sum", "iters", "seconds",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the convergence history; missing diagnostics become empty fields.
pub fn write_csv<W: Write>(out: W, records: &[ConvergenceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.level.to_string(),
            r.ndof.to_string(),
            r.eh.to_string(),
            r.estar.to_string(),
            r.leb.to_string(),
            r.rhs.to_string(),
            r.gap.to_string(),
            r.osc.to_string(),
            opt(r.err_stress),
            opt(r.err_grad),
            opt(r.err_l2),
            r.eta_sum.to_string(),
            r.iters.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ConvergenceRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let field = |j: usize| row.get(j).unwrap_or("").trim();
        let bad = |j: usize| Error::Config(format!("row {}: bad value '{}' in column {}", i + 1, field(j), CSV_HEADER[j]));
        let num = |j: usize| field(j).parse::<f64>().map_err(|_| bad(j));
        let int = |j: usize| field(j).parse::<usize>().map_err(|_| bad(j));
        let maybe = |j: usize| if field(j).is_empty() { Ok(None) } else { num(j).map(Some) };
        out.push(ConvergenceRecord {
            level: int(0)?,
            ndof: int(1)?,
            eh: num(2)?,
            estar: num(3)?,
            leb: num(4)?,
            rhs: num(5)?,
            gap: num(6)?,
            osc: num(7)?,
            err_stress: maybe(8)?,
            err_grad: maybe(9)?,
            err_l2: maybe(10)?,
            eta_sum: num(11)?,
            iters: int(12)?,
            seconds: num(13)?,
        });
    }
    Ok(out)
}
