use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use gradssh::ep::EpRecord;
use gradssh::sweep::format_number;
use serde::Serialize;

/// Runs `f` against the output file, or standard output when no path is given.
pub fn with_writer(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn json(w: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn table(w: &mut dyn Write, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        wtr.write_record(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn num(x: f64) -> String {
    format_number(x)
}

pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub const RECORD_COLUMNS: [&str; 12] = [
    "g",
    "a",
    "re_e",
    "im_e",
    "multiplicity",
    "kind",
    "order",
    "exponent",
    "coalescence",
    "case",
    "refined",
    "discriminant",
];

pub fn record_row(r: &EpRecord) -> Vec<String> {
    let kind = serde_json::to_value(r.kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    vec![
        num(r.g),
        num(r.a),
        num(r.energy.re),
        num(r.energy.im),
        r.multiplicity.to_string(),
        kind,
        r.order_estimate.map(|o| o.order.to_string()).unwrap_or_default(),
        r.order_estimate.map(|o| num(o.exponent)).unwrap_or_default(),
        num(r.coalescence),
        r.case_label.map(|c| c.to_string()).unwrap_or_default(),
        r.refined.to_string(),
        num(r.discriminant),
    ]
}

pub fn records_csv(w: &mut dyn Write, records: &[EpRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records.iter().map(record_row).collect();
    table(w, &header(&RECORD_COLUMNS), &rows)
}
