use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::SweepGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

/// Decimal text with seventeen significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns `g, a, re_e_1..re_e_n, im_e_1..im_e_n`, one row per grid point.
pub fn write_csv<W: Write>(grid: &SweepGrid, out: W) -> Result<()> {
    let n = grid.n();
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["g".to_string(), "a".to_string()];
    header.extend((1..=n).map(|i| format!("re_e_{i}")));
    header.extend((1..=n).map(|i| format!("im_e_{i}")));
    wtr.write_record(&header)?;
    for p in &grid.points {
        let mut row = vec![format_number(p.g), format_number(p.a)];
        row.extend(p.re.iter().map(|&x| format_number(x)));
        row.extend(p.im.iter().map(|&x| format_number(x)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Floats are written in their shortest round-trip form.
pub fn write_json<W: Write>(grid: &SweepGrid, out: W) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, grid)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn export(grid: &SweepGrid, format: ExportFormat, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    match format {
        ExportFormat::Csv => write_csv(grid, &mut f)?,
        ExportFormat::Json => write_json(grid, &mut f)?,
    }
    f.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<SweepGrid> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Axis, ChainParams};
    use crate::sweep::{sweep_1d, sweep_2d, AxisRange};

    #[test]
    fn csv_layout() {
        let p = ChainParams::new(1.0, 0.1, 0.0, 0.3, 4).unwrap();
        let grid = sweep_1d(&p, &AxisRange::new(Axis::G, -1.0, 1.0, 3).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "g,a,re_e_1,re_e_2,re_e_3,re_e_4,im_e_1,im_e_2,im_e_3,im_e_4"
        );
        for l in &lines[1..] {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), 10);
            for c in cells {
                let mantissa = c.trim_start_matches('-').split('e').next().unwrap();
                assert_eq!(mantissa.chars().filter(|ch| ch.is_ascii_digit()).count(), 17);
                c.parse::<f64>().unwrap();
            }
        }
        assert!(lines[1].starts_with("-1.0000000000000000e0,2.9999999999999999e-1,"));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let p = ChainParams::new(0.1, 1.0, 0.0, 0.0, 4).unwrap();
        let grid = sweep_2d(&p, (-2.0, 2.0, 21), (0.0, 0.5, 3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.json");
        export(&grid, ExportFormat::Json, &path).unwrap();
        let back = read_json(&path).unwrap();
        assert_eq!(back, grid);
        let again = dir.path().join("again.json");
        export(&back, ExportFormat::Json, &again).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let p = ChainParams::new(1.0, 0.1, 0.0, 0.0, 2).unwrap();
        let grid = sweep_1d(&p, &AxisRange::new(Axis::G, 0.0, 1.0, 2).unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("x.csv");
        assert!(matches!(export(&grid, ExportFormat::Csv, &bad), Err(Error::Io(_))));
    }
}
