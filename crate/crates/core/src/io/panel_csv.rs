//! Long-format panel CSV: header `unit,time,y,x1,...,xk`, one row per
//! (unit, time) cell.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, Array3};

use crate::error::{Error, Result};
use crate::panel::PanelData;

/// A panel together with the unit and time labels it was read with.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPanel {
    pub units: Vec<String>,
    pub times: Vec<i64>,
    pub data: PanelData,
}

struct Record {
    unit: String,
    time: i64,
    y: f64,
    x: Vec<f64>,
}

fn parse_cell<T: std::str::FromStr>(raw: &str, row: usize, column: &str) -> Result<T> {
    raw.trim().parse::<T>().map_err(|_| Error::Parse {
        row,
        column: column.to_string(),
        message: format!("cannot parse '{raw}'"),
    })
}

fn check_header(header: &csv::StringRecord) -> Result<usize> {
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    let bad = |msg: String| Error::Parse {
        row: 1,
        column: "header".into(),
        message: msg,
    };
    if cols.len() < 3 || cols[0] != "unit" || cols[1] != "time" || cols[2] != "y" {
        return Err(bad(format!(
            "expected header 'unit,time,y[,x1,...]', got '{}'",
            cols.join(",")
        )));
    }
    for (j, c) in cols[3..].iter().enumerate() {
        let want = format!("x{}", j + 1);
        if *c != want {
            return Err(bad(format!("column {} should be '{want}', got '{c}'", j + 4)));
        }
    }
    Ok(cols.len() - 3)
}

/// Units are ordered numerically when every label is an integer, otherwise
/// lexicographically.
fn sort_units(units: &mut [String]) {
    if units.iter().all(|u| u.parse::<i64>().is_ok()) {
        units.sort_by_key(|u| u.parse::<i64>().expect("checked"));
    } else {
        units.sort();
    }
}

pub fn read_panel_labeled<R: Read>(reader: R) -> Result<LabeledPanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let kx = check_header(rdr.headers()?)?;

    let mut records = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        // header is line 1
        let row = idx + 2;
        let rec = rec?;
        if rec.len() != kx + 3 {
            return Err(Error::Parse {
                row,
                column: "*".into(),
                message: format!("expected {} fields, found {}", kx + 3, rec.len()),
            });
        }
        let unit = rec[0].to_string();
        if unit.is_empty() {
            return Err(Error::Parse {
                row,
                column: "unit".into(),
                message: "empty unit id".into(),
            });
        }
        let time: i64 = parse_cell(&rec[1], row, "time")?;
        let y: f64 = parse_cell(&rec[2], row, "y")?;
        let mut x = Vec::with_capacity(kx);
        for j in 0..kx {
            x.push(parse_cell::<f64>(&rec[3 + j], row, &format!("x{}", j + 1))?);
        }
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                row,
                column: "y/x".into(),
                message: "non-finite value".into(),
            });
        }
        records.push(Record { unit, time, y, x });
    }

    let mut units: Vec<String> = records
        .iter()
        .map(|r| r.unit.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    sort_units(&mut units);
    let times: Vec<i64> = records.iter().map(|r| r.time).collect::<BTreeSet<_>>().into_iter().collect();
    let unit_idx: HashMap<&str, usize> = units.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
    let time_idx: HashMap<i64, usize> = times.iter().enumerate().map(|(i, &t)| (t, i)).collect();

    let (n, t) = (units.len(), times.len());
    let mut seen = vec![false; n * t];
    let mut y = Array2::zeros((n, t));
    let mut x = Array3::zeros((n, t, kx));
    for r in &records {
        let i = unit_idx[r.unit.as_str()];
        let s = time_idx[&r.time];
        if std::mem::replace(&mut seen[i * t + s], true) {
            return Err(Error::DuplicateRow {
                unit: r.unit.clone(),
                time: r.time,
            });
        }
        y[[i, s]] = r.y;
        for (j, &v) in r.x.iter().enumerate() {
            x[[i, s, j]] = v;
        }
    }
    if let Some(pos) = seen.iter().position(|s| !s) {
        return Err(Error::UnbalancedPanel(format!(
            "unit '{}' has no row for time {} ({} of {} cells present)",
            units[pos / t],
            times[pos % t],
            records.len(),
            n * t
        )));
    }

    Ok(LabeledPanel {
        units,
        times,
        data: PanelData::new(y, x)?,
    })
}

pub fn read_panel_csv(path: impl AsRef<Path>) -> Result<PanelData> {
    read_panel_csv_labeled(path).map(|p| p.data)
}

pub fn read_panel_csv_labeled(path: impl AsRef<Path>) -> Result<LabeledPanel> {
    read_panel_labeled(std::fs::File::open(path)?)
}

/// Writes a panel in long format with unit ids `1..=n` and times `1..=T`.
pub fn write_panel<W: Write>(data: &PanelData, writer: W) -> Result<()> {
    let units: Vec<String> = (1..=data.n()).map(|i| i.to_string()).collect();
    let times: Vec<i64> = (1..=data.t() as i64).collect();
    write_labeled(&units, &times, data, writer)
}

pub fn write_labeled<W: Write>(units: &[String], times: &[i64], data: &PanelData, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["unit".to_string(), "time".into(), "y".into()];
    header.extend((1..=data.kx()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for (i, unit) in units.iter().enumerate() {
        for (s, time) in times.iter().enumerate() {
            let mut row = vec![unit.clone(), time.to_string(), fmt_num(data.y()[[i, s]])];
            row.extend((0..data.kx()).map(|j| fmt_num(data.x()[[i, s, j]])));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_panel_csv(data: &PanelData, path: impl AsRef<Path>) -> Result<()> {
    write_panel(data, std::fs::File::create(path)?)
}

/// 17 significant digits.
pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}
