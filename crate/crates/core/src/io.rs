//! CSV and JSON formats for every input and output table.
//!
//! Readers report malformed values with their 1-based line number and
//! missing columns as schema errors. Floats are written in shortest
//! round-trip form, so every table reads back to identical values.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::error::{Error, Result};
use crate::feeder::{Device, DeviceGroup, EdgeSpec};
use crate::forecaster::{DailyProfile, Hourly, LoadHistory, HOURS};
use crate::residuals::SweepResult;
use crate::scaling::AggregationPoint;
use crate::synth::Population;
use crate::tailmodel::{CurvePoint, MeanExcessPoint};

/// Label of the group of vertices with no protective device above them.
pub const ROOT_GROUP_LABEL: &str = "root";

pub const LOADS_HEADER: [&str; 1] = ["load_kwh"];
pub const TREE_HEADER: [&str; 4] = ["parent", "child", "device", "child_load_kwh"];
pub const GROUPS_HEADER: [&str; 3] = ["group_edge", "total_load_kwh", "n_vertices"];
pub const HISTORY_HEADER: [&str; 4] = ["date", "hour", "load_kwh", "temp_c"];
pub const CURVE_HEADER: [&str; 4] = ["level", "replicate", "W_kwh", "cv_pct"];
pub const SWEEP_HEADER: [&str; 4] = ["level", "n_customers", "pass_fraction", "mean_gamma"];
pub const MEAN_EXCESS_HEADER: [&str; 4] = ["u_kwh", "mean_excess_kwh", "exceedances", "source"];
pub const LOG_SURVIVAL_HEADER: [&str; 3] = ["log_x", "log_survival", "source"];
pub const ZIPF_HEADER: [&str; 3] = ["log_rank", "log_x", "source"];
pub const PROFILE_HEADER: [&str; 3] = ["date", "hour", "load_kwh"];
pub const RESIDUALS_HEADER: [&str; 5] = [
    "date",
    "hour",
    "actual_kwh",
    "predicted_kwh",
    "residual_kwh",
];

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Rows of a headed CSV with fields reordered to `columns`. Extra columns
/// are ignored.
struct Table {
    rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    fn read<R: Read>(reader: R, columns: &[&str]) -> Result<Self> {
        let mut rdr = ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let pos: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h, i)).collect();
        let missing: Vec<&str> = columns
            .iter()
            .copied()
            .filter(|c| !pos.contains_key(c))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Schema(format!(
                "missing column(s) {}; expected {}",
                missing.join(", "),
                columns.join(",")
            )));
        }
        let idx: Vec<usize> = columns.iter().map(|c| pos[c]).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, idx.iter().map(|&i| rec[i].to_string()).collect()));
        }
        Ok(Self { rows })
    }
}

fn parse_f64(s: &str, line: u64, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("{what}: {s:?} is not a finite number"),
        })
}

fn parse_usize(s: &str, line: u64, what: &str) -> Result<usize> {
    s.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("{what}: {s:?} is not a non-negative integer"),
    })
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    WriterBuilder::new().has_headers(false).from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Single-column load sample; the `load_kwh` header is optional.
pub fn read_loads<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    let mut rec = StringRecord::new();
    let mut first = true;
    while rdr.read_record(&mut rec).map_err(csv_err)? {
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 1 {
            return Err(Error::Schema(format!(
                "line {line}: expected one column, found {}",
                rec.len()
            )));
        }
        if first && rec[0].parse::<f64>().is_err() {
            first = false;
            if &rec[0] != LOADS_HEADER[0] {
                return Err(Error::Schema(format!(
                    "unexpected header {:?}; expected {}",
                    &rec[0], LOADS_HEADER[0]
                )));
            }
            continue;
        }
        first = false;
        out.push(parse_f64(&rec[0], line, "load_kwh")?);
    }
    Ok(out)
}

pub fn write_loads<W: Write>(w: W, loads: &[f64]) -> Result<()> {
    let mut w = writer(w);
    w.write_record(LOADS_HEADER)?;
    for v in loads {
        w.write_record([v.to_string()])?;
    }
    finish(w)
}

pub fn read_tree<R: Read>(reader: R) -> Result<Vec<EdgeSpec>> {
    Table::read(reader, &TREE_HEADER)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok(EdgeSpec {
                device: Device::parse(&f[2]).map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?,
                child_load_kwh: parse_f64(&f[3], line, "child_load_kwh")?,
                parent: f[0].clone(),
                child: f[1].clone(),
            })
        })
        .collect()
}

pub fn write_tree<W: Write>(w: W, edges: &[EdgeSpec]) -> Result<()> {
    let mut w = writer(w);
    w.write_record(TREE_HEADER)?;
    for e in edges {
        w.write_record([
            e.parent.clone(),
            e.child.clone(),
            e.device.as_str().to_string(),
            e.child_load_kwh.to_string(),
        ])?;
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub group_edge: String,
    pub total_load_kwh: f64,
    pub n_vertices: usize,
}

impl From<&DeviceGroup> for GroupRow {
    fn from(g: &DeviceGroup) -> Self {
        Self {
            group_edge: g.label(),
            total_load_kwh: g.total_load,
            n_vertices: g.member_vertices.len(),
        }
    }
}

pub fn write_groups<W: Write>(w: W, groups: &[DeviceGroup]) -> Result<()> {
    let mut w = writer(w);
    w.write_record(GROUPS_HEADER)?;
    for g in groups.iter().map(GroupRow::from) {
        w.write_record([
            g.group_edge,
            g.total_load_kwh.to_string(),
            g.n_vertices.to_string(),
        ])?;
    }
    finish(w)
}

pub fn read_groups<R: Read>(reader: R) -> Result<Vec<GroupRow>> {
    Table::read(reader, &GROUPS_HEADER)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok(GroupRow {
                total_load_kwh: parse_f64(&f[1], line, "total_load_kwh")?,
                n_vertices: parse_usize(&f[2], line, "n_vertices")?,
                group_edge: f[0].clone(),
            })
        })
        .collect()
}

/// A load history anchored to calendar dates.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedHistory {
    pub start_date: NaiveDate,
    pub history: LoadHistory,
}

/// Long-format history, one row per (date, hour). Dates must be
/// consecutive and each must have hours 0 to 23 in order. A final date whose
/// `load_kwh` cells are all empty supplies the forecast day's temperature.
pub fn read_history<R: Read>(reader: R) -> Result<DatedHistory> {
    let table = Table::read(reader, &HISTORY_HEADER)?;
    if table.rows.is_empty() {
        return Err(Error::Schema("history has no rows".into()));
    }
    if table.rows.len() % HOURS != 0 {
        return Err(Error::Schema(format!(
            "history has {} rows, not a whole number of {HOURS}-hour days",
            table.rows.len()
        )));
    }
    let mut start = None;
    let mut loads: Vec<Option<Hourly>> = Vec::new();
    let mut temps: Vec<Hourly> = Vec::new();
    for (d, chunk) in table.rows.chunks(HOURS).enumerate() {
        let mut l = [0.0; HOURS];
        let mut t = [0.0; HOURS];
        let mut empty = 0;
        let mut date = None;
        for (h, (line, f)) in chunk.iter().enumerate() {
            let line = *line;
            let day = parse_date(&f[0], line)?;
            let expect = match start {
                None => day,
                Some(s) => s + chrono::Days::new(d as u64),
            };
            if day != expect || date.is_some_and(|x| x != day) {
                return Err(Error::Parse {
                    line,
                    message: format!("expected date {expect}, found {day}"),
                });
            }
            start.get_or_insert(day);
            date = Some(day);
            if parse_usize(&f[1], line, "hour")? != h {
                return Err(Error::Parse {
                    line,
                    message: format!("expected hour {h}, found {}", f[1]),
                });
            }
            if f[2].is_empty() {
                empty += 1;
            } else {
                l[h] = parse_f64(&f[2], line, "load_kwh")?;
            }
            t[h] = parse_f64(&f[3], line, "temp_c")?;
        }
        match empty {
            0 => loads.push(Some(l)),
            HOURS => loads.push(None),
            _ => {
                return Err(Error::Parse {
                    line: chunk[0].0,
                    message: "day has some but not all load values empty".into(),
                })
            }
        }
        temps.push(t);
    }
    let n_days = loads.iter().take_while(|l| l.is_some()).count();
    if loads.len() - n_days > 1
        || (loads.len() - n_days == 1 && loads.last().is_some_and(Option::is_some))
    {
        return Err(Error::Schema("only the final day may omit loads".into()));
    }
    let days = loads
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(i, h)| DailyProfile::new(i, h))
        .collect::<Result<Vec<_>>>()?;
    Ok(DatedHistory {
        start_date: start.expect("non-empty"),
        history: LoadHistory::new(days, temps)?,
    })
}

pub fn write_history<W: Write>(w: W, h: &DatedHistory) -> Result<()> {
    let mut w = writer(w);
    w.write_record(HISTORY_HEADER)?;
    let n = h.history.len();
    for (d, t) in h.history.hourly_temp().iter().enumerate() {
        let date = (h.start_date + chrono::Days::new(d as u64)).to_string();
        for (hour, temp) in t.iter().enumerate() {
            let load = if d < n {
                h.history.days()[d].hours()[hour].to_string()
            } else {
                String::new()
            };
            w.write_record([date.clone(), hour.to_string(), load, temp.to_string()])?;
        }
    }
    finish(w)
}

/// Hourly profile of one day, `date,hour,load_kwh`.
pub fn write_profile<W: Write>(w: W, date: NaiveDate, hours: &Hourly) -> Result<()> {
    let mut w = writer(w);
    w.write_record(PROFILE_HEADER)?;
    for (h, v) in hours.iter().enumerate() {
        w.write_record([date.to_string(), h.to_string(), v.to_string()])?;
    }
    finish(w)
}

fn parse_date(s: &str, line: u64) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| Error::Parse {
        line,
        message: format!("date {s:?}: {e}"),
    })
}

/// Reads a profile written by [`write_profile`].
pub fn read_profile<R: Read>(reader: R) -> Result<(NaiveDate, Hourly)> {
    let table = Table::read(reader, &PROFILE_HEADER)?;
    if table.rows.len() != HOURS {
        return Err(Error::Schema(format!(
            "profile has {} rows, expected {HOURS}",
            table.rows.len()
        )));
    }
    let mut out = [0.0; HOURS];
    let mut date = None;
    for (h, (line, f)) in table.rows.iter().enumerate() {
        let d = parse_date(&f[0], *line)?;
        if *date.get_or_insert(d) != d || parse_usize(&f[1], *line, "hour")? != h {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected hour {h} of a single date"),
            });
        }
        out[h] = parse_f64(&f[2], *line, "load_kwh")?;
    }
    Ok((date.expect("24 rows"), out))
}

/// Residual table row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub date: NaiveDate,
    pub hour: usize,
    pub actual_kwh: f64,
    pub predicted_kwh: f64,
    pub residual_kwh: f64,
}

pub fn read_residuals<R: Read>(reader: R) -> Result<Vec<ResidualRow>> {
    Table::read(reader, &RESIDUALS_HEADER)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok(ResidualRow {
                date: parse_date(&f[0], line)?,
                hour: parse_usize(&f[1], line, "hour")?,
                actual_kwh: parse_f64(&f[2], line, "actual_kwh")?,
                predicted_kwh: parse_f64(&f[3], line, "predicted_kwh")?,
                residual_kwh: parse_f64(&f[4], line, "residual_kwh")?,
            })
        })
        .collect()
}

/// Hour-by-hour forecast residuals, `date,hour,actual_kwh,predicted_kwh,residual_kwh`.
pub fn write_residuals<W: Write>(
    w: W,
    first_date: NaiveDate,
    actual: &[f64],
    predicted: &[f64],
) -> Result<()> {
    let mut w = writer(w);
    w.write_record(RESIDUALS_HEADER)?;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        let date = first_date + chrono::Days::new((i / HOURS) as u64);
        w.write_record([
            date.to_string(),
            (i % HOURS).to_string(),
            a.to_string(),
            p.to_string(),
            (a - p).to_string(),
        ])?;
    }
    finish(w)
}

/// Curve rows; `level` holds the customer count of the aggregate.
pub fn write_curve<W: Write>(w: W, points: &[AggregationPoint]) -> Result<()> {
    let mut w = writer(w);
    w.write_record(CURVE_HEADER)?;
    for p in points {
        w.write_record([
            p.n_customers.to_string(),
            p.replicate.to_string(),
            p.w_kwh.to_string(),
            p.cv_pct.to_string(),
        ])?;
    }
    finish(w)
}

pub fn read_curve<R: Read>(reader: R) -> Result<Vec<AggregationPoint>> {
    Table::read(reader, &CURVE_HEADER)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok(AggregationPoint {
                n_customers: parse_usize(&f[0], line, "level")?,
                replicate: parse_usize(&f[1], line, "replicate")?,
                w_kwh: parse_f64(&f[2], line, "W_kwh")?,
                cv_pct: parse_f64(&f[3], line, "cv_pct")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Position of the level in the sweep, from 0.
    pub level: usize,
    pub n_customers: usize,
    pub pass_fraction: f64,
    pub mean_gamma: f64,
}

pub fn write_sweep<W: Write>(w: W, sweep: &SweepResult) -> Result<()> {
    let mut w = writer(w);
    w.write_record(SWEEP_HEADER)?;
    for (i, l) in sweep.levels.iter().enumerate() {
        w.write_record([
            i.to_string(),
            l.n_customers.to_string(),
            l.pass_fraction.to_string(),
            l.mean_gamma.to_string(),
        ])?;
    }
    finish(w)
}

pub fn read_sweep<R: Read>(reader: R) -> Result<Vec<SweepRow>> {
    Table::read(reader, &SWEEP_HEADER)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok(SweepRow {
                level: parse_usize(&f[0], line, "level")?,
                n_customers: parse_usize(&f[1], line, "n_customers")?,
                pass_fraction: parse_f64(&f[2], line, "pass_fraction")?,
                mean_gamma: parse_f64(&f[3], line, "mean_gamma")?,
            })
        })
        .collect()
}

pub fn write_mean_excess<W: Write>(w: W, curves: &[(&str, &[MeanExcessPoint])]) -> Result<()> {
    let mut w = writer(w);
    w.write_record(MEAN_EXCESS_HEADER)?;
    for (source, pts) in curves {
        for p in *pts {
            w.write_record([
                p.u.to_string(),
                p.e.to_string(),
                p.exceedances.to_string(),
                source.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn read_mean_excess<R: Read>(reader: R) -> Result<Vec<(String, MeanExcessPoint)>> {
    Table::read(reader, &MEAN_EXCESS_HEADER)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok((
                f[3].clone(),
                MeanExcessPoint {
                    u: parse_f64(&f[0], line, "u_kwh")?,
                    e: parse_f64(&f[1], line, "mean_excess_kwh")?,
                    exceedances: parse_usize(&f[2], line, "exceedances")?,
                },
            ))
        })
        .collect()
}

fn write_curve_points<W: Write>(
    w: W,
    header: &[&str; 3],
    curves: &[(&str, &[CurvePoint])],
) -> Result<()> {
    let mut w = writer(w);
    w.write_record(header)?;
    for (source, pts) in curves {
        for p in *pts {
            w.write_record([p.x.to_string(), p.y.to_string(), source.to_string()])?;
        }
    }
    finish(w)
}

pub fn write_log_survival<W: Write>(w: W, curves: &[(&str, &[CurvePoint])]) -> Result<()> {
    write_curve_points(w, &LOG_SURVIVAL_HEADER, curves)
}

pub fn write_zipf<W: Write>(w: W, curves: &[(&str, &[CurvePoint])]) -> Result<()> {
    write_curve_points(w, &ZIPF_HEADER, curves)
}

/// Reads a two-axis diagnostics table back as `(source, point)` pairs.
pub fn read_curve_points<R: Read>(
    reader: R,
    header: &[&str; 3],
) -> Result<Vec<(String, CurvePoint)>> {
    Table::read(reader, header)?
        .rows
        .into_iter()
        .map(|(line, f)| {
            Ok((
                f[2].clone(),
                CurvePoint {
                    x: parse_f64(&f[0], line, header[0])?,
                    y: parse_f64(&f[1], line, header[1])?,
                },
            ))
        })
        .collect()
}

/// File name of customer `i` inside a population directory.
pub fn customer_file_name(i: usize) -> String {
    format!("customer_{i:05}.csv")
}

/// Reads every `*.csv` history in `dir`, in file-name order, as one
/// population. All files must share the start date and length; the
/// temperature record is taken from the first file.
pub fn read_population_dir(dir: &Path) -> Result<Population> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::NotFound(format!(
            "no .csv histories in {}",
            dir.display()
        )));
    }
    let mut start = None;
    let mut histories = Vec::with_capacity(files.len());
    for f in &files {
        let h = read_history(fs::File::open(f)?).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", f.display()),
            },
            other => other,
        })?;
        if *start.get_or_insert(h.start_date) != h.start_date {
            return Err(Error::Schema(format!(
                "{} starts on {}, expected {}",
                f.display(),
                h.start_date,
                start.expect("set")
            )));
        }
        histories.push(h.history);
    }
    Population::from_histories(start.expect("non-empty"), &histories)
}

/// History of customer `i` in dated form.
pub fn customer_history(pop: &Population, i: usize) -> Result<DatedHistory> {
    Ok(DatedHistory {
        start_date: pop.start_date,
        history: pop.customer(i)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_with_and_without_header() {
        assert_eq!(
            read_loads("load_kwh\n1.5\n2\n".as_bytes()).unwrap(),
            vec![1.5, 2.0]
        );
        assert_eq!(read_loads("1.5\n2\n".as_bytes()).unwrap(), vec![1.5, 2.0]);
        assert!(matches!(
            read_loads("watts\n1\n".as_bytes()),
            Err(Error::Schema(_))
        ));
        match read_loads("load_kwh\n1\nabc\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loads_round_trip() {
        let v = vec![0.1, 1.0 / 3.0, 1e-300, 74.28];
        let mut buf = Vec::new();
        write_loads(&mut buf, &v).unwrap();
        assert_eq!(read_loads(&buf[..]).unwrap(), v);
    }

    #[test]
    fn tree_schema_errors() {
        let missing = "parent,child,device\nr,a,fuse\n";
        assert!(matches!(
            read_tree(missing.as_bytes()),
            Err(Error::Schema(_))
        ));
        let bad = "parent,child,device,child_load_kwh\nr,a,fuse,1\nr,b,breaker,2\n";
        match read_tree(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tree_round_trip() {
        let edges = vec![
            EdgeSpec {
                parent: "r".into(),
                child: "a".into(),
                device: Device::Fuse,
                child_load_kwh: 2.5,
            },
            EdgeSpec {
                parent: "a".into(),
                child: "b".into(),
                device: Device::None,
                child_load_kwh: 0.1,
            },
        ];
        let mut buf = Vec::new();
        write_tree(&mut buf, &edges).unwrap();
        assert_eq!(read_tree(&buf[..]).unwrap(), edges);
    }

    fn sample_history(with_next: bool) -> DatedHistory {
        let days = (0..3)
            .map(|d| {
                DailyProfile::new(d, std::array::from_fn(|h| (d * 24 + h) as f64 / 7.0)).unwrap()
            })
            .collect();
        let n = if with_next { 4 } else { 3 };
        let temps = (0..n)
            .map(|d| std::array::from_fn(|h| d as f64 + h as f64 * 0.1))
            .collect();
        DatedHistory {
            start_date: NaiveDate::from_ymd_opt(2013, 12, 30).unwrap(),
            history: LoadHistory::new(days, temps).unwrap(),
        }
    }

    #[test]
    fn history_round_trip() {
        for next in [false, true] {
            let h = sample_history(next);
            let mut buf = Vec::new();
            write_history(&mut buf, &h).unwrap();
            let back = read_history(&buf[..]).unwrap();
            assert_eq!(back, h);
            assert_eq!(back.history.has_next_day_temp(), next);
        }
    }

    #[test]
    fn history_errors() {
        let h = sample_history(false);
        let mut buf = Vec::new();
        write_history(&mut buf, &h).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let skipped_hour = text.replacen("2013-12-30,5,", "2013-12-30,6,", 1);
        match read_history(skipped_hour.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        let gap = text.replace("2014-01-01", "2014-01-02");
        assert!(matches!(
            read_history(gap.as_bytes()),
            Err(Error::Parse { .. })
        ));
        let truncated: String = text.lines().take(30).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_history(truncated.as_bytes()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn curve_round_trip() {
        let pts = vec![
            AggregationPoint {
                w_kwh: 0.87,
                cv_pct: 31.2,
                n_customers: 1,
                replicate: 0,
            },
            AggregationPoint {
                w_kwh: 870.123,
                cv_pct: 7.01,
                n_customers: 1000,
                replicate: 19,
            },
        ];
        let mut buf = Vec::new();
        write_curve(&mut buf, &pts).unwrap();
        assert_eq!(read_curve(&buf[..]).unwrap(), pts);
    }
}
