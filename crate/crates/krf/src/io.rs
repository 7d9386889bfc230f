//! CSV formats. Every number is written with 17 significant digits.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use krf_core::analysis::SeriesRecord;
use krf_core::barriers::BarrierViolation;
use krf_core::flow::{AnchorRecord, DilatedState};
use krf_core::{CurvatureReport, LogProfile, RadialProfile};

pub const RADIAL_HEADER: [&str; 2] = ["f", "u"];
pub const LOG_HEADER: [&str; 2] = ["r", "phi"];
pub const CURVATURE_HEADER: [&str; 8] = ["f", "psi", "lambda1", "lambda2", "R", "rm1", "rm2", "rm3"];
pub const VIOLATION_HEADER: [&str; 5] = ["step", "tau", "node_phi", "kind", "deficit"];
pub const ANCHOR_HEADER: [&str; 7] = ["tau", "phi_star", "rho_star", "anchor_r", "rho_two", "gauge_C", "log_fw"];

/// Full-precision rendering used by every writer.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

/// Writes a numeric table.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut w = writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.as_ref().iter().map(|&v| fmt_num(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric table whose header must equal `header`.
pub fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let got: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if got != header {
        bail!("{}: expected header `{}`, found `{}`", path.display(), header.join(","), got.join(","));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .with_context(|| format!("{}: row {} is not numeric", path.display(), i + 2))?;
        if row.len() != header.len() {
            bail!("{}: row {} has {} fields", path.display(), i + 2, row.len());
        }
        rows.push(row);
    }
    Ok(rows)
}

fn columns2(rows: Vec<Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
    rows.into_iter().map(|r| (r[0], r[1])).unzip()
}

pub fn write_radial_csv(path: &Path, p: &RadialProfile) -> Result<()> {
    write_table(path, &RADIAL_HEADER, p.f().iter().zip(p.u()).map(|(&f, &u)| [f, u]))
}

pub fn read_radial_csv(path: &Path) -> Result<RadialProfile> {
    let (f, u) = columns2(read_table(path, &RADIAL_HEADER)?);
    RadialProfile::new(f, u).with_context(|| format!("{}: not a radial profile", path.display()))
}

/// Dilated profiles use the radial format with f = φ and u = y.
pub fn write_dilated_csv(path: &Path, d: &DilatedState) -> Result<()> {
    write_table(path, &RADIAL_HEADER, d.phi.iter().zip(&d.y).map(|(&f, &u)| [f, u]))
}

pub fn write_log_csv(path: &Path, p: &LogProfile) -> Result<()> {
    write_table(path, &LOG_HEADER, p.r().iter().zip(p.phi()).map(|(&r, &phi)| [r, phi]))
}

pub fn read_log_csv(path: &Path) -> Result<LogProfile> {
    let (r, phi) = columns2(read_table(path, &LOG_HEADER)?);
    LogProfile::new(r, phi).with_context(|| format!("{}: not a log profile", path.display()))
}

pub fn write_curvature_csv(path: &Path, c: &CurvatureReport) -> Result<()> {
    let rows = (0..c.f.len()).map(|i| {
        [
            c.f[i],
            c.psi[i],
            c.lambda1[i],
            c.lambda2[i],
            c.scalar[i],
            c.rm[i][0],
            c.rm[i][1],
            c.rm[i][2],
        ]
    });
    write_table(path, &CURVATURE_HEADER, rows)
}

pub fn write_series_csv(path: &Path, series: &[SeriesRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SeriesRecord::COLUMNS)?;
    for r in series {
        let v = r.values();
        // The step counter is an integer column.
        let mut fields = vec![r.step.to_string()];
        fields.extend(v[1..].iter().map(|&x| fmt_num(x)));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv(path: &Path) -> Result<Vec<SeriesRecord>> {
    let rows = read_table(path, &SeriesRecord::COLUMNS)?;
    Ok(rows
        .iter()
        .map(|r| {
            let mut v = [0.0; 15];
            v.copy_from_slice(r);
            SeriesRecord::from_values(&v)
        })
        .collect())
}

pub fn write_violations_csv(path: &Path, log: &[BarrierViolation]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(VIOLATION_HEADER)?;
    for v in log {
        w.write_record([
            v.step.to_string(),
            fmt_num(v.tau),
            fmt_num(v.node_phi),
            v.kind.as_str().to_string(),
            fmt_num(v.deficit),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_anchors_csv(path: &Path, anchors: &[AnchorRecord]) -> Result<()> {
    let rows = anchors
        .iter()
        .map(|a| [a.tau, a.phi_star, a.rho_star, a.anchor_r, a.rho_two, a.gauge_c, a.log_fw]);
    write_table(path, &ANCHOR_HEADER, rows)
}

/// Writes `key=value` lines.
pub fn write_key_values(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    for (k, v) in pairs {
        writeln!(f, "{k}={v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_num(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn header_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_table(&p, &["r", "phi"], [[0.0, 1.0]]).unwrap();
        let err = read_table(&p, &RADIAL_HEADER).unwrap_err();
        assert!(err.to_string().contains("expected header `f,u`"));
    }
}
