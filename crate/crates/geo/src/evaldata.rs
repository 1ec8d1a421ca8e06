//! Loader for externally supplied evaluation data (ground-truth GPS tracks
//! and location reports per scenario).
//!
//! Any CSV below the data directory whose path names a scenario is
//! considered. Paths mentioning `gps`, `truth` or `ground` are ground
//! truth; paths mentioning `report` are reports. Columns are found by
//! header name and timestamps may be RFC 3339, `YYYY-MM-DD HH:MM:SS[.f]`
//! (taken as UTC), or Unix seconds / milliseconds.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};

use crate::export::{parse_time, ExportError};
use crate::point::{check_coordinates, sort_by_time, GeoError, GeoPoint, Trace};

pub const SCENARIOS: [&str; 3] = ["walking", "restaurant", "train"];

#[derive(Debug, thiserror::Error)]
pub enum EvalDataError {
    #[error("{0}: no file for scenario `{1}` ({2})")]
    Missing(PathBuf, String, &'static str),
    #[error("{0}: {1}")]
    Columns(PathBuf, String),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: ExportError },
    #[error("{path}: {source}")]
    Geo { path: PathBuf, source: GeoError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ScenarioData {
    pub name: String,
    pub gps: Trace,
    pub reports: Vec<GeoPoint>,
}

fn csv_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            csv_files(&path, out)?;
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            out.push(path);
        }
    }
    Ok(())
}

fn column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers.iter().position(|h| {
        let h = h.trim().to_ascii_lowercase();
        names.iter().any(|n| h == *n)
    })
}

pub fn parse_flexible_time(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Some(t) = parse_time(s) {
        return Some(t);
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f", "%Y/%m/%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Utc.from_utc_datetime(&t));
        }
    }
    let x: f64 = s.parse().ok()?;
    let ms = if x.abs() < 1e11 { x * 1000.0 } else { x };
    Utc.timestamp_millis_opt(ms.round() as i64).single()
}

/// Reads any CSV with recognisable time, latitude and longitude columns.
pub fn read_points(path: &Path) -> Result<Vec<GeoPoint>, EvalDataError> {
    let read_err = |e: csv::Error| EvalDataError::Read { path: path.to_owned(), source: e.into() };
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_path(path).map_err(read_err)?;
    let headers = r.headers().map_err(read_err)?.clone();
    let cols = (
        column(&headers, &["timestamp_iso8601", "timestamp", "time", "datetime", "date", "isodatetime", "published"]),
        column(&headers, &["lat", "latitude"]),
        column(&headers, &["lon", "lng", "long", "longitude"]),
    );
    let (Some(tc), Some(lac), Some(loc)) = cols else {
        return Err(EvalDataError::Columns(path.to_owned(), format!("unrecognised header {:?}", headers)));
    };
    let mut pts = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(read_err)?;
        let row_err = |what: &str| EvalDataError::Read {
            path: path.to_owned(),
            source: ExportError::Row { row: i + 2, reason: what.to_owned() },
        };
        let time = rec.get(tc).and_then(parse_flexible_time).ok_or_else(|| row_err("bad timestamp"))?;
        let lat = rec.get(lac).and_then(|v| v.parse().ok()).ok_or_else(|| row_err("bad latitude"))?;
        let lon = rec.get(loc).and_then(|v| v.parse().ok()).ok_or_else(|| row_err("bad longitude"))?;
        pts.push(GeoPoint::new(lat, lon, time));
    }
    check_coordinates(&pts).map_err(|source| EvalDataError::Geo { path: path.to_owned(), source })?;
    sort_by_time(&mut pts);
    Ok(pts)
}

fn pick<'a>(files: &'a [PathBuf], scenario: &str, markers: &[&str]) -> Option<&'a PathBuf> {
    files.iter().find(|p| {
        let s = p.to_string_lossy().to_ascii_lowercase();
        s.contains(scenario) && markers.iter().any(|m| s.contains(m))
    })
}

pub fn load_scenario(dir: &Path, scenario: &str) -> Result<ScenarioData, EvalDataError> {
    let mut files = Vec::new();
    csv_files(dir, &mut files)?;
    files.sort();
    let gps_path = pick(&files, scenario, &["gps", "truth", "ground"])
        .ok_or_else(|| EvalDataError::Missing(dir.to_owned(), scenario.into(), "ground truth"))?;
    let reports_path = files
        .iter()
        .filter(|p| *p != gps_path)
        .find(|p| {
            let s = p.to_string_lossy().to_ascii_lowercase();
            s.contains(scenario) && s.contains("report")
        })
        .ok_or_else(|| EvalDataError::Missing(dir.to_owned(), scenario.into(), "reports"))?;

    let mut gps = read_points(gps_path)?;
    gps.dedup_by_key(|p| p.time);
    let gps = Trace::new(gps).map_err(|source| EvalDataError::Geo { path: gps_path.clone(), source })?;
    let reports = read_points(reports_path)?;
    Ok(ScenarioData { name: scenario.to_owned(), gps, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_formats() {
        let expect = Utc.with_ymd_and_hms(2020, 9, 1, 12, 0, 0).unwrap();
        for s in ["2020-09-01T12:00:00Z", "2020-09-01 12:00:00", "2020-09-01T14:00:00+02:00", "1598961600", "1598961600000"] {
            assert_eq!(parse_flexible_time(s), Some(expect), "{s}");
        }
        assert_eq!(parse_flexible_time("soon"), None);
    }

    #[test]
    fn loads_scenario_directory() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("walking");
        fs::create_dir(&sub).unwrap();
        fs::write(sub.join("gps.csv"), "Time,Latitude,Longitude\n1598961600,49.1,8.1\n1598961600,49.1,8.1\n1598961610,49.2,8.2\n").unwrap();
        fs::write(sub.join("reports.csv"), "timestamp,lat,lng\n2020-09-01 12:00:05,49.15,8.15\n").unwrap();
        let s = load_scenario(dir.path(), "walking").unwrap();
        assert_eq!(s.gps.points().len(), 2);
        assert_eq!(s.reports.len(), 1);
        assert!(matches!(load_scenario(dir.path(), "train"), Err(EvalDataError::Missing(..))));
    }
}
