//! CSV and GeoJSON import/export. Coordinates are written with 7 decimals.
//!
//! CSV columns: `timestamp_iso8601,lat,lon`.
//! GeoJSON: one LineString per trace (Point when it has a single sample)
//! with a parallel `timestamps` property, and one Point per cluster with
//! `rank`, `dwell_time` (minutes), `days` and `resampled_count`.

use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use serde_json::{json, Value};
use thiserror::Error;

use crate::point::GeoPoint;
use crate::top::Cluster;

pub const CSV_HEADER: [&str; 3] = ["timestamp_iso8601", "lat", "lon"];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("expected CSV header `timestamp_iso8601,lat,lon`, found `{0}`")]
    Header(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("GeoJSON: {0}")]
    GeoJson(String),
}

fn round7(x: f64) -> f64 {
    (x * 1e7).round() / 1e7
}

fn iso(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn parse_time(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s.trim()).ok().map(|t| t.with_timezone(&Utc))
}

pub fn export_csv<W: Write>(points: &[GeoPoint], out: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in points {
        w.write_record([iso(p.time), format!("{:.7}", p.lat), format!("{:.7}", p.lon)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn import_csv<R: Read>(input: R) -> Result<Vec<GeoPoint>, ExportError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(ExportError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |reason: &str| ExportError::Row { row, reason: reason.to_owned() };
        let time = parse_time(&rec[0]).ok_or_else(|| bad("bad timestamp"))?;
        let lat: f64 = rec[1].parse().map_err(|_| bad("bad latitude"))?;
        let lon: f64 = rec[2].parse().map_err(|_| bad("bad longitude"))?;
        let p = GeoPoint::new(lat, lon, time);
        if !p.is_valid() {
            return Err(bad("coordinates out of range"));
        }
        out.push(p);
    }
    Ok(out)
}

fn position(p: &GeoPoint) -> Value {
    json!([round7(p.lon), round7(p.lat)])
}

/// Named tracks plus ranked clusters as one FeatureCollection.
pub fn to_geojson(traces: &[(&str, &[GeoPoint])], clusters: &[Cluster]) -> Value {
    let mut features = Vec::new();
    for (name, pts) in traces {
        if pts.is_empty() {
            continue;
        }
        let geometry = if pts.len() == 1 {
            json!({"type": "Point", "coordinates": position(&pts[0])})
        } else {
            json!({"type": "LineString", "coordinates": pts.iter().map(position).collect::<Vec<_>>()})
        };
        features.push(json!({
            "type": "Feature",
            "geometry": geometry,
            "properties": {
                "kind": "trace",
                "name": name,
                "timestamps": pts.iter().map(|p| iso(p.time)).collect::<Vec<_>>(),
            },
        }));
    }
    for c in clusters {
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": position(&c.center)},
            "properties": {
                "kind": "cluster",
                "rank": c.rank,
                "dwell_time": c.dwell_minutes(),
                "days": c.days_visited,
                "resampled_count": c.resampled_count,
                "first_visit": iso(c.first_visit()),
            },
        }));
    }
    json!({"type": "FeatureCollection", "features": features})
}

pub fn export_geojson<W: Write>(traces: &[(&str, &[GeoPoint])], clusters: &[Cluster], mut out: W) -> Result<(), ExportError> {
    serde_json::to_writer_pretty(&mut out, &to_geojson(traces, clusters))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// A cluster as read back from GeoJSON.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    pub rank: usize,
    pub lat: f64,
    pub lon: f64,
    pub dwell_minutes: i64,
    pub days: usize,
    pub resampled_count: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeoJsonContents {
    pub traces: Vec<(String, Vec<GeoPoint>)>,
    pub clusters: Vec<ClusterSummary>,
}

pub fn import_geojson<R: Read>(input: R) -> Result<GeoJsonContents, ExportError> {
    let doc: Value = serde_json::from_reader(input)?;
    let err = |m: &str| ExportError::GeoJson(m.to_owned());
    let features = doc["features"].as_array().ok_or_else(|| err("missing features"))?;
    let mut out = GeoJsonContents::default();
    let lonlat = |v: &Value| -> Option<(f64, f64)> { Some((v[0].as_f64()?, v[1].as_f64()?)) };
    for f in features {
        let props = &f["properties"];
        let geom = &f["geometry"];
        match props["kind"].as_str() {
            Some("trace") => {
                let coords: Vec<(f64, f64)> = match geom["type"].as_str() {
                    Some("LineString") => geom["coordinates"]
                        .as_array()
                        .ok_or_else(|| err("bad LineString"))?
                        .iter()
                        .map(lonlat)
                        .collect::<Option<_>>()
                        .ok_or_else(|| err("bad position"))?,
                    Some("Point") => vec![lonlat(&geom["coordinates"]).ok_or_else(|| err("bad position"))?],
                    _ => return Err(err("unexpected trace geometry")),
                };
                let times = props["timestamps"].as_array().ok_or_else(|| err("trace without timestamps"))?;
                if times.len() != coords.len() {
                    return Err(err("timestamps and coordinates differ in length"));
                }
                let pts = coords
                    .into_iter()
                    .zip(times)
                    .map(|((lon, lat), t)| Some(GeoPoint::new(lat, lon, parse_time(t.as_str()?)?)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| err("bad timestamp"))?;
                out.traces.push((props["name"].as_str().unwrap_or_default().to_owned(), pts));
            }
            Some("cluster") => {
                let (lon, lat) = lonlat(&geom["coordinates"]).ok_or_else(|| err("bad position"))?;
                let num = |k: &str| props[k].as_i64().ok_or_else(|| err("cluster property missing"));
                out.clusters.push(ClusterSummary {
                    rank: num("rank")? as usize,
                    lat,
                    lon,
                    dwell_minutes: num("dwell_time")?,
                    days: num("days")? as usize,
                    resampled_count: num("resampled_count")? as usize,
                });
            }
            _ => {}
        }
    }
    Ok(out)
}
