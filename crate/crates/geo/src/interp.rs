//! Ground-truth interpolation and report error against it.

use chrono::{DateTime, Utc};

use crate::geodesic::geodesic_distance;
use crate::point::{secs_since, GeoError, GeoPoint, Trace};

#[derive(Debug, Clone, PartialEq)]
pub struct Interpolated {
    pub points: Vec<GeoPoint>,
    /// Requested times outside the trace's time range.
    pub excluded: Vec<DateTime<Utc>>,
}

/// Linear interpolation of latitude and longitude independently.
pub fn interpolate_at(gps: &Trace, t: DateTime<Utc>) -> Option<GeoPoint> {
    let pts = gps.points();
    if t < gps.start() || t > gps.end() {
        return None;
    }
    let hi = pts.partition_point(|p| p.time < t);
    let b = pts[hi];
    if b.time == t || hi == 0 {
        return Some(GeoPoint { time: t, ..b });
    }
    let a = pts[hi - 1];
    let f = secs_since(a.time, t) / secs_since(a.time, b.time);
    Some(GeoPoint::new(a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon), t))
}

pub fn interpolate_trace(gps: &Trace, at: &[DateTime<Utc>]) -> Interpolated {
    let mut out = Interpolated { points: Vec::with_capacity(at.len()), excluded: Vec::new() };
    for &t in at {
        match interpolate_at(gps, t) {
            Some(p) => out.points.push(p),
            None => out.excluded.push(t),
        }
    }
    out
}

/// Per-report distance to the interpolated ground truth; reports outside
/// the trace's time range are skipped.
pub fn report_errors(reports: &[GeoPoint], gps: &Trace) -> Vec<f64> {
    reports
        .iter()
        .filter_map(|r| interpolate_at(gps, r.time).map(|truth| geodesic_distance(r, &truth)))
        .collect()
}

/// Mean geodesic distance between each report and the ground truth at its time.
pub fn mean_error(reports: &[GeoPoint], gps: &Trace) -> Result<f64, GeoError> {
    let errors = report_errors(reports, gps);
    if errors.is_empty() {
        return Err(GeoError::EmptyOverlap);
    }
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}
