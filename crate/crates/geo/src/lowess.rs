//! Locally weighted linear regression of latitude and longitude on time.
//!
//! For each report, the `window` reports nearest in time form the
//! neighbourhood. Weights are Gaussian in the time offset with σ equal to
//! the largest offset in the neighbourhood, and a degree-1 fit evaluated
//! at the report's own time replaces its coordinates.

use crate::point::{check_reports, secs_since, GeoError, GeoPoint};

pub const MIN_POINTS: usize = 3;

/// Smoothed copy of `reports` (time-ordered); timestamps are unchanged.
/// With fewer than `window` reports every report is in every neighbourhood.
pub fn lowess_estimate(reports: &[GeoPoint], window: usize) -> Result<Vec<GeoPoint>, GeoError> {
    if window == 0 {
        return Err(GeoError::InvalidParam("lowess window must be positive"));
    }
    if reports.len() < MIN_POINTS {
        return Err(GeoError::TooFewPoints { needed: MIN_POINTS, got: reports.len() });
    }
    check_reports(reports)?;
    let origin = reports[0].time;
    let t: Vec<f64> = reports.iter().map(|p| secs_since(origin, p.time)).collect();
    let k = window.min(reports.len());

    let mut out = Vec::with_capacity(reports.len());
    let mut lo = 0;
    for (i, p) in reports.iter().enumerate() {
        lo = nearest_start(&t, i, k, lo);
        let hi = lo + k;
        let ts = &t[lo..hi];
        let sigma = ts.iter().map(|tj| (tj - t[i]).abs()).fold(0.0, f64::max);
        let weights: Vec<f64> = ts
            .iter()
            .map(|tj| if sigma > 0.0 { (-0.5 * ((tj - t[i]) / sigma).powi(2)).exp() } else { 1.0 })
            .collect();
        let lat = local_linear(ts, &reports[lo..hi], |q| q.lat, &weights, t[i]);
        let lon = local_linear(ts, &reports[lo..hi], |q| q.lon, &weights, t[i]);
        out.push(GeoPoint::new(lat, lon, p.time));
    }
    Ok(out)
}

/// Start of the contiguous run of `k` indices nearest to `t[i]` in time;
/// on ties the earlier index wins. The start never moves left as `i`
/// grows, so the previous start is a valid lower bound.
fn nearest_start(t: &[f64], i: usize, k: usize, prev: usize) -> usize {
    let mut lo = prev.max((i + 1).saturating_sub(k));
    while lo + k < t.len() && lo < i && t[lo + k] - t[i] < t[i] - t[lo] {
        lo += 1;
    }
    lo
}

fn local_linear(ts: &[f64], pts: &[GeoPoint], coord: impl Fn(&GeoPoint) -> f64, w: &[f64], at: f64) -> f64 {
    let sw: f64 = w.iter().sum();
    let tbar = ts.iter().zip(w).map(|(t, w)| t * w).sum::<f64>() / sw;
    let ybar = pts.iter().zip(w).map(|(p, w)| coord(p) * w).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((t, p), w) in ts.iter().zip(pts).zip(w) {
        let dt = t - tbar;
        sxx += w * dt * dt;
        sxy += w * dt * (coord(p) - ybar);
    }
    // A neighbourhood spanning a single instant has no slope.
    if sxx <= f64::EPSILON * sw * (1.0 + tbar * tbar) {
        return ybar;
    }
    ybar + (sxy / sxx) * (at - tbar)
}
