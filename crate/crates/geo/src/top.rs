//! Ranking frequently visited places by estimated dwell time.

use std::collections::BTreeSet;

use chrono::{DateTime, Duration, Utc};

use crate::dbscan::dbscan;
use crate::point::{GeoError, GeoPoint, AnalyticsParams};
use crate::resample::resample;

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// 1-based.
    pub rank: usize,
    /// Resampled points, time-ordered.
    pub members: Vec<GeoPoint>,
    /// Mean coordinate; the timestamp is the first visit.
    pub center: GeoPoint,
    pub resampled_count: usize,
    /// Distinct UTC calendar dates among members.
    pub days_visited: usize,
    /// resampled_count × resample interval.
    pub dwell_time: Duration,
}

impl Cluster {
    pub fn first_visit(&self) -> DateTime<Utc> {
        self.members[0].time
    }

    pub fn dwell_minutes(&self) -> i64 {
        self.dwell_time.num_minutes()
    }

    fn from_members(members: Vec<GeoPoint>, interval: Duration) -> Self {
        let n = members.len();
        let lat = members.iter().map(|p| p.lat).sum::<f64>() / n as f64;
        let lon = members.iter().map(|p| p.lon).sum::<f64>() / n as f64;
        let days: BTreeSet<_> = members.iter().map(|p| p.time.date_naive()).collect();
        Self {
            rank: 0,
            center: GeoPoint::new(lat, lon, members[0].time),
            resampled_count: n,
            days_visited: days.len(),
            dwell_time: interval * n as i32,
            members,
        }
    }
}

/// Resample, cluster, and rank by dwell time (longest first), then member
/// count, then earliest first visit.
pub fn rank_top_locations(reports: &[GeoPoint], params: &AnalyticsParams) -> Result<Vec<Cluster>, GeoError> {
    params.validate()?;
    if reports.is_empty() {
        return Err(GeoError::Empty);
    }
    let resampled = resample(reports, params.resample_interval);
    let found = dbscan(&resampled, params.dbscan_radius, params.dbscan_min_neighbors);
    let mut clusters: Vec<Cluster> =
        found.clusters.into_iter().map(|m| Cluster::from_members(m, params.resample_interval)).collect();
    clusters.sort_by(|a, b| {
        b.dwell_time
            .cmp(&a.dwell_time)
            .then(b.resampled_count.cmp(&a.resampled_count))
            .then(a.first_visit().cmp(&b.first_visit()))
    });
    for (i, c) in clusters.iter_mut().enumerate() {
        c.rank = i + 1;
    }
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn single_place_is_rank_one() {
        let start = Utc.with_ymd_and_hms(2021, 5, 3, 23, 0, 0).unwrap();
        let pts: Vec<_> = (0..40)
            .map(|i| GeoPoint::new(50.0 + (i % 4) as f64 * 1e-5, 8.0, start + Duration::minutes(i * 10)))
            .collect();
        let top = rank_top_locations(&pts, &AnalyticsParams::default()).unwrap();
        assert_eq!(top.len(), 1);
        let c = &top[0];
        assert_eq!(c.rank, 1);
        assert_eq!(c.resampled_count, 20);
        assert_eq!(c.dwell_minutes(), 400);
        assert_eq!(c.days_visited, 2);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(rank_top_locations(&[], &AnalyticsParams::default()), Err(GeoError::Empty));
    }

    #[test]
    fn permutation_within_equal_timestamps_is_harmless() {
        let t = Utc.with_ymd_and_hms(2021, 5, 3, 8, 0, 0).unwrap();
        let mut pts = Vec::new();
        for i in 0..60 {
            let when = t + Duration::minutes((i / 3) * 20);
            pts.push(GeoPoint::new(50.0 + (i % 3) as f64 * 1e-4, 8.0, when));
        }
        let a = rank_top_locations(&pts, &AnalyticsParams::default()).unwrap();
        for chunk in pts.chunks_mut(3) {
            chunk.reverse();
        }
        let b = rank_top_locations(&pts, &AnalyticsParams::default()).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.rank, x.resampled_count, x.days_visited), (y.rank, y.resampled_count, y.days_visited));
            assert!((x.center.lat - y.center.lat).abs() < 1e-9 && (x.center.lon - y.center.lon).abs() < 1e-9);
        }
    }
}
