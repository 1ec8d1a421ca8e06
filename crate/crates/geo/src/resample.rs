//! Flattening report density on the time axis.

use chrono::Duration;

use crate::point::GeoPoint;

/// Groups reports into consecutive bins of length `interval` starting at
/// the earliest report. Every non-empty bin becomes one point at the mean
/// coordinate, stamped with the bin centre.
pub fn resample(reports: &[GeoPoint], interval: Duration) -> Vec<GeoPoint> {
    let Some(origin) = reports.iter().map(|p| p.time).min() else {
        return Vec::new();
    };
    let width = interval.num_milliseconds().max(1);
    let mut bins: std::collections::BTreeMap<i64, (f64, f64, usize)> = Default::default();
    for p in reports {
        let k = (p.time - origin).num_milliseconds() / width;
        let e = bins.entry(k).or_insert((0.0, 0.0, 0));
        e.0 += p.lat;
        e.1 += p.lon;
        e.2 += 1;
    }
    bins.into_iter()
        .map(|(k, (lat, lon, n))| {
            let centre = origin + Duration::milliseconds(k * width + width / 2);
            GeoPoint::new(lat / n as f64, lon / n as f64, centre)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{DateTime, TimeZone, Utc};
    use proptest::prelude::*;

    fn at(s: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(1_600_000_000 + s, 0).unwrap()
    }

    #[test]
    fn one_bin_is_the_mean() {
        let pts = vec![GeoPoint::new(1.0, 2.0, at(0)), GeoPoint::new(3.0, 6.0, at(100)), GeoPoint::new(2.0, 4.0, at(1199))];
        let out = resample(&pts, Duration::minutes(20));
        assert_eq!(out, vec![GeoPoint::new(2.0, 4.0, at(600))]);
        assert!(resample(&[], Duration::minutes(20)).is_empty());
    }

    #[test]
    fn density_is_flattened() {
        let mut pts: Vec<_> = (0..10).map(|i| GeoPoint::new(5.0, 5.0, at(i * 60))).collect();
        pts.push(GeoPoint::new(6.0, 6.0, at(5000)));
        let out = resample(&pts, Duration::minutes(20));
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].time, at(4 * 1200 + 600));
    }

    #[test]
    fn week_of_uniform_reports_matches_brute_force() {
        let start = at(0);
        let pts: Vec<_> = (0..7 * 24 * 60 / 7).map(|i| GeoPoint::new(0.0, 0.0, start + Duration::minutes(i * 7))).collect();
        let out = resample(&pts, Duration::minutes(20));
        let mut seen = std::collections::BTreeSet::new();
        for p in &pts {
            seen.insert((p.time - start).num_seconds() / 1200);
        }
        assert_eq!(out.len(), seen.len());
    }

    proptest! {
        #[test]
        fn bounded_and_within_box(raw in proptest::collection::vec((0i64..20_000, -1.0f64..1.0, -1.0f64..1.0), 1..200)) {
            let pts: Vec<_> = raw.iter().map(|&(s, a, b)| GeoPoint::new(a, b, at(s))).collect();
            let out = resample(&pts, Duration::minutes(20));
            prop_assert!(out.len() <= pts.len());
            let origin = pts.iter().map(|p| p.time).min().unwrap();
            for o in &out {
                let k = (o.time - origin).num_seconds() / 1200;
                let members: Vec<_> = pts.iter().filter(|p| (p.time - origin).num_seconds() / 1200 == k).collect();
                prop_assert!(!members.is_empty());
                let (lo_lat, hi_lat) = members.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.lat), h.max(p.lat)));
                let (lo_lon, hi_lon) = members.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.lon), h.max(p.lon)));
                prop_assert!(o.lat >= lo_lat - 1e-12 && o.lat <= hi_lat + 1e-12);
                prop_assert!(o.lon >= lo_lon - 1e-12 && o.lon <= hi_lon + 1e-12);
            }
        }
    }
}
