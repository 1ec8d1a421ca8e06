use chrono::{DateTime, Duration, Utc};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("point {index}: coordinates ({lat}, {lon}) out of range")]
    InvalidCoordinate { index: usize, lat: f64, lon: f64 },
    #[error("trace timestamps must strictly increase (point {index})")]
    NotIncreasing { index: usize },
    #[error("report timestamps must not decrease (point {index})")]
    Unsorted { index: usize },
    #[error("trace is empty")]
    Empty,
    #[error("no report falls inside the ground-truth time range")]
    EmptyOverlap,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    pub time: DateTime<Utc>,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64, time: DateTime<Utc>) -> Self {
        Self { lat, lon, time }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Ground-truth track: valid coordinates, strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    points: Vec<GeoPoint>,
}

impl Trace {
    pub fn new(points: Vec<GeoPoint>) -> Result<Self, GeoError> {
        if points.is_empty() {
            return Err(GeoError::Empty);
        }
        check_coordinates(&points)?;
        if let Some(i) = points.windows(2).position(|w| w[1].time <= w[0].time) {
            return Err(GeoError::NotIncreasing { index: i + 1 });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<GeoPoint> {
        self.points
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.points[0].time
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.points[self.points.len() - 1].time
    }
}

pub(crate) fn check_coordinates(points: &[GeoPoint]) -> Result<(), GeoError> {
    match points.iter().position(|p| !p.is_valid()) {
        Some(index) => Err(GeoError::InvalidCoordinate { index, lat: points[index].lat, lon: points[index].lon }),
        None => Ok(()),
    }
}

/// Report streams may repeat a timestamp but must not go backwards.
pub fn check_reports(points: &[GeoPoint]) -> Result<(), GeoError> {
    check_coordinates(points)?;
    match points.windows(2).position(|w| w[1].time < w[0].time) {
        Some(i) => Err(GeoError::Unsorted { index: i + 1 }),
        None => Ok(()),
    }
}

/// Stable sort by timestamp.
pub fn sort_by_time(points: &mut [GeoPoint]) {
    points.sort_by_key(|p| p.time);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticsParams {
    /// Reports per LOWESS neighbourhood.
    pub lowess_window: usize,
    pub resample_interval: Duration,
    /// DBSCAN radius in meters.
    pub dbscan_radius: f64,
    pub dbscan_min_neighbors: usize,
}

impl Default for AnalyticsParams {
    fn default() -> Self {
        Self {
            lowess_window: 30,
            resample_interval: Duration::minutes(20),
            dbscan_radius: 50.0,
            dbscan_min_neighbors: 6,
        }
    }
}

impl AnalyticsParams {
    pub fn validate(&self) -> Result<(), GeoError> {
        if self.lowess_window == 0 {
            return Err(GeoError::InvalidParam("lowess window must be positive"));
        }
        if self.resample_interval <= Duration::zero() {
            return Err(GeoError::InvalidParam("resample interval must be positive"));
        }
        if !(self.dbscan_radius > 0.0) {
            return Err(GeoError::InvalidParam("dbscan radius must be positive"));
        }
        if self.dbscan_min_neighbors == 0 {
            return Err(GeoError::InvalidParam("dbscan min neighbours must be positive"));
        }
        Ok(())
    }
}

/// Seconds from `origin` to `t`, with millisecond resolution.
pub(crate) fn secs_since(origin: DateTime<Utc>, t: DateTime<Utc>) -> f64 {
    (t - origin).num_milliseconds() as f64 / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn at(s: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(1_600_000_000 + s, 0).unwrap()
    }

    #[test]
    fn trace_rules() {
        assert_eq!(Trace::new(vec![]), Err(GeoError::Empty));
        let dup = vec![GeoPoint::new(0.0, 0.0, at(0)), GeoPoint::new(0.0, 0.0, at(0))];
        assert_eq!(Trace::new(dup.clone()), Err(GeoError::NotIncreasing { index: 1 }));
        assert_eq!(check_reports(&dup), Ok(()));
        let back = vec![GeoPoint::new(0.0, 0.0, at(1)), GeoPoint::new(0.0, 0.0, at(0))];
        assert_eq!(check_reports(&back), Err(GeoError::Unsorted { index: 1 }));
        let bad = vec![GeoPoint::new(91.0, 0.0, at(0))];
        assert!(matches!(Trace::new(bad), Err(GeoError::InvalidCoordinate { index: 0, .. })));
    }

    #[test]
    fn default_params() {
        let p = AnalyticsParams::default();
        assert_eq!((p.lowess_window, p.resample_interval.num_minutes(), p.dbscan_radius, p.dbscan_min_neighbors), (30, 20, 50.0, 6));
        assert!(p.validate().is_ok());
        assert!(AnalyticsParams { dbscan_radius: 0.0, ..p }.validate().is_err());
    }
}
