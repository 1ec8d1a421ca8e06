#![allow(dead_code)]

use chrono::{DateTime, Duration, TimeZone, Utc};
use findnet_sim::config::{LatLon, TrackPoint};
use findnet_sim::{FinderConfig, LostDeviceConfig, ScenarioConfig, TrackSource};

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 3, 1, 9, 0, 0).unwrap()
}

pub fn parked(id: &str, owner: &str, at: LatLon, minutes: i64) -> LostDeviceConfig {
    LostDeviceConfig {
        id: id.into(),
        owner: owner.into(),
        trace: TrackSource::Points(vec![
            TrackPoint { time: t0(), lat: at.lat, lon: at.lon },
            TrackPoint { time: t0() + Duration::minutes(minutes), lat: at.lat, lon: at.lon },
        ]),
        creation_time: Some(t0()),
        status: 0,
    }
}

pub fn fixed(id: &str, at: LatLon) -> FinderConfig {
    FinderConfig { id: id.into(), position: TrackSource::Static(at) }
}

pub fn quick(mut cfg: ScenarioConfig) -> ScenarioConfig {
    cfg.upload_delay.median_s = 60.0;
    cfg.upload_delay.shape = 0.3;
    cfg
}

pub const HERE: LatLon = LatLon { lat: 49.8728, lon: 8.6512 };

pub fn meters_away(p: LatLon, north: f64, east: f64) -> LatLon {
    let (lat, lon) = findnet_sim::noise::offset(p.lat, p.lon, north, east);
    LatLon { lat, lon }
}
