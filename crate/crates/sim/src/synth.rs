//! Synthetic traces and scenarios for tests and demos.

use chrono::{DateTime, Duration, TimeZone, Utc};
use findnet_geo::{GeoPoint, Trace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{FinderConfig, LatLon, LostDeviceConfig, ScenarioConfig, TrackPoint, TrackSource};
use crate::noise::offset;

pub const ORIGIN: LatLon = LatLon { lat: 49.8770, lon: 8.6550 };

pub fn default_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 3, 1, 9, 0, 0).unwrap()
}

/// A pedestrian path: legs of a few minutes at walking speed with gentle
/// turns between them, sampled every `step`.
pub fn walking_path(origin: LatLon, start: DateTime<Utc>, duration: Duration, step: Duration, seed: u64) -> Vec<GeoPoint> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let step_s = step.num_milliseconds() as f64 / 1000.0;
    let n = (duration.num_milliseconds() / step.num_milliseconds()) as usize;
    let (mut lat, mut lon) = (origin.lat, origin.lon);
    let mut heading: f64 = rng.gen_range(0.0..360.0);
    let mut speed = 1.4;
    let mut leg_left = 0.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(GeoPoint::new(lat, lon, start));
    for i in 1..=n {
        if leg_left <= 0.0 {
            heading += rng.gen_range(-70.0..70.0);
            speed = rng.gen_range(1.2..1.6);
            leg_left = rng.gen_range(120.0..480.0);
        }
        leg_left -= step_s;
        let d = speed * step_s;
        (lat, lon) = offset(lat, lon, d * heading.to_radians().cos(), d * heading.to_radians().sin());
        out.push(GeoPoint::new(lat, lon, start + step * i as i32));
    }
    out
}

/// `path` shifted by a constant offset, limited to `[from, to]`.
pub fn shifted(path: &[GeoPoint], north: f64, east: f64, from: DateTime<Utc>, to: DateTime<Utc>) -> Vec<TrackPoint> {
    path.iter()
        .filter(|p| p.time >= from && p.time <= to)
        .map(|p| {
            let (lat, lon) = offset(p.lat, p.lon, north, east);
            TrackPoint { time: p.time, lat, lon }
        })
        .collect()
}

fn to_track(path: &[GeoPoint]) -> Vec<TrackPoint> {
    path.iter().map(|p| TrackPoint { time: p.time, lat: p.lat, lon: p.lon }).collect()
}

/// One device walking for 55 minutes with three companions carrying
/// finders 10 to 20 m away for the whole walk, plus `passers_by` finders
/// that walk alongside for 5 to 15 minutes each.
pub fn walking_scenario(seed: u64, passers_by: usize) -> (ScenarioConfig, Trace) {
    let start = default_start();
    let end = start + Duration::minutes(55);
    let path = walking_path(ORIGIN, start, Duration::minutes(55), Duration::seconds(5), seed);
    let mut finders = vec![
        FinderConfig { id: "companion-1".into(), position: TrackSource::Points(shifted(&path, 10.0, 0.0, start, end)) },
        FinderConfig { id: "companion-2".into(), position: TrackSource::Points(shifted(&path, -8.0, 12.0, start, end)) },
        FinderConfig { id: "companion-3".into(), position: TrackSource::Points(shifted(&path, 0.0, -20.0, start, end)) },
    ];
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    for i in 0..passers_by {
        let r = 20.0 * rng.gen::<f64>().sqrt();
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let from = start + Duration::seconds(rng.gen_range(0..50 * 60));
        let to = (from + Duration::seconds(rng.gen_range(5 * 60..15 * 60))).min(end);
        let pts = shifted(&path, r * a.cos(), r * a.sin(), from, to);
        if pts.len() >= 2 {
            finders.push(FinderConfig { id: format!("passer-{i}"), position: TrackSource::Points(pts) });
        }
    }
    let device = LostDeviceConfig {
        id: "tag".into(),
        owner: "owner-token".into(),
        trace: TrackSource::Points(to_track(&path)),
        creation_time: Some(start),
        status: 0,
    };
    let mut cfg = ScenarioConfig::new(vec![device], finders, seed);
    cfg.gps_noise_sigma_m = 60.0;
    (cfg, Trace::new(path).expect("strictly increasing"))
}

fn parked(id: &str, owner: &str, at: LatLon, from: DateTime<Utc>, minutes: i64) -> LostDeviceConfig {
    let end = from + Duration::minutes(minutes);
    LostDeviceConfig {
        id: id.into(),
        owner: owner.into(),
        trace: TrackSource::Points(vec![
            TrackPoint { time: from, lat: at.lat, lon: at.lon },
            TrackPoint { time: end, lat: at.lat, lon: at.lon },
        ]),
        creation_time: Some(from),
        status: 0,
    }
}

/// Two owners' devices parked 30 m apart for 20 minutes. With `shared`
/// a single finder sits between them; otherwise the second device is
/// 3 km away and each device has its own finder.
pub fn correlation_topology(shared: bool, seed: u64) -> ScenarioConfig {
    let start = default_start();
    let second = if shared { offset(ORIGIN.lat, ORIGIN.lon, 0.0, 30.0) } else { offset(ORIGIN.lat, ORIGIN.lon, 0.0, 3000.0) };
    let second = LatLon { lat: second.0, lon: second.1 };
    let devices = vec![parked("tag-1", "owner-1", ORIGIN, start, 20), parked("tag-2", "owner-2", second, start, 20)];
    let near = |p: LatLon, east: f64| {
        let (lat, lon) = offset(p.lat, p.lon, 0.0, east);
        TrackSource::Static(LatLon { lat, lon })
    };
    let finders = if shared {
        vec![FinderConfig { id: "finder".into(), position: near(ORIGIN, 15.0) }]
    } else {
        vec![
            FinderConfig { id: "finder".into(), position: near(ORIGIN, -15.0) },
            FinderConfig { id: "finder-2".into(), position: near(second, 15.0) },
        ]
    };
    let mut cfg = ScenarioConfig::new(devices, finders, seed);
    cfg.upload_delay.median_s = 60.0;
    cfg.upload_delay.shape = 0.3;
    cfg
}

#[derive(Debug, Clone)]
pub struct PlantedPlace {
    pub at: LatLon,
    pub visits: Vec<(DateTime<Utc>, DateTime<Utc>)>,
}

impl PlantedPlace {
    pub fn dwell(&self) -> Duration {
        self.visits.iter().map(|(a, b)| *b - *a).fold(Duration::zero(), |x, y| x + y)
    }
}

/// A week with three regularly visited places (43 h, 8 h and 3 h in
/// total). While at a place a report arrives every 3 to 7 minutes with
/// `noise_m` Gaussian error; a few scattered reports come from elsewhere.
pub fn planted_week(seed: u64, noise_m: f64) -> (Vec<GeoPoint>, Vec<PlantedPlace>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let monday = Utc.with_ymd_and_hms(2021, 5, 3, 0, 0, 0).unwrap();
    let at = |d: i64, h: i64, m: i64| monday + Duration::days(d) + Duration::hours(h) + Duration::minutes(m);
    let home = LatLon { lat: 49.8728, lon: 8.6512 };
    let (lat, lon) = offset(home.lat, home.lon, 1400.0, 1400.0);
    let work = LatLon { lat, lon };
    let (lat, lon) = offset(home.lat, home.lon, -1000.0, 300.0);
    let gym = LatLon { lat, lon };

    let places = vec![
        // six nights of 7 h 10 min
        PlantedPlace { at: home, visits: (0..6).map(|d| (at(d, 22, 0), at(d + 1, 5, 10))).collect() },
        PlantedPlace { at: work, visits: vec![(at(1, 9, 0), at(1, 13, 0)), (at(3, 9, 0), at(3, 13, 0))] },
        PlantedPlace { at: gym, visits: vec![(at(2, 18, 0), at(2, 19, 30)), (at(4, 18, 0), at(4, 19, 30))] },
    ];

    let noise = Normal::new(0.0, noise_m).expect("finite noise");
    let mut reports = Vec::new();
    for place in &places {
        for &(a, b) in &place.visits {
            let mut t = a + Duration::seconds(rng.gen_range(0..240));
            while t < b {
                let (lat, lon) = offset(place.at.lat, place.at.lon, noise.sample(&mut rng), noise.sample(&mut rng));
                reports.push(GeoPoint::new(lat, lon, t));
                t += Duration::seconds(rng.gen_range(180..420));
            }
        }
    }
    // isolated reports, kilometres apart
    for _ in 0..25 {
        let t = monday + Duration::seconds(rng.gen_range(0..7 * 86_400));
        let (lat, lon) = offset(home.lat, home.lon, rng.gen_range(3000.0..9000.0), rng.gen_range(-9000.0..9000.0));
        reports.push(GeoPoint::new(lat, lon, t));
    }
    reports.sort_by_key(|p| p.time);
    (reports, places)
}
