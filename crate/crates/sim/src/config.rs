//! Scenario description, loadable from JSON with CSV trace references.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use findnet_geo::export::import_csv;
use findnet_geo::{GeoPoint, Trace};
use serde::{Deserialize, Serialize};

use crate::engine::SimError;

pub const DEFAULT_BLE_RANGE_M: f64 = 50.0;
pub const DEFAULT_ADVERT_INTERVAL_S: f64 = 2.0;
pub const DEFAULT_KEY_WINDOW_S: i64 = 900;
pub const DEFAULT_UPLOAD_MEDIAN_S: f64 = 26.0 * 60.0;
pub const DEFAULT_UPLOAD_SHAPE: f64 = 1.0;
pub const DEFAULT_PER_KEY_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub time: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
}

/// Where something is over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackSource {
    Static(LatLon),
    Points(Vec<TrackPoint>),
    /// `timestamp_iso8601,lat,lon` file, relative to the scenario file.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LostDeviceConfig {
    pub id: String,
    /// Token the owner presents when fetching.
    pub owner: String,
    pub trace: TrackSource,
    /// Defaults to the first trace timestamp.
    #[serde(default)]
    pub creation_time: Option<DateTime<Utc>>,
    #[serde(default)]
    pub status: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinderConfig {
    pub id: String,
    pub position: TrackSource,
}

/// Records frames heard at `capture` and re-broadcasts them verbatim at
/// `replay` after `offset_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayConfig {
    pub capture: LatLon,
    pub replay: LatLon,
    pub offset_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UploadDelayConfig {
    pub median_s: f64,
    /// Sigma of the underlying normal.
    pub shape: f64,
}

impl Default for UploadDelayConfig {
    fn default() -> Self {
        Self { median_s: DEFAULT_UPLOAD_MEDIAN_S, shape: DEFAULT_UPLOAD_SHAPE }
    }
}

fn d_range() -> f64 {
    DEFAULT_BLE_RANGE_M
}
fn d_interval() -> f64 {
    DEFAULT_ADVERT_INTERVAL_S
}
fn d_window() -> i64 {
    DEFAULT_KEY_WINDOW_S
}
fn d_cap() -> usize {
    DEFAULT_PER_KEY_CAP
}
fn d_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub lost_devices: Vec<LostDeviceConfig>,
    pub finders: Vec<FinderConfig>,
    #[serde(default = "d_range")]
    pub ble_range_m: f64,
    #[serde(default = "d_interval")]
    pub advert_interval_s: f64,
    #[serde(default = "d_window")]
    pub key_window_s: i64,
    #[serde(default)]
    pub gps_noise_sigma_m: f64,
    #[serde(default)]
    pub upload_delay: UploadDelayConfig,
    #[serde(default = "d_cap")]
    pub per_key_cap: usize,
    /// Chance that a finder misses any one frame.
    #[serde(default)]
    pub drop_probability: f64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub relays: Vec<RelayConfig>,
    /// Off models a server that does not authenticate fetches.
    #[serde(default = "d_true")]
    pub record_owner_tokens: bool,
}

impl ScenarioConfig {
    pub fn new(lost_devices: Vec<LostDeviceConfig>, finders: Vec<FinderConfig>, rng_seed: u64) -> Self {
        Self {
            lost_devices,
            finders,
            ble_range_m: DEFAULT_BLE_RANGE_M,
            advert_interval_s: DEFAULT_ADVERT_INTERVAL_S,
            key_window_s: DEFAULT_KEY_WINDOW_S,
            gps_noise_sigma_m: 0.0,
            upload_delay: UploadDelayConfig::default(),
            per_key_cap: DEFAULT_PER_KEY_CAP,
            drop_probability: 0.0,
            rng_seed,
            relays: Vec::new(),
            record_owner_tokens: true,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(path.to_owned(), e))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| SimError::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    /// Makes relative CSV references absolute with respect to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |src: &mut TrackSource| {
            if let TrackSource::Csv(p) = src {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        self.lost_devices.iter_mut().for_each(|d| fix(&mut d.trace));
        self.finders.iter_mut().for_each(|f| fix(&mut f.position));
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Config(m.to_owned()));
        if self.lost_devices.is_empty() {
            return bad("no lost devices");
        }
        if !(self.ble_range_m > 0.0) {
            return bad("ble_range_m must be positive");
        }
        if !(self.advert_interval_s > 0.0) {
            return bad("advert_interval_s must be positive");
        }
        if self.key_window_s != DEFAULT_KEY_WINDOW_S {
            return bad("key_window_s is fixed at 900 by the key schedule");
        }
        if !(self.gps_noise_sigma_m >= 0.0) {
            return bad("gps_noise_sigma_m must be non-negative");
        }
        if !(self.upload_delay.median_s > 0.0) || !(self.upload_delay.shape >= 0.0) {
            return bad("upload delay needs a positive median and non-negative shape");
        }
        if !(0.0..=1.0).contains(&self.drop_probability) {
            return bad("drop_probability must lie in [0, 1]");
        }
        if self.relays.iter().any(|r| !(r.offset_s >= 0.0)) {
            return bad("relay offset must be non-negative");
        }
        Ok(())
    }
}

/// Position over time, resolved from a [`TrackSource`].
#[derive(Debug, Clone)]
pub enum Track {
    Static(LatLon),
    Moving(Trace),
}

impl Track {
    pub fn load(src: &TrackSource) -> Result<Self, SimError> {
        let points = match src {
            TrackSource::Static(p) => return Ok(Track::Static(*p)),
            TrackSource::Points(pts) => pts.iter().map(|p| GeoPoint::new(p.lat, p.lon, p.time)).collect(),
            TrackSource::Csv(path) => {
                let f = std::fs::File::open(path).map_err(|e| SimError::Io(path.clone(), e))?;
                import_csv(f).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?
            }
        };
        Ok(Track::Moving(Trace::new(points)?))
    }

    pub fn at(&self, t: DateTime<Utc>) -> Option<LatLon> {
        match self {
            Track::Static(p) => Some(*p),
            Track::Moving(trace) => {
                findnet_geo::interp::interpolate_at(trace, t).map(|p| LatLon { lat: p.lat, lon: p.lon })
            }
        }
    }

    pub fn span(&self) -> Option<(DateTime<Utc>, DateTime<Utc>)> {
        match self {
            Track::Static(_) => None,
            Track::Moving(t) => Some((t.start(), t.end())),
        }
    }
}
