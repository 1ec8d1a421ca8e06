//! The event loop.
//!
//! Pending work sits in a min-heap ordered by (time, sequence number), so
//! the run is a pure function of the configuration and its seed.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use findnet_core::advert::{decode_advert, encode_advert, AdvertPayloadFields, BleFrame, FRAME_LEN};
use findnet_core::clock::ManualClock;
use findnet_core::endpoint::{EndpointError, InProcessEndpoint, ReportEndpoint};
use findnet_core::keys::{key_at, KeyError, KeyId, KEY_WINDOW_SECS};
use findnet_core::report::{encrypt_report, ReportError};
use findnet_core::store::{ReportStore, StoreConfig};
use findnet_core::time::from_unix_ms;
use findnet_core::wire::{SubmitBatch, SubmitEntry};
use findnet_core::{generate_master, LocationMessage, MasterBeaconKey};
use findnet_geo::geodesic::distance_m;
use findnet_geo::GeoError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::{LatLon, ScenarioConfig, Track};
use crate::delay::UploadDelay;
use crate::noise::perturb;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("trace: {0}")]
    Trace(#[from] GeoError),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
}

/// Server time that follows the simulation, moved before each upload.
pub trait SimClock {
    fn set_ms(&self, now_ms: i64) -> Result<(), SimError>;
}

impl SimClock for ManualClock {
    fn set_ms(&self, now_ms: i64) -> Result<(), SimError> {
        self.set(now_ms);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    AdvertEmitted { device: String, key_index: u32, frame: String },
    AdvertRelayed { relay: usize, source_seq: u64, frame: String },
    AdvertReceived { finder: String, key_id: String, source_seq: u64 },
    ReportGenerated { finder: String, key_id: String, received_seq: u64, lat: f64, lon: f64 },
    BatchUploaded { finder: String, count: usize },
    FetchPerformed { owner: String, keys: usize, results: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEvent {
    pub time_ms: i64,
    pub seq: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl SimEvent {
    pub fn time(&self) -> DateTime<Utc> {
        from_unix_ms(self.time_ms)
    }
}

#[derive(Debug, Clone)]
pub struct DeviceKeys {
    pub id: String,
    pub owner: String,
    pub master: MasterBeaconKey,
    pub active: (DateTime<Utc>, DateTime<Utc>),
}

/// What a run leaves behind, independent of the endpoint used.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub log: Vec<SimEvent>,
    pub devices: Vec<DeviceKeys>,
    pub start_ms: i64,
    pub end_ms: i64,
}

/// A run against a private in-process server.
pub struct SimOutcome {
    pub run: SimRun,
    pub store: Arc<ReportStore>,
    pub clock: Arc<ManualClock>,
    pub endpoint: InProcessEndpoint,
}

impl SimOutcome {
    pub fn log(&self) -> &[SimEvent] {
        &self.run.log
    }

    pub fn devices(&self) -> &[DeviceKeys] {
        &self.run.devices
    }
}

#[derive(Debug)]
enum Pending {
    Emit { device: usize, n: i64 },
    Replay { relay: usize, source_seq: u64, frame: [u8; FRAME_LEN] },
    Upload { finder: usize },
}

struct Queued {
    time_ms: i64,
    seq: u64,
    what: Pending,
}

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        (self.time_ms, self.seq) == (o.time_ms, o.seq)
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.time_ms, self.seq).cmp(&(o.time_ms, o.seq))
    }
}

struct Device {
    cfg_index: usize,
    track: Track,
    start_ms: i64,
    end_ms: i64,
    keys: DeviceKeys,
    status: u8,
}

#[derive(Default)]
struct FinderState {
    sent_per_key: HashMap<KeyId, usize>,
    batch: Vec<SubmitEntry>,
    upload_pending: bool,
}

struct Engine<'a> {
    cfg: &'a ScenarioConfig,
    endpoint: &'a dyn ReportEndpoint,
    clock: Option<&'a dyn SimClock>,
    rng: ChaCha20Rng,
    delay: UploadDelay,
    devices: Vec<Device>,
    finders: Vec<(String, Track)>,
    finder_state: Vec<FinderState>,
    heap: BinaryHeap<Reverse<Queued>>,
    next_seq: u64,
    log: Vec<SimEvent>,
    interval_ms: i64,
}

impl Engine<'_> {
    fn seq(&mut self) -> u64 {
        let s = self.next_seq;
        self.next_seq += 1;
        s
    }

    fn schedule(&mut self, time_ms: i64, what: Pending) {
        let seq = self.seq();
        self.heap.push(Reverse(Queued { time_ms, seq, what }));
    }

    fn record(&mut self, time_ms: i64, kind: EventKind) -> u64 {
        let seq = self.seq();
        self.log.push(SimEvent { time_ms, seq, kind });
        seq
    }

    fn run(mut self) -> Result<SimRun, SimError> {
        for d in 0..self.devices.len() {
            let start = self.devices[d].start_ms;
            self.schedule(start, Pending::Emit { device: d, n: 0 });
        }
        let mut last = self.devices.iter().map(|d| d.start_ms).min().unwrap_or(0);
        let first = last;
        while let Some(Reverse(q)) = self.heap.pop() {
            last = last.max(q.time_ms);
            match q.what {
                Pending::Emit { device, n } => self.emit(q.time_ms, device, n)?,
                Pending::Replay { relay, source_seq, frame } => {
                    let seq = self.record(q.time_ms, EventKind::AdvertRelayed { relay, source_seq, frame: hex::encode(frame) });
                    let site = self.cfg.relays[relay].replay;
                    self.broadcast(q.time_ms, site, &frame, seq)?;
                }
                Pending::Upload { finder } => self.upload(q.time_ms, finder)?,
            }
        }
        let devices = self.devices.into_iter().map(|d| d.keys).collect();
        Ok(SimRun { log: self.log, devices, start_ms: first, end_ms: last })
    }

    fn emit(&mut self, t: i64, d: usize, n: i64) -> Result<(), SimError> {
        let dev = &self.devices[d];
        let when = from_unix_ms(t);
        let Some(pos) = dev.track.at(when) else { return Ok(()) };
        let index = dev.keys.master.window_index(when)?;
        let key = key_at(&dev.keys.master, index)?;
        let frame = encode_advert(&AdvertPayloadFields { status: dev.status, hint: 0, x_bytes: *key.x_bytes() });
        let bytes = frame.to_bytes();
        let device_id = dev.keys.id.clone();
        let next = t + self.interval_ms;
        let more = next < dev.end_ms;

        let seq = self.record(t, EventKind::AdvertEmitted { device: device_id, key_index: index, frame: hex::encode(bytes) });
        for (r, relay) in self.cfg.relays.iter().enumerate() {
            if distance_m(pos.lat, pos.lon, relay.capture.lat, relay.capture.lon) <= self.cfg.ble_range_m {
                let at = t + (relay.offset_s * 1000.0).round() as i64;
                self.schedule(at, Pending::Replay { relay: r, source_seq: seq, frame: bytes });
            }
        }
        self.broadcast(t, pos, &bytes, seq)?;
        if more {
            self.schedule(next, Pending::Emit { device: d, n: n + 1 });
        }
        Ok(())
    }

    /// Every finder within range of `pos` hears the frame.
    fn broadcast(&mut self, t: i64, pos: LatLon, bytes: &[u8; FRAME_LEN], source_seq: u64) -> Result<(), SimError> {
        let frame = BleFrame::from_bytes(bytes).expect("37 bytes");
        let Ok(fields) = decode_advert(&frame) else { return Ok(()) };
        let key_id = KeyId::from_x_bytes(&fields.x_bytes);
        let when = from_unix_ms(t);
        for f in 0..self.finders.len() {
            let Some(fpos) = self.finders[f].1.at(when) else { continue };
            if distance_m(pos.lat, pos.lon, fpos.lat, fpos.lon) > self.cfg.ble_range_m {
                continue;
            }
            if self.cfg.drop_probability > 0.0 && self.rng.gen::<f64>() < self.cfg.drop_probability {
                continue;
            }
            let finder = self.finders[f].0.clone();
            let received = self.record(t, EventKind::AdvertReceived { finder: finder.clone(), key_id: key_id.to_base64(), source_seq });
            let sent = self.finder_state[f].sent_per_key.entry(key_id).or_insert(0);
            if *sent >= self.cfg.per_key_cap {
                continue;
            }
            *sent += 1;

            let (lat, lon) = perturb(fpos.lat, fpos.lon, self.cfg.gps_noise_sigma_m, &mut self.rng);
            let accuracy = self.cfg.gps_noise_sigma_m.round().clamp(0.0, 255.0) as u8;
            let msg = LocationMessage::new(lat, lon, accuracy, fields.status)
                .map_err(|e| SimError::Config(format!("finder position: {e}")))?;
            let report = encrypt_report(&fields.x_bytes, &msg, when, &mut self.rng)?;
            self.finder_state[f].batch.push(SubmitEntry { key_id, report: report.encode() });
            self.record(t, EventKind::ReportGenerated { finder, key_id: key_id.to_base64(), received_seq: received, lat, lon });

            if !self.finder_state[f].upload_pending {
                self.finder_state[f].upload_pending = true;
                let delay_ms = (self.delay.sample_secs(&mut self.rng) * 1000.0).round() as i64;
                self.schedule(t + delay_ms, Pending::Upload { finder: f });
            }
        }
        Ok(())
    }

    fn upload(&mut self, t: i64, f: usize) -> Result<(), SimError> {
        let entries = std::mem::take(&mut self.finder_state[f].batch);
        self.finder_state[f].upload_pending = false;
        if let Some(clock) = self.clock {
            clock.set_ms(t)?;
        }
        let finder = self.finders[f].0.clone();
        for batch in SubmitBatch::chunked(entries) {
            let body = batch.encode().expect("chunks hold at most 255 entries");
            let count = self.endpoint.submit(&body, &finder)?;
            self.record(t, EventKind::BatchUploaded { finder: finder.clone(), count });
        }
        Ok(())
    }
}

/// Runs `cfg` against any endpoint. When `clock` is given it is moved to
/// each upload's simulated time first.
pub fn run_scenario_on(cfg: &ScenarioConfig, endpoint: &dyn ReportEndpoint, clock: Option<&dyn SimClock>) -> Result<SimRun, SimError> {
    cfg.validate()?;
    debug_assert_eq!(cfg.key_window_s, KEY_WINDOW_SECS);
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.rng_seed);

    let mut devices = Vec::with_capacity(cfg.lost_devices.len());
    for (i, d) in cfg.lost_devices.iter().enumerate() {
        let track = Track::load(&d.trace)?;
        let Some((start, end)) = track.span() else {
            return Err(SimError::Config(format!("lost device `{}` needs a timestamped trace", d.id)));
        };
        let creation = d.creation_time.unwrap_or(start);
        if creation > start {
            return Err(SimError::Config(format!("device `{}` created after its trace begins", d.id)));
        }
        let master = generate_master(&mut rng, creation)?;
        devices.push(Device {
            cfg_index: i,
            start_ms: start.timestamp_millis(),
            end_ms: end.timestamp_millis(),
            track,
            keys: DeviceKeys { id: d.id.clone(), owner: d.owner.clone(), master, active: (start, end) },
            status: d.status,
        });
    }
    debug_assert!(devices.iter().enumerate().all(|(i, d)| d.cfg_index == i));
    let finders = cfg
        .finders
        .iter()
        .map(|f| Ok((f.id.clone(), Track::load(&f.position)?)))
        .collect::<Result<Vec<_>, SimError>>()?;

    let engine = Engine {
        cfg,
        endpoint,
        clock,
        rng,
        delay: UploadDelay::new(&cfg.upload_delay),
        finder_state: finders.iter().map(|_| FinderState::default()).collect(),
        devices,
        finders,
        heap: BinaryHeap::new(),
        next_seq: 0,
        log: Vec::new(),
        interval_ms: (cfg.advert_interval_s * 1000.0).round().max(1.0) as i64,
    };
    engine.run()
}

/// Runs `cfg` against a fresh in-process store driven by a manual clock.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimOutcome, SimError> {
    let store = Arc::new(ReportStore::new(StoreConfig { record_owner_tokens: cfg.record_owner_tokens, ..StoreConfig::default() }));
    let clock = Arc::new(ManualClock::new(0));
    let endpoint = InProcessEndpoint::new(store.clone(), clock.clone());
    let run = run_scenario_on(cfg, &endpoint, Some(clock.as_ref()))?;
    clock.set(run.end_ms);
    Ok(SimOutcome { run, store, clock, endpoint })
}

