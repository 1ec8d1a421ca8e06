use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Subcommand};
use findnet_client::BlockingClient;
use findnet_core::cache::{export_cache, save_master};
use findnet_core::endpoint::{EndpointError, ReportEndpoint};
use findnet_core::keys::keys_in_window;
use findnet_core::time::from_unix_ms;
use findnet_geo::geodesic::distance_m;
use findnet_sim::config::LatLon;
use findnet_sim::{
    owner_retrieve, run_correlation_demo, run_relay_attack, run_scenario, run_scenario_on, DeviceKeys, Retrieval,
    ScenarioConfig, SimClock, SimError, SimEvent,
};
use serde_json::json;

use crate::args::{lat_lon, output, print_json, write_points};

struct RemoteClock<'a>(&'a BlockingClient);

impl SimClock for RemoteClock<'_> {
    fn set_ms(&self, now_ms: i64) -> Result<(), SimError> {
        self.0.set_clock(now_ms).map(|_| ()).map_err(|e| SimError::Endpoint(EndpointError::from(e)))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON; CSV trace paths are relative to it.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Run against this server instead of in-process. It must have been
    /// started with `--manual-clock`.
    #[arg(long)]
    pub server: Option<String>,
    /// Event log as JSON lines.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Per device: master key, key cache and decrypted reports.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn load(path: &Path) -> anyhow::Result<ScenarioConfig> {
    ScenarioConfig::from_json_file(path).with_context(|| format!("loading scenario {}", path.display()))
}

fn write_log(log: &[SimEvent], path: &Path) -> anyhow::Result<()> {
    let mut out = output(Some(path))?;
    for e in log {
        serde_json::to_writer(&mut out, e)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn write_device(dir: &Path, d: &DeviceKeys, r: &Retrieval) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    save_master(&d.master, &dir.join(format!("{}.master.json", d.id)))?;
    let keys = keys_in_window(&d.master, d.active.0, d.active.1)?;
    export_cache(&keys, &dir.join(format!("{}.cache.jsonl", d.id)))?;
    let points: Vec<_> = r.reports.iter().map(|x| x.point()).collect();
    write_points(&points, Some(&dir.join(format!("{}.reports.csv", d.id))))
}

fn retrieve_all(
    devices: &[DeviceKeys],
    endpoint: &dyn ReportEndpoint,
    out_dir: Option<&Path>,
) -> anyhow::Result<Vec<serde_json::Value>> {
    let mut summary = Vec::new();
    for d in devices {
        let r = owner_retrieve(&d.master, d.active.0, d.active.1, endpoint, Some(&d.owner))?;
        if let Some(dir) = out_dir {
            write_device(dir, d, &r)?;
        }
        summary.push(json!({
            "device": d.id,
            "owner": d.owner,
            "keys": r.keys_requested,
            "retrieved": r.reports.len(),
            "skipped": r.skipped.len(),
        }));
    }
    Ok(summary)
}

pub fn simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let cfg = load(&a.scenario)?;
    let (run, devices) = match &a.server {
        Some(url) => {
            let client = BlockingClient::new(url.clone())?;
            let stats = client.stats().with_context(|| format!("contacting {url}"))?;
            if !stats.manual_clock {
                anyhow::bail!("{url} runs on the system clock; start it with --manual-clock");
            }
            let clock = RemoteClock(&client);
            let run = run_scenario_on(&cfg, &client, Some(&clock))?;
            clock.set_ms(run.end_ms + 1000)?;
            let devices = retrieve_all(&run.devices, &client, a.out_dir.as_deref())?;
            (run, devices)
        }
        None => {
            let out = run_scenario(&cfg)?;
            out.clock.set(out.run.end_ms + 1000);
            let devices = retrieve_all(&out.run.devices, &out.endpoint, a.out_dir.as_deref())?;
            (out.run, devices)
        }
    };
    if let Some(path) = &a.log {
        write_log(&run.log, path)?;
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for e in &run.log {
        let v = serde_json::to_value(&e.kind)?;
        *counts.entry(v["kind"].as_str().unwrap_or("?").to_owned()).or_default() += 1;
    }
    print_json(
        &json!({
            "start": from_unix_ms(run.start_ms),
            "end": from_unix_ms(run.end_ms),
            "events": counts,
            "devices": devices,
        }),
        None,
    )
}

#[derive(Debug, Subcommand)]
pub enum AttackCommand {
    /// Replay frames heard at one place at another.
    Relay(RelayArgs),
    /// Link owners through a shared finder and their fetches.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
pub struct RelayArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// `lat,lon` where frames are captured.
    #[arg(long, value_parser = lat_lon)]
    pub capture: LatLon,
    /// `lat,lon` where they are re-broadcast.
    #[arg(long, value_parser = lat_lon)]
    pub replay: LatLon,
    /// Seconds between capture and replay.
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Seconds between two reports of one finder to count as co-located.
    #[arg(long, default_value_t = 60)]
    pub window: u32,
    /// Owners never fetch.
    #[arg(long)]
    pub no_fetch: bool,
    /// The server does not record who fetched.
    #[arg(long)]
    pub mitigate: bool,
}

pub fn attack(c: AttackCommand) -> anyhow::Result<()> {
    match c {
        AttackCommand::Relay(a) => {
            let cfg = load(&a.scenario)?;
            let out = run_relay_attack(&cfg, a.capture, a.replay, a.offset)?;
            out.clock.set(out.run.end_ms + 1000);
            let mut devices = Vec::new();
            for d in &out.run.devices {
                let r = owner_retrieve(&d.master, d.active.0, d.active.1, &out.endpoint, Some(&d.owner))?;
                if let Some(dir) = &a.out_dir {
                    write_device(dir, d, &r)?;
                }
                let mut by_key: BTreeMap<u32, Vec<(f64, f64)>> = BTreeMap::new();
                for x in &r.reports {
                    by_key.entry(x.key_index).or_default().push((x.message.latitude, x.message.longitude));
                }
                let windows: Vec<_> = by_key
                    .iter()
                    .map(|(i, locs)| {
                        let spread = locs
                            .iter()
                            .flat_map(|p| locs.iter().map(move |q| distance_m(p.0, p.1, q.0, q.1)))
                            .fold(0.0, f64::max);
                        json!({ "key_index": i, "reports": locs.len(), "spread_m": (spread * 10.0).round() / 10.0 })
                    })
                    .collect();
                devices.push(json!({ "device": d.id, "windows": windows }));
            }
            let relayed = out.run.log.iter().filter(|e| matches!(e.kind, findnet_sim::EventKind::AdvertRelayed { .. })).count();
            print_json(&json!({ "relayed_frames": relayed, "devices": devices }), None)
        }
        AttackCommand::Correlate(a) => {
            let mut cfg = load(&a.scenario)?;
            if a.mitigate {
                cfg.record_owner_tokens = false;
            }
            let demo = run_correlation_demo(&cfg, a.window, !a.no_fetch)?;
            print_json(&demo.findings, None)
        }
    }
}
