//! Relay pollution and server-side metadata correlation.

use findnet_core::store::CorrelationFinding;

use crate::config::{LatLon, RelayConfig, ScenarioConfig};
use crate::engine::{run_scenario, EventKind, SimError, SimOutcome};
use crate::owner::owner_retrieve;

/// Runs `cfg` with one extra relay that replays every frame heard at
/// `capture` at `replay`, `offset_s` later.
pub fn run_relay_attack(cfg: &ScenarioConfig, capture: LatLon, replay: LatLon, offset_s: f64) -> Result<SimOutcome, SimError> {
    let mut cfg = cfg.clone();
    cfg.relays.push(RelayConfig { capture, replay, offset_s });
    run_scenario(&cfg)
}

pub struct CorrelationDemo {
    pub findings: Vec<CorrelationFinding>,
    pub outcome: SimOutcome,
}

/// Runs `cfg`, lets every owner fetch their device's reports (when
/// `owners_fetch`), then asks the server which owners it can link.
pub fn run_correlation_demo(cfg: &ScenarioConfig, window_s: u32, owners_fetch: bool) -> Result<CorrelationDemo, SimError> {
    let mut outcome = run_scenario(cfg)?;
    if owners_fetch {
        // fetch once everything has been uploaded
        outcome.clock.set(outcome.run.end_ms + 1000);
        let at = outcome.run.end_ms + 1000;
        for d in outcome.run.devices.clone() {
            let r = owner_retrieve(&d.master, d.active.0, d.active.1, &outcome.endpoint, Some(&d.owner))?;
            let seq = outcome.run.log.last().map_or(0, |e| e.seq + 1);
            outcome.run.log.push(crate::engine::SimEvent {
                time_ms: at,
                seq,
                kind: EventKind::FetchPerformed { owner: d.owner.clone(), keys: r.keys_requested, results: r.reports.len() + r.skipped.len() },
            });
        }
    }
    let findings = outcome.store.correlate(window_s);
    Ok(CorrelationDemo { findings, outcome })
}
