//! Deterministic discrete-event simulation of the offline-finding network:
//! lost devices rotate keys and advertise, finders in radio range encrypt
//! their own position and upload in delayed batches, owners fetch and
//! decrypt. Also hosts the relay and correlation attack scenarios.

pub mod attacks;
pub mod config;
pub mod delay;
pub mod engine;
pub mod noise;
pub mod owner;
pub mod synth;

pub use attacks::{run_correlation_demo, run_relay_attack, CorrelationDemo};
pub use config::{FinderConfig, LostDeviceConfig, RelayConfig, ScenarioConfig, TrackSource};
pub use engine::{run_scenario, run_scenario_on, DeviceKeys, EventKind, SimClock, SimError, SimEvent, SimOutcome, SimRun};
pub use owner::{decrypt_response, owner_retrieve, retrieve_with_keys, RetrievedReport, Retrieval, Skipped};
