//! `findnet`: key management, advertisement frames, simulation, owner-side
//! fetch and decrypt, attack scenarios and location analytics.

mod analyze;
mod args;
mod keys;
mod owner;
mod sim;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "findnet", version, about = "Offline-finding protocol toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a master beacon key and optionally its key cache.
    Keygen(keys::KeygenArgs),
    /// Derive advertisement keys by index or time window.
    Derive(keys::DeriveArgs),
    /// Print the BLE frame for one advertisement key.
    Advertise(keys::AdvertiseArgs),
    /// Run a scenario file in-process or against a server.
    Simulate(sim::SimulateArgs),
    /// Fetch and decrypt reports for the keys in a cache file.
    Fetch(owner::FetchArgs),
    /// Decrypt a saved fetch response with a key cache.
    Decrypt(owner::DecryptArgs),
    /// Relay and correlation attack scenarios.
    #[command(subcommand)]
    Attack(sim::AttackCommand),
    /// Location analytics on CSV traces.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCommand),
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Command::Keygen(a) => keys::keygen(a),
        Command::Derive(a) => keys::derive(a),
        Command::Advertise(a) => keys::advertise(a),
        Command::Simulate(a) => sim::simulate(a),
        Command::Fetch(a) => owner::fetch(a),
        Command::Decrypt(a) => owner::decrypt(a),
        Command::Attack(c) => sim::attack(c),
        Command::Analyze(c) => analyze::run(c),
    }
}
