use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use chrono::DateTime;
use clap::Parser;
use findnet_core::clock::ManualClock;
use findnet_core::store::{StoreConfig, DAY_MS};
use findnet_server::{router, AppState, ServerClock};
use tracing_subscriber::EnvFilter;

/// Serves the offline-finding report endpoints over HTTP.
#[derive(Debug, Parser)]
#[command(name = "findnet-server", version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8787")]
    listen: SocketAddr,
    /// JSON-lines store file, loaded at start and written on shutdown.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Do not record which owner fetched which key.
    #[arg(long)]
    no_owner_tracking: bool,
    /// Run on a manual clock starting here (RFC 3339 or Unix ms), settable via POST /admin/clock.
    #[arg(long)]
    manual_clock: Option<String>,
    #[arg(long, default_value_t = 7)]
    retention_days: i64,
}

fn parse_instant(s: &str) -> anyhow::Result<i64> {
    if let Ok(ms) = s.parse::<i64>() {
        return Ok(ms);
    }
    Ok(DateTime::parse_from_rfc3339(s).with_context(|| format!("bad time `{s}`"))?.timestamp_millis())
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into())).init();
    let args = Args::parse();
    if args.retention_days <= 0 {
        bail!("--retention-days must be positive");
    }
    let clock = match &args.manual_clock {
        Some(s) => ServerClock::Manual(Arc::new(ManualClock::new(parse_instant(s)?))),
        None => ServerClock::System,
    };
    let config = StoreConfig { retention_ms: args.retention_days * DAY_MS, record_owner_tokens: !args.no_owner_tracking };
    let state = AppState::new(Arc::new(findnet_core::store::ReportStore::new(config)), clock, args.snapshot.clone());
    let loaded = state.restore().context("loading snapshot")?;
    if loaded > 0 {
        tracing::info!(loaded, "restored reports");
    }

    let listener = tokio::net::TcpListener::bind(args.listen).await.with_context(|| format!("binding {}", args.listen))?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = state.save().context("writing snapshot")? {
        tracing::info!(path = %path.display(), reports = state.store.len(), "snapshot written");
    }
    Ok(())
}
