use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::Context;
use chrono::{DateTime, Utc};
use clap::Args;
use findnet_client::BlockingClient;
use findnet_core::cache::import_cache;
use findnet_core::wire::FetchResponse;
use findnet_sim::{decrypt_response, retrieve_with_keys, Retrieval};
use serde_json::json;

use crate::args::{instant, print_json, write_points};

#[derive(Debug, Args)]
pub struct ReportOutput {
    /// Decrypted locations as `timestamp_iso8601,lat,lon` CSV; stdout by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print full records (accuracy, status, key index, publication time) as JSON instead.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Key cache (JSON-lines) exported by `keygen` or `derive`.
    #[arg(long)]
    pub cache: PathBuf,
    /// Earliest publication time.
    #[arg(long, value_parser = instant)]
    pub from: DateTime<Utc>,
    /// Latest publication time.
    #[arg(long, value_parser = instant)]
    pub to: DateTime<Utc>,
    #[arg(long, default_value = "http://127.0.0.1:8787")]
    pub server: String,
    /// Sent as the Authorization header.
    #[arg(long)]
    pub owner: Option<String>,
    /// Also keep the raw fetch response for `decrypt`.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    #[command(flatten)]
    pub output: ReportOutput,
}

fn emit(r: &Retrieval, o: &ReportOutput) -> anyhow::Result<()> {
    for s in &r.skipped {
        let id = s.key_id.map(|k| k.to_base64()).unwrap_or_else(|| "?".into());
        eprintln!("skipped report for {id} published {}: {}", s.published_ms, s.reason);
    }
    if o.json {
        let rows: Vec<_> = r
            .reports
            .iter()
            .map(|x| {
                json!({
                    "time": x.time,
                    "lat": x.message.latitude,
                    "lon": x.message.longitude,
                    "accuracy": x.message.accuracy,
                    "status": x.message.status,
                    "key_index": x.key_index,
                    "date_published": x.published_ms,
                })
            })
            .collect();
        return print_json(&rows, o.out.as_deref());
    }
    let points: Vec<_> = r.reports.iter().map(|x| x.point()).collect();
    write_points(&points, o.out.as_ref())
}

pub fn fetch(a: FetchArgs) -> anyhow::Result<()> {
    let keys = import_cache(&a.cache).with_context(|| format!("reading {}", a.cache.display()))?;
    let client = BlockingClient::new(a.server.clone())?;
    if let Some(raw) = &a.raw {
        let req = findnet_core::wire::FetchRequest::single(
            a.from.timestamp_millis(),
            a.to.timestamp_millis(),
            keys.iter().map(|k| k.key_id()),
        );
        let resp = client.fetch(&req, a.owner.as_deref())?;
        print_json(&resp, Some(raw))?;
        return emit(&decrypt_response(&keys, &resp), &a.output);
    }
    let r = retrieve_with_keys(&keys, a.from.timestamp_millis(), a.to.timestamp_millis(), &client, a.owner.as_deref())?;
    eprintln!("{} keys, {} reports, {} skipped", r.keys_requested, r.reports.len(), r.skipped.len());
    emit(&r, &a.output)
}

#[derive(Debug, Args)]
pub struct DecryptArgs {
    #[arg(long)]
    pub cache: PathBuf,
    /// A fetch response (JSON) as saved by `fetch --raw`.
    #[arg(long)]
    pub reports: PathBuf,
    #[command(flatten)]
    pub output: ReportOutput,
}

pub fn decrypt(a: DecryptArgs) -> anyhow::Result<()> {
    let keys = import_cache(&a.cache).with_context(|| format!("reading {}", a.cache.display()))?;
    let f = File::open(&a.reports).with_context(|| format!("opening {}", a.reports.display()))?;
    let resp: FetchResponse = serde_json::from_reader(BufReader::new(f)).context("parsing fetch response")?;
    emit(&decrypt_response(&keys, &resp), &a.output)
}
