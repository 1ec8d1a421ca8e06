use std::path::PathBuf;

use anyhow::{bail, Context};
use chrono::{DateTime, Duration, SubsecRound, Utc};
use clap::Args;
use findnet_core::advert::{encode_advert, AdvertPayloadFields};
use findnet_core::cache::{export_cache, load_master, save_master};
use findnet_core::keys::{key_at, keys_in_window, AdvertisementKeyPair, MasterBeaconKey};
use findnet_core::generate_master;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use crate::args::{instant, print_json};

#[derive(Debug, Args)]
pub struct KeygenArgs {
    /// Where to write the master key (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Also export the advertisement keys of the first `--days` days here.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub days: i64,
    /// Creation time; defaults to now.
    #[arg(long, value_parser = instant)]
    pub created: Option<DateTime<Utc>>,
    /// Deterministic key material, for tests and demos only.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn keygen(a: KeygenArgs) -> anyhow::Result<()> {
    let created = a.created.unwrap_or_else(|| Utc::now().trunc_subsecs(0));
    let master = match a.seed {
        Some(s) => generate_master(&mut ChaCha20Rng::seed_from_u64(s), created)?,
        None => generate_master(&mut rand::rngs::OsRng, created)?,
    };
    save_master(&master, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    let mut summary = json!({ "master": a.out, "created": created });
    if let Some(cache) = &a.cache {
        if a.days <= 0 {
            bail!("--days must be positive");
        }
        let keys = keys_in_window(&master, created, created + Duration::days(a.days))?;
        export_cache(&keys, cache).with_context(|| format!("writing {}", cache.display()))?;
        summary["cache"] = json!(cache);
        summary["keys"] = json!(keys.len());
    }
    print_json(&summary, None)
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(long)]
    pub master: PathBuf,
    /// A single key index (1 is the first window).
    #[arg(long, conflicts_with = "window")]
    pub index: Option<u32>,
    /// Keys for the windows intersecting FROM..TO.
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"], value_parser = instant)]
    pub window: Option<Vec<DateTime<Utc>>>,
    /// Include private scalars in the output.
    #[arg(long)]
    pub private: bool,
    /// Export the derived keys as a key cache.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

fn describe(master: &MasterBeaconKey, k: &AdvertisementKeyPair, private: bool) -> serde_json::Value {
    let mut v = json!({
        "index": k.index(),
        "window_start": master.window_start(k.index()),
        "x": hex::encode(k.x_bytes()),
        "key_id": k.key_id().to_base64(),
    });
    if private {
        v["d"] = json!(hex::encode(k.d_bytes()));
    }
    v
}

pub fn derive(a: DeriveArgs) -> anyhow::Result<()> {
    let master = load_master(&a.master).with_context(|| format!("reading {}", a.master.display()))?;
    let keys = match (a.index, a.window.as_deref()) {
        (Some(i), _) => vec![key_at(&master, i)?],
        (None, Some([from, to])) => {
            if to < from {
                bail!("window ends before it starts");
            }
            keys_in_window(&master, *from, *to)?
        }
        _ => bail!("give --index or --window"),
    };
    if let Some(cache) = &a.cache {
        export_cache(&keys, cache)?;
    }
    let out: Vec<_> = keys.iter().map(|k| describe(&master, k, a.private)).collect();
    print_json(&out, None)
}

#[derive(Debug, Args)]
pub struct AdvertiseArgs {
    #[arg(long)]
    pub master: PathBuf,
    #[arg(long, conflicts_with = "at")]
    pub key_index: Option<u32>,
    /// Use the key active at this time.
    #[arg(long, value_parser = instant)]
    pub at: Option<DateTime<Utc>>,
    #[arg(long, default_value_t = 0)]
    pub status: u8,
    #[arg(long, default_value_t = 0)]
    pub hint: u8,
}

pub fn advertise(a: AdvertiseArgs) -> anyhow::Result<()> {
    let master = load_master(&a.master)?;
    let index = match (a.key_index, a.at) {
        (Some(i), _) => i,
        (None, Some(t)) => master.window_index(t)?,
        (None, None) => bail!("give --key-index or --at"),
    };
    let key = key_at(&master, index)?;
    let frame = encode_advert(&AdvertPayloadFields { status: a.status, hint: a.hint, x_bytes: *key.x_bytes() });
    println!("{}", frame.to_hex());
    Ok(())
}
