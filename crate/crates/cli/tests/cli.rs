use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use findnet_core::clock::ManualClock;
use findnet_core::store::StoreConfig;
use findnet_server::{router, AppState, ServerClock};
use serde_json::{json, Value};
use tempfile::TempDir;

const START: &str = "2021-03-01T09:00:00Z";
const START_MS: i64 = 1_614_589_200_000;

fn findnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_findnet")).args(args).output().expect("spawn findnet")
}

fn ok(args: &[&str]) -> String {
    let out = findnet(args);
    assert!(out.status.success(), "findnet {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn time(min: f64) -> String {
    let t = chrono::DateTime::from_timestamp_millis(START_MS + (min * 60_000.0) as i64).unwrap();
    t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// A northward walk at about 1 m/s with one sample per minute.
fn write_walk(path: &Path, minutes: usize, east_m: f64) {
    let mut csv = String::from("timestamp_iso8601,lat,lon\n");
    for m in 0..=minutes {
        let lat = 49.877 + m as f64 * 60.0 / 111_250.0;
        let lon = 8.655 + east_m / 71_700.0;
        csv.push_str(&format!("{},{lat:.7},{lon:.7}\n", time(m as f64)));
    }
    fs::write(path, csv).unwrap();
}

/// One lost device with a companion finder walking 10 m beside it.
fn walking_scenario(dir: &Path) -> PathBuf {
    write_walk(&dir.join("device.csv"), 60, 0.0);
    write_walk(&dir.join("companion.csv"), 60, 10.0);
    let scenario = json!({
        "lost_devices": [{ "id": "tag", "owner": "alice", "trace": { "csv": "device.csv" } }],
        "finders": [
            { "id": "companion", "position": { "csv": "companion.csv" } },
            { "id": "far", "position": { "static": { "lat": 48.0, "lon": 8.0 } } }
        ],
        "upload_delay": { "median_s": 30.0, "shape": 0.2 },
        "rng_seed": 3
    });
    let p = dir.join("walk.json");
    fs::write(&p, serde_json::to_string_pretty(&scenario).unwrap()).unwrap();
    p
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("timestamp_iso8601,lat,lon"));
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn spawn_server() -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        rt.block_on(async move {
            let clock = ServerClock::Manual(Arc::new(ManualClock::new(START_MS)));
            let state = AppState::with_config(StoreConfig::default(), clock);
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router(state)).await.unwrap();
        });
    });
    rx.recv().unwrap()
}

#[test]
fn keygen_derive_and_advertise_agree() {
    let dir = TempDir::new().unwrap();
    let master = dir.path().join("m.json");
    let cache = dir.path().join("c.jsonl");
    let summary: Value = serde_json::from_str(&ok(&[
        "keygen", "--seed", "9", "--created", START, "--days", "1", "--out", s(&master), "--cache", s(&cache),
    ]))
    .unwrap();
    assert_eq!(summary["keys"], 96);
    assert_eq!(fs::read_to_string(&cache).unwrap().lines().count(), 96);

    let one: Value = serde_json::from_str(&ok(&["derive", "--master", s(&master), "--index", "3", "--private"])).unwrap();
    let one = &one[0];
    assert_eq!(one["index"], 3);
    assert_eq!(one["window_start"], "2021-03-01T09:30:00Z");
    assert_eq!(one["d"].as_str().unwrap().len(), 56);

    // 09:20..09:40 touches the windows starting 09:15 and 09:30.
    let win: Value =
        serde_json::from_str(&ok(&["derive", "--master", s(&master), "--window", "2021-03-01T09:20:00Z", "2021-03-01T09:40:00Z"]))
            .unwrap();
    let idx: Vec<_> = win.as_array().unwrap().iter().map(|k| k["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, [2, 3]);
    assert!(win[1].get("d").is_none());

    let frame = ok(&["advertise", "--master", s(&master), "--key-index", "3", "--status", "5"]);
    let bytes = hex::decode(frame.split_whitespace().collect::<String>()).unwrap();
    assert_eq!(bytes.len(), 37);
    let x = hex::decode(one["x"].as_str().unwrap()).unwrap();
    assert_eq!(bytes[0], x[0] | 0xC0);
    assert_eq!(&bytes[1..6], &x[1..6]);
    assert_eq!(&bytes[6..12], &[0x1E, 0xFF, 0x4C, 0x00, 0x12, 0x19]);
    assert_eq!(bytes[12], 5);
    assert_eq!(&bytes[13..35], &x[6..28]);
    assert_eq!(bytes[35], x[0] >> 6);
    assert_eq!(bytes[36], 0);

    let at = ok(&["advertise", "--master", s(&master), "--at", "2021-03-01T09:44:59Z", "--status", "5"]);
    assert_eq!(at, frame);
}

#[test]
fn same_seed_same_master() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    ok(&["keygen", "--seed", "4", "--created", START, "--out", s(&a)]);
    ok(&["keygen", "--seed", "4", "--created", START, "--out", s(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn simulate_in_process_writes_reports_near_the_walk() {
    let dir = TempDir::new().unwrap();
    let scenario = walking_scenario(dir.path());
    let out_dir = dir.path().join("out");
    let log = dir.path().join("events.jsonl");
    let summary: Value =
        serde_json::from_str(&ok(&["simulate", "--scenario", s(&scenario), "--log", s(&log), "--out-dir", s(&out_dir)]))
            .unwrap();
    assert!(summary.is_object(), "{summary}");

    let rows = csv_rows(&fs::read_to_string(out_dir.join("tag.reports.csv")).unwrap());
    assert!(rows.len() >= 8, "{} reports", rows.len());
    for r in &rows {
        let lat: f64 = r[1].parse().unwrap();
        let lon: f64 = r[2].parse().unwrap();
        assert!((49.876..49.913).contains(&lat) && (8.654..8.657).contains(&lon), "{r:?}");
    }
    assert!(out_dir.join("tag.master.json").exists());
    assert!(out_dir.join("tag.cache.jsonl").exists());

    let events: Vec<Value> =
        fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(events.windows(2).all(|w| w[0]["time_ms"].as_i64() <= w[1]["time_ms"].as_i64()));
    assert!(events.iter().any(|e| e["kind"] == "batch_uploaded"));
    assert!(events.iter().all(|e| e["kind"] != "advert_received" || e["finder"] != "far"));

    // Same seed, same log.
    let log2 = dir.path().join("events2.jsonl");
    ok(&["simulate", "--scenario", s(&scenario), "--log", s(&log2)]);
    assert_eq!(fs::read(&log).unwrap(), fs::read(&log2).unwrap());
}

#[test]
fn simulate_fetch_and_decrypt_through_a_server() {
    let addr = spawn_server();
    let url = format!("http://{addr}");
    let dir = TempDir::new().unwrap();
    let scenario = walking_scenario(dir.path());
    let out_dir = dir.path().join("out");
    ok(&["simulate", "--scenario", s(&scenario), "--server", &url, "--out-dir", s(&out_dir)]);
    let local = fs::read_to_string(out_dir.join("tag.reports.csv")).unwrap();

    let cache = out_dir.join("tag.cache.jsonl");
    let raw = dir.path().join("raw.json");
    let fetched = ok(&[
        "fetch", "--cache", s(&cache), "--from", START, "--to", &time(24.0 * 60.0), "--server", &url, "--owner", "alice",
        "--raw", s(&raw),
    ]);
    assert_eq!(fetched, local);
    let decrypted = ok(&["decrypt", "--cache", s(&cache), "--reports", s(&raw)]);
    assert_eq!(decrypted, local);

    let full: Value = serde_json::from_str(&ok(&["decrypt", "--cache", s(&cache), "--reports", s(&raw), "--json"])).unwrap();
    assert_eq!(full.as_array().unwrap().len(), csv_rows(&local).len());

    // A cache of other keys decrypts nothing.
    let other = dir.path().join("other.jsonl");
    ok(&["keygen", "--seed", "1", "--created", START, "--days", "1", "--out", s(&dir.path().join("o.json")), "--cache", s(&other)]);
    let none = ok(&["decrypt", "--cache", s(&other), "--reports", s(&raw)]);
    assert!(csv_rows(&none).is_empty());
}

#[test]
fn simulate_against_a_server_without_manual_clock_is_refused() {
    let dir = TempDir::new().unwrap();
    let scenario = walking_scenario(dir.path());
    let out = findnet(&["simulate", "--scenario", s(&scenario), "--server", "http://127.0.0.1:9"]);
    assert!(!out.status.success());
}

fn correlation_scenario(dir: &Path) -> PathBuf {
    let scenario = json!({
        "lost_devices": [
            { "id": "a", "owner": "alice", "trace": { "points": [
                { "time": START, "lat": 49.8770, "lon": 8.6550 },
                { "time": time(30.0), "lat": 49.8770, "lon": 8.6550 } ] } },
            { "id": "b", "owner": "bob", "trace": { "points": [
                { "time": START, "lat": 49.8770, "lon": 8.65542 },
                { "time": time(30.0), "lat": 49.8770, "lon": 8.65542 } ] } }
        ],
        "finders": [{ "id": "shared", "position": { "static": { "lat": 49.8770, "lon": 8.65521 } } }],
        "upload_delay": { "median_s": 60.0, "shape": 0.3 },
        "rng_seed": 11
    });
    let p = dir.join("corr.json");
    fs::write(&p, serde_json::to_string(&scenario).unwrap()).unwrap();
    p
}

#[test]
fn attack_correlate_links_owners_only_when_they_fetch() {
    let dir = TempDir::new().unwrap();
    let scenario = correlation_scenario(dir.path());
    let findings = |extra: &[&str]| -> Vec<Value> {
        let mut args = vec!["attack", "correlate", "--scenario", s(&scenario)];
        args.extend_from_slice(extra);
        let v: Value = serde_json::from_str(&ok(&args)).unwrap();
        v.as_array().cloned().unwrap_or_else(|| panic!("{v}"))
    };
    let linked = findings(&[]);
    assert_eq!(linked.len(), 1, "{linked:?}");
    let pair = [linked[0]["owner_a"].as_str().unwrap(), linked[0]["owner_b"].as_str().unwrap()];
    assert!(pair == ["alice", "bob"] || pair == ["bob", "alice"]);
    assert_eq!(linked[0]["finder_id"], "shared");
    assert!(findings(&["--no-fetch"]).is_empty());
    assert!(findings(&["--mitigate"]).is_empty());
}

#[test]
fn attack_relay_reports_the_replay_location() {
    let dir = TempDir::new().unwrap();
    let scenario = json!({
        "lost_devices": [{ "id": "tag", "owner": "alice", "trace": { "points": [
            { "time": START, "lat": 49.8770, "lon": 8.6550 },
            { "time": time(20.0), "lat": 49.8770, "lon": 8.6550 } ] } }],
        "finders": [
            { "id": "home", "position": { "static": { "lat": 49.8771, "lon": 8.6550 } } },
            { "id": "remote", "position": { "static": { "lat": 49.8870, "lon": 8.6550 } } }
        ],
        "upload_delay": { "median_s": 20.0, "shape": 0.1 },
        "rng_seed": 5
    });
    let p = dir.path().join("relay.json");
    fs::write(&p, scenario.to_string()).unwrap();
    let v: Value = serde_json::from_str(&ok(&[
        "attack", "relay", "--scenario", s(&p), "--capture", "49.8770,8.6550", "--replay", "49.8870,8.6550", "--offset", "5",
    ]))
    .unwrap();
    let windows = v["devices"][0]["windows"].as_array().unwrap_or_else(|| panic!("{v}"));
    assert!(!windows.is_empty());
    assert!(windows.iter().any(|w| w["spread_m"].as_f64().unwrap() >= 900.0), "{windows:?}");
}

/// Reports at one place for eight hours and another for three, on three days.
fn write_week(path: &Path) {
    let mut csv = String::from("timestamp_iso8601,lat,lon\n");
    let jitter = |i: usize| ((i * 7919) % 13) as f64 * 1e-6;
    for day in 0..3 {
        let base = day as f64 * 24.0 * 60.0;
        for m in (0..8 * 60).step_by(10) {
            csv.push_str(&format!("{},{:.7},{:.7}\n", time(base + m as f64), 49.8770 + jitter(m), 8.6550));
        }
        for m in (9 * 60..12 * 60).step_by(10) {
            csv.push_str(&format!("{},{:.7},{:.7}\n", time(base + m as f64), 49.8900 + jitter(m), 8.6700));
        }
    }
    fs::write(path, csv).unwrap();
}

#[test]
fn analyze_top_ranks_by_dwell_and_exports_geojson() {
    let dir = TempDir::new().unwrap();
    let reports = dir.path().join("week.csv");
    write_week(&reports);
    let geojson = dir.path().join("top.geojson");
    let top: Value = serde_json::from_str(&ok(&["analyze", "top", "--reports", s(&reports), "--geojson", s(&geojson)])).unwrap();
    let top = top.as_array().unwrap();
    assert_eq!(top.len(), 2, "{top:?}");
    assert_eq!(top[0]["rank"], 1);
    assert!((top[0]["lat"].as_f64().unwrap() - 49.877).abs() < 1e-3);
    assert!((top[1]["lat"].as_f64().unwrap() - 49.890).abs() < 1e-3);
    assert_eq!(top[0]["days"], 3);
    assert!(top[0]["dwell_minutes"].as_i64() > top[1]["dwell_minutes"].as_i64());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&geojson).unwrap()).unwrap();
    assert_eq!(doc["type"], "FeatureCollection");

    let hist = ok(&["analyze", "histogram", "--reports", s(&reports), "--rank", "2", "--utc-offset", "+01:00"]);
    let lines: Vec<_> = hist.lines().collect();
    assert_eq!(lines.len(), 24);
    let count = |l: &str| l.split_whitespace().nth(1).unwrap().parse::<u32>().unwrap();
    // Nine hours after a 09:00 UTC start is 18:00 UTC, 19:00 local.
    assert!(lines.iter().enumerate().all(|(h, l)| (count(l) > 0) == (19..22).contains(&h)), "{hist}");

    assert!(!findnet(&["analyze", "histogram", "--reports", s(&reports), "--rank", "3"]).status.success());
}

#[test]
fn analyze_error_and_path_on_a_noisy_walk() {
    let dir = TempDir::new().unwrap();
    let gps = dir.path().join("gps.csv");
    write_walk(&gps, 60, 0.0);
    let reports = dir.path().join("reports.csv");
    let mut csv = String::from("timestamp_iso8601,lat,lon\n");
    for i in 0..120 {
        let min = i as f64 * 0.5;
        let noise = if i % 2 == 0 { 40.0 } else { -40.0 };
        let lat = 49.877 + min * 60.0 / 111_250.0;
        csv.push_str(&format!("{},{lat:.7},{:.7}\n", time(min), 8.655 + noise / 71_700.0));
    }
    fs::write(&reports, csv).unwrap();

    let v: Value = serde_json::from_str(&ok(&["analyze", "error", "--gps", s(&gps), "--reports", s(&reports)])).unwrap();
    let raw = v["raw_mean_error_m"].as_f64().unwrap();
    let est = v["estimated_mean_error_m"].as_f64().unwrap();
    assert!((raw - 40.0).abs() < 1.0, "{v}");
    assert!(est < 10.0, "{v}");
    assert_eq!(v["reports"], 120);

    let path = dir.path().join("path.csv");
    ok(&["analyze", "path", "--reports", s(&reports), "--out", s(&path)]);
    assert_eq!(csv_rows(&fs::read_to_string(&path).unwrap()).len(), 120);
}

#[test]
fn analyze_evaluate_without_data_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let out = findnet(&["analyze", "evaluate", "--paper-data", s(&dir.path().join("missing"))]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!findnet(&["derive", "--master", "/nonexistent.json", "--index", "1"]).status.success());
    assert!(!findnet(&["analyze", "top", "--reports", "/nonexistent.csv"]).status.success());
    assert!(!findnet(&["attack", "relay", "--scenario", "x.json", "--capture", "91,0", "--replay", "0,0"]).status.success());
}
