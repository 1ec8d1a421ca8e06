use std::net::SocketAddr;
use std::sync::Arc;

use findnet_client::{BlockingClient, Client, ClientError};
use findnet_core::clock::ManualClock;
use findnet_core::endpoint::ReportEndpoint;
use findnet_core::keys::KeyId;
use findnet_core::store::StoreConfig;
use findnet_core::wire::{FetchRequest, SubmitBatch, SubmitEntry};
use findnet_server::{router, AppState, ServerClock};

const NOW: i64 = 1_600_000_000_000;

/// Starts a server on an ephemeral port in a background thread.
fn spawn_server(config: StoreConfig) -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        rt.block_on(async move {
            let state = AppState::with_config(config, ServerClock::Manual(Arc::new(ManualClock::new(NOW))));
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router(state)).await.unwrap();
        });
    });
    rx.recv().unwrap()
}

fn body(key: u8, n: usize) -> Vec<u8> {
    let entries = (0..n).map(|_| SubmitEntry { key_id: KeyId([key; 32]), report: [key; 88] }).collect();
    SubmitBatch { entries }.encode().unwrap()
}

#[test]
fn blocking_client_as_endpoint() {
    let addr = spawn_server(StoreConfig::default());
    let c = BlockingClient::new(format!("http://{addr}/")).unwrap();
    assert!(c.healthy());
    let ep: &dyn ReportEndpoint = &c;
    assert_eq!(ep.submit(&body(1, 3), "finder").unwrap(), 3);
    let resp = ep.fetch(&FetchRequest::single(0, i64::MAX, [KeyId([1; 32])]), Some("owner")).unwrap();
    assert_eq!(resp.results.len(), 3);
    let stats = c.stats().unwrap();
    assert_eq!((stats.reports, stats.fetches, stats.now_ms), (3, 1, NOW));

    assert_eq!(c.set_clock(NOW + 8 * 86_400_000).unwrap(), NOW + 8 * 86_400_000);
    assert_eq!(c.purge().unwrap().purged, 3);
    assert!(c.correlate(60).unwrap().is_empty());
}

#[test]
fn server_errors_surface_with_status() {
    let addr = spawn_server(StoreConfig::default());
    let c = BlockingClient::new(format!("http://{addr}")).unwrap();
    let mut bad = body(1, 1);
    bad[1] = 0;
    match c.submit(bad, "f") {
        Err(ClientError::Status { status: 400, body }) => assert!(body.contains("0F8AE0"), "{body}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(c.snapshot(), Err(ClientError::Status { status: 409, .. })));
    let inverted = FetchRequest::single(10, 0, [KeyId([1; 32])]);
    assert!(ReportEndpoint::fetch(&c, &inverted, None).is_err());
}

#[test]
fn unreachable_server_is_a_transport_error() {
    let c = BlockingClient::new("http://127.0.0.1:9").unwrap();
    assert!(!c.healthy());
    let err = ReportEndpoint::submit(&c, &body(1, 1), "f").unwrap_err();
    assert!(matches!(err, findnet_core::endpoint::EndpointError::Transport(_)));
}

#[tokio::test]
async fn async_client() {
    let addr = spawn_server(StoreConfig::default());
    let c = Client::new(format!("http://{addr}"));
    assert_eq!(c.submit(body(2, 2), "f").await.unwrap(), 2);
    let resp = c.fetch(&FetchRequest::single(0, i64::MAX, [KeyId([2; 32])]), None).await.unwrap();
    assert_eq!(resp.results.len(), 2);
    assert_eq!(resp.results[0].payload_bytes().unwrap(), vec![2u8; 88]);
}
