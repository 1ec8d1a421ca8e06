//! Talks to `findnet-server`. [`Client`] is async; [`BlockingClient`] owns
//! a small runtime and implements [`ReportEndpoint`] so simulation and
//! owner code can run against a remote server unchanged.

use findnet_core::endpoint::{EndpointError, ReportEndpoint};
use findnet_core::store::CorrelationFinding;
use findnet_core::wire::{ClockUpdate, FetchRequest, FetchResponse, PurgeReply, ServerStats, SubmitReply};
use reqwest::{Response, StatusCode};
use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("server answered {status}: {body}")]
    Status { status: u16, body: String },
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    #[error("runtime: {0}")]
    Runtime(#[from] std::io::Error),
}

impl From<ClientError> for EndpointError {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::Status { status, body } => EndpointError::Status { status, body },
            other => EndpointError::Transport(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

async fn json<T: DeserializeOwned>(resp: Response) -> Result<T, ClientError> {
    let status = resp.status();
    if status != StatusCode::OK {
        let body = resp.text().await.unwrap_or_default();
        return Err(ClientError::Status { status: status.as_u16(), body });
    }
    Ok(resp.json().await?)
}

impl Client {
    /// `base` is e.g. `http://127.0.0.1:8787`.
    pub fn new(base: impl Into<String>) -> Self {
        Self { base: base.into().trim_end_matches('/').to_owned(), http: reqwest::Client::new() }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn submit(&self, body: Vec<u8>, finder_id: &str) -> Result<usize, ClientError> {
        let resp = self
            .http
            .post(self.url("/acsnservice/submit"))
            .header("X-Finder-Identity", finder_id)
            .header("Content-Type", "application/octet-stream")
            .body(body)
            .send()
            .await?;
        Ok(json::<SubmitReply>(resp).await?.stored)
    }

    pub async fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>) -> Result<FetchResponse, ClientError> {
        let mut b = self.http.post(self.url("/acsnservice/fetch")).json(req);
        if let Some(owner) = owner_token {
            b = b.header("Authorization", owner);
        }
        json(b.send().await?).await
    }

    pub async fn purge(&self) -> Result<PurgeReply, ClientError> {
        json(self.http.post(self.url("/admin/purge")).send().await?).await
    }

    pub async fn correlate(&self, window_secs: u32) -> Result<Vec<CorrelationFinding>, ClientError> {
        json(self.http.get(self.url("/admin/correlate")).query(&[("window", window_secs)]).send().await?).await
    }

    pub async fn stats(&self) -> Result<ServerStats, ClientError> {
        json(self.http.get(self.url("/admin/stats")).send().await?).await
    }

    /// Only works against a server started with a manual clock.
    pub async fn set_clock(&self, now_ms: i64) -> Result<i64, ClientError> {
        let u: ClockUpdate = json(self.http.post(self.url("/admin/clock")).json(&ClockUpdate { now_ms }).send().await?).await?;
        Ok(u.now_ms)
    }

    pub async fn snapshot(&self) -> Result<serde_json::Value, ClientError> {
        json(self.http.post(self.url("/admin/snapshot")).send().await?).await
    }

    pub async fn healthy(&self) -> bool {
        matches!(self.http.get(self.url("/healthz")).send().await, Ok(r) if r.status() == StatusCode::OK)
    }
}

/// [`Client`] driven by its own current-thread runtime. Do not call from
/// inside another runtime.
pub struct BlockingClient {
    inner: Client,
    rt: tokio::runtime::Runtime,
}

impl BlockingClient {
    pub fn new(base: impl Into<String>) -> Result<Self, ClientError> {
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
        Ok(Self { inner: Client::new(base), rt })
    }

    pub fn submit(&self, body: Vec<u8>, finder_id: &str) -> Result<usize, ClientError> {
        self.rt.block_on(self.inner.submit(body, finder_id))
    }

    pub fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>) -> Result<FetchResponse, ClientError> {
        self.rt.block_on(self.inner.fetch(req, owner_token))
    }

    pub fn purge(&self) -> Result<PurgeReply, ClientError> {
        self.rt.block_on(self.inner.purge())
    }

    pub fn correlate(&self, window_secs: u32) -> Result<Vec<CorrelationFinding>, ClientError> {
        self.rt.block_on(self.inner.correlate(window_secs))
    }

    pub fn stats(&self) -> Result<ServerStats, ClientError> {
        self.rt.block_on(self.inner.stats())
    }

    pub fn set_clock(&self, now_ms: i64) -> Result<i64, ClientError> {
        self.rt.block_on(self.inner.set_clock(now_ms))
    }

    pub fn snapshot(&self) -> Result<serde_json::Value, ClientError> {
        self.rt.block_on(self.inner.snapshot())
    }

    pub fn healthy(&self) -> bool {
        self.rt.block_on(self.inner.healthy())
    }
}

impl ReportEndpoint for BlockingClient {
    fn submit(&self, body: &[u8], finder_id: &str) -> Result<usize, EndpointError> {
        Ok(BlockingClient::submit(self, body.to_vec(), finder_id)?)
    }

    fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>) -> Result<FetchResponse, EndpointError> {
        req.validate()?;
        Ok(BlockingClient::fetch(self, req, owner_token)?)
    }
}
