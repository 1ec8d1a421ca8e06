//! The two operations a finder or owner needs from the report server,
//! independent of whether the server is in-process or across HTTP.

use std::sync::Arc;

use thiserror::Error;

use crate::clock::Clock;
use crate::store::ReportStore;
use crate::wire::{FetchError, FetchRequest, FetchResponse, SubmitError};

#[derive(Debug, Error)]
pub enum EndpointError {
    #[error(transparent)]
    Submit(#[from] SubmitError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("server answered {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport: {0}")]
    Transport(String),
}

pub trait ReportEndpoint {
    /// Posts a binary submit body; returns the number of stored reports.
    fn submit(&self, body: &[u8], finder_id: &str) -> Result<usize, EndpointError>;

    fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>) -> Result<FetchResponse, EndpointError>;
}

/// Direct calls into a shared store, timestamped by an injected clock.
#[derive(Clone)]
pub struct InProcessEndpoint {
    pub store: Arc<ReportStore>,
    pub clock: Arc<dyn Clock>,
}

impl InProcessEndpoint {
    pub fn new(store: Arc<ReportStore>, clock: Arc<dyn Clock>) -> Self {
        Self { store, clock }
    }
}

impl ReportEndpoint for InProcessEndpoint {
    fn submit(&self, body: &[u8], finder_id: &str) -> Result<usize, EndpointError> {
        Ok(self.store.submit(body, finder_id, self.clock.now_ms())?)
    }

    fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>) -> Result<FetchResponse, EndpointError> {
        req.validate()?;
        Ok(self.store.fetch(req, owner_token, self.clock.now_ms()))
    }
}

impl<T: ReportEndpoint + ?Sized> ReportEndpoint for &T {
    fn submit(&self, body: &[u8], finder_id: &str) -> Result<usize, EndpointError> {
        (**self).submit(body, finder_id)
    }

    fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>) -> Result<FetchResponse, EndpointError> {
        (**self).fetch(req, owner_token)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::ManualClock;
    use crate::keys::KeyId;
    use crate::wire::{SubmitBatch, SubmitEntry};

    #[test]
    fn in_process_uses_injected_clock() {
        let clock = Arc::new(ManualClock::new(1_234));
        let ep = InProcessEndpoint::new(Arc::new(ReportStore::default()), clock.clone());
        let body = SubmitBatch { entries: vec![SubmitEntry { key_id: KeyId([9; 32]), report: [0; 88] }] }
            .encode()
            .unwrap();
        assert_eq!(ep.submit(&body, "f").unwrap(), 1);
        clock.advance(10);
        let resp = ep.fetch(&FetchRequest::single(0, 2_000, [KeyId([9; 32])]), Some("o")).unwrap();
        assert_eq!(resp.results[0].date_published, 1_234);
        assert_eq!(ep.store.fetch_log()[0].at_ms, 1_244);

        let inverted = FetchRequest::single(5, 4, [KeyId([9; 32])]);
        assert!(matches!(ep.fetch(&inverted, None), Err(EndpointError::Fetch(FetchError::InvertedWindow { index: 0 }))));
    }
}
