//! Time from report generation to upload.

use rand::Rng;
use rand_distr::{Distribution, LogNormal};

use crate::config::UploadDelayConfig;

#[derive(Debug, Clone, Copy)]
pub struct UploadDelay {
    dist: LogNormal<f64>,
}

impl UploadDelay {
    /// Log-normal whose median is `median_s`.
    pub fn new(cfg: &UploadDelayConfig) -> Self {
        let dist = LogNormal::new(cfg.median_s.ln(), cfg.shape).expect("validated parameters");
        Self { dist }
    }

    pub fn sample_secs<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.dist.sample(rng)
    }
}
