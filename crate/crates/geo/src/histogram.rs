//! Hour-of-day profile of a cluster's visits.

use chrono::{FixedOffset, Timelike};

use crate::top::Cluster;

/// Member counts per local hour, with local time = UTC + `offset`.
pub fn visiting_histogram(cluster: &Cluster, offset: FixedOffset) -> [u32; 24] {
    let mut bins = [0u32; 24];
    for p in &cluster.members {
        bins[p.time.with_timezone(&offset).hour() as usize] += 1;
    }
    bins
}
