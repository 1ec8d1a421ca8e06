//! Density-based clustering with a geodesic metric.
//!
//! A point is core when at least `min_points` points (itself included) lie
//! within `radius`. Points are visited in timestamp order; a border point
//! belongs to the first cluster that reaches it.

use std::collections::VecDeque;

use crate::geodesic::geodesic_distance;
use crate::point::GeoPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct DbscanResult {
    /// Members of each cluster, in discovery order, as points.
    pub clusters: Vec<Vec<GeoPoint>>,
    pub noise: Vec<GeoPoint>,
}

/// Cluster label per index, clusters numbered in discovery order.
pub fn dbscan_labels<D: Fn(usize, usize) -> f64>(n: usize, dist: D, radius: f64, min_points: usize) -> Vec<Option<usize>> {
    let neighbours: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| i == j || dist(i, j) <= radius).collect()).collect();
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_points).collect();
    let mut labels = vec![None; n];
    let mut next = 0;
    for seed in 0..n {
        if labels[seed].is_some() || !core[seed] {
            continue;
        }
        let id = next;
        next += 1;
        labels[seed] = Some(id);
        let mut queue = VecDeque::from([seed]);
        while let Some(p) = queue.pop_front() {
            for &q in &neighbours[p] {
                if labels[q].is_none() {
                    labels[q] = Some(id);
                    if core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    labels
}

/// Clusters `points` after a stable sort by timestamp.
pub fn dbscan(points: &[GeoPoint], radius: f64, min_points: usize) -> DbscanResult {
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|p| p.time);
    let labels = dbscan_labels(sorted.len(), |i, j| geodesic_distance(&sorted[i], &sorted[j]), radius, min_points);
    let count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = DbscanResult { clusters: vec![Vec::new(); count], noise: Vec::new() };
    for (p, label) in sorted.into_iter().zip(labels) {
        match label {
            Some(c) => out.clusters[c].push(p),
            None => out.noise.push(p),
        }
    }
    out
}
