//! Ellipsoidal (WGS-84) geodesic distance.

use std::sync::OnceLock;

use geographiclib_rs::{Geodesic, InverseGeodesic};

use crate::point::GeoPoint;

fn wgs84() -> &'static Geodesic {
    static G: OnceLock<Geodesic> = OnceLock::new();
    G.get_or_init(Geodesic::wgs84)
}

/// Length in meters of the shortest path between two coordinates.
pub fn distance_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    if lat1 == lat2 && lon1 == lon2 {
        return 0.0;
    }
    let s12: f64 = wgs84().inverse(lat1, lon1, lat2, lon2);
    s12
}

pub fn geodesic_distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    distance_m(a.lat, a.lon, b.lat, b.lon)
}
