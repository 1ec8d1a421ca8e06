//! Location analytics over timestamped WGS-84 points: geodesic error
//! against a ground-truth trace, LOWESS path estimation, temporal
//! resampling, DBSCAN top-location mining and visiting histograms.

pub mod dbscan;
pub mod export;
pub mod geodesic;
pub mod histogram;
pub mod interp;
pub mod lowess;
pub mod evaldata;
pub mod point;
pub mod resample;
pub mod top;

pub use dbscan::{dbscan, DbscanResult};
pub use geodesic::geodesic_distance;
pub use histogram::visiting_histogram;
pub use interp::{interpolate_trace, mean_error};
pub use lowess::lowess_estimate;
pub use point::{AnalyticsParams, GeoError, GeoPoint, Trace};
pub use resample::resample;
pub use top::{rank_top_locations, Cluster};
