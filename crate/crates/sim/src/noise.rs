//! Isotropic Gaussian position error in a local east-north plane.

use rand::Rng;
use rand_distr::{Distribution, Normal};

const A: f64 = 6_378_137.0;
const F: f64 = 1.0 / 298.257_223_563;

/// Meters per radian along the meridian and along the parallel at `lat`.
pub fn radii(lat_deg: f64) -> (f64, f64) {
    let e2 = F * (2.0 - F);
    let s = lat_deg.to_radians().sin();
    let w = (1.0 - e2 * s * s).sqrt();
    let meridional = A * (1.0 - e2) / (w * w * w);
    let normal = A / w;
    (meridional, normal * lat_deg.to_radians().cos())
}

/// Moves (lat, lon) by `north` and `east` meters.
pub fn offset(lat: f64, lon: f64, north: f64, east: f64) -> (f64, f64) {
    let (m, p) = radii(lat);
    let lat2 = (lat + (north / m).to_degrees()).clamp(-90.0, 90.0);
    let mut lon2 = lon + (east / p).to_degrees();
    if lon2 > 180.0 {
        lon2 -= 360.0;
    } else if lon2 < -180.0 {
        lon2 += 360.0;
    }
    (lat2, lon2)
}

pub fn perturb<R: Rng + ?Sized>(lat: f64, lon: f64, sigma_m: f64, rng: &mut R) -> (f64, f64) {
    if sigma_m == 0.0 {
        return (lat, lon);
    }
    let n = Normal::new(0.0, sigma_m).expect("finite sigma");
    let north = n.sample(rng);
    let east = n.sample(rng);
    offset(lat, lon, north, east)
}

#[cfg(test)]
mod tests {
    use super::*;
    use findnet_geo::geodesic::distance_m;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn offsets_are_metric() {
        let (lat, lon) = offset(50.0, 8.0, 100.0, 0.0);
        assert!((distance_m(50.0, 8.0, lat, lon) - 100.0).abs() < 0.05);
        let (lat, lon) = offset(50.0, 8.0, 0.0, 100.0);
        assert!((distance_m(50.0, 8.0, lat, lon) - 100.0).abs() < 0.05);
    }

    #[test]
    fn noise_has_configured_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 20_000;
        let mean_sq: f64 = (0..n)
            .map(|_| {
                let (lat, lon) = perturb(48.0, 11.0, 60.0, &mut rng);
                distance_m(48.0, 11.0, lat, lon).powi(2)
            })
            .sum::<f64>()
            / n as f64;
        // E[r^2] = 2 sigma^2 for a 2-D isotropic Gaussian
        assert!((mean_sq / (2.0 * 3600.0) - 1.0).abs() < 0.05, "{mean_sq}");
    }
}
