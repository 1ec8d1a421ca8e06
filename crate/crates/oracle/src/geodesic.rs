//! WGS-84 inverse geodesic by direct quadrature of the auxiliary-sphere
//! integrals:
//!
//!   s / b          = ∫ sqrt(1 + k² sin²σ) dσ
//!   ω − λ          = f sinα0 ∫ (2 − f) / (1 + (1 − f) sqrt(1 + k² sin²σ)) dσ
//!
//! with k² = e'² cos²α0, integrated between the two points' arc lengths
//! from the equator crossing. The spherical longitude ω is found by fixed
//! point iteration. Not intended for nearly antipodal pairs.

const A: f64 = 6_378_137.0;
const F: f64 = 1.0 / 298.257_223_563;

fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, eps: f64) -> f64 {
    fn rec<G: Fn(f64) -> f64>(
        g: &G,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = g(lm);
        let frm = g(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        rec(g, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + rec(g, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = g(a);
    let fb = g(b);
    let m = 0.5 * (a + b);
    let fm = g(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(g, a, b, fa, fm, fb, whole, eps, 40)
}

/// Geodesic length in meters between two (lat, lon) points in degrees.
pub fn distance(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let b = A * (1.0 - F);
    let ep2 = (A * A - b * b) / (b * b);
    let mut l = (lon2 - lon1).to_radians();
    while l > std::f64::consts::PI {
        l -= 2.0 * std::f64::consts::PI;
    }
    while l <= -std::f64::consts::PI {
        l += 2.0 * std::f64::consts::PI;
    }
    let u1 = ((1.0 - F) * lat1.to_radians().tan()).atan();
    let u2 = ((1.0 - F) * lat2.to_radians().tan()).atan();
    let (su1, cu1) = u1.sin_cos();
    let (su2, cu2) = u2.sin_cos();

    let mut lambda = l;
    for _ in 0..200 {
        let (sl, cl) = lambda.sin_cos();
        let num = cu1 * su2 - su1 * cu2 * cl;
        let sin_sigma = ((cu2 * sl).powi(2) + num.powi(2)).sqrt();
        if sin_sigma == 0.0 {
            return 0.0;
        }
        let cos_sigma = su1 * su2 + cu1 * cu2 * cl;
        let sigma = sin_sigma.atan2(cos_sigma);
        let sin_alpha0 = cu1 * cu2 * sl / sin_sigma;
        let cos2_alpha0 = 1.0 - sin_alpha0 * sin_alpha0;
        let k2 = ep2 * cos2_alpha0;
        // Azimuth at point 1 and the arc length from the equator crossing.
        let alpha1 = (cu2 * sl).atan2(num);
        let sigma1 = su1.atan2(cu1 * alpha1.cos());
        let sigma2 = sigma1 + sigma;

        let root = |s: f64| (1.0 + k2 * s.sin().powi(2)).sqrt();
        let i3 = adaptive_simpson(
            &|s| (2.0 - F) / (1.0 + (1.0 - F) * root(s)),
            sigma1,
            sigma2,
            1e-16,
        );
        let next = l + F * sin_alpha0 * i3;
        let converged = (next - lambda).abs() < 1e-15;
        lambda = next;
        if converged {
            let i1 = adaptive_simpson(&root, sigma1, sigma2, 1e-16);
            return b * i1;
        }
    }
    panic!("oracle geodesic failed to converge");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equatorial_degree() {
        let d = distance(0.0, 0.0, 0.0, 1.0);
        assert!((d - A * std::f64::consts::PI / 180.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn meridian_quarter() {
        // Quarter meridian of WGS-84 (Karney), 10001965.729 m.
        let d = distance(0.0, 0.0, 90.0, 0.0);
        assert!((d - 10_001_965.729).abs() < 1e-3, "{d}");
    }
}
