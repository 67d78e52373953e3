//! Limit law of the CUSUM sup and related diagnostics.
//!
//! Under the null, for a single grid point, `A(x)` converges to
//! `sup_{τ∈[0,1]} |B(τ)|` for a Brownian bridge `B`, whose CDF is the
//! Kolmogorov series
//!
//! ```text
//! F(z) = 1 + 2 Σ_{k>=1} (-1)^k exp(-2 k² z²),   z > 0.
//! ```

use crate::{Error, Result};

/// Truncated Kolmogorov series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolmogorovLaw {
    /// Largest series index used.
    pub truncation: usize,
    /// Summation stops once a term is smaller than this.
    pub tolerance: f64,
}

impl Default for KolmogorovLaw {
    fn default() -> Self {
        KolmogorovLaw {
            truncation: 100,
            tolerance: 1e-12,
        }
    }
}

/// Below this the mass is under 1e-12 and the alternating series only
/// produces cancellation noise, so the CDF is reported as 0.
const LEFT_TAIL: f64 = 0.2;

impl KolmogorovLaw {
    pub fn cdf(&self, z: f64) -> f64 {
        if z.is_nan() || z < LEFT_TAIL {
            return 0.0;
        }
        if z == f64::INFINITY {
            return 1.0;
        }
        let mut sum = 0.0;
        for k in 1..=self.truncation {
            let k = k as f64;
            let term = (-2.0 * k * k * z * z).exp();
            if term < self.tolerance {
                break;
            }
            sum += if k as u64 % 2 == 1 { -term } else { term };
        }
        (1.0 + 2.0 * sum).clamp(0.0, 1.0)
    }

    /// Bisection on `[1e-6, 10]` to `|cdf(z) - p| <= 1e-10`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("p", p, "(0, 1)"));
        }
        let (mut lo, mut hi) = (1e-6_f64, 10.0_f64);
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let f = self.cdf(mid);
            if (f - p).abs() <= 1e-10 {
                break;
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(mid)
    }
}

pub fn kolmogorov_cdf(z: f64) -> f64 {
    KolmogorovLaw::default().cdf(z)
}

pub fn kolmogorov_quantile(p: f64) -> Result<f64> {
    KolmogorovLaw::default().quantile(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticDecision {
    pub p_value: f64,
    pub reject: bool,
}

/// Compares one `A(x)` against the Kolmogorov law.
///
/// Only valid for a single grid point: the `A(x_i)` of a grid are dependent
/// and their average has no tabulated limit.
pub fn asymptotic_single_point_test(a_value: f64, alpha: f64) -> AsymptoticDecision {
    let p_value = 1.0 - kolmogorov_cdf(a_value);
    AsymptoticDecision {
        p_value,
        reject: p_value < alpha,
    }
}

/// Limiting variances of the link estimate at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalVariance {
    /// `G(1-G) / f(h(x))²`.
    pub sigma_t_sq: f64,
    /// `sigma_t_sq · (N_x + N_y) / (N_x N_y)`.
    pub sigma_1t_sq: f64,
}

/// `g` is `G_t(x)`, `f_at_h` the X density at `h_t(x)`.
pub fn theoretical_sigma(g: f64, f_at_h: f64, n_x: usize, n_y: usize) -> Result<TheoreticalVariance> {
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::domain("G", g, "(0, 1)"));
    }
    if !(f_at_h > 0.0 && f_at_h.is_finite()) {
        return Err(Error::domain("density", f_at_h, "(0, inf)"));
    }
    if n_x == 0 || n_y == 0 {
        return Err(Error::Config("sample sizes must be positive".into()));
    }
    let sigma_t_sq = g * (1.0 - g) / (f_at_h * f_at_h);
    let (nx, ny) = (n_x as f64, n_y as f64);
    Ok(TheoreticalVariance {
        sigma_t_sq,
        sigma_1t_sq: sigma_t_sq * (nx + ny) / (nx * ny),
    })
}

pub const SIZE_RATIO_WARN_THRESHOLD: f64 = 0.1;

/// `n (N_x + N_y) / (N_x N_y)`; the asymptotics need it close to 0.
pub fn size_ratio(n: usize, n_x: usize, n_y: usize) -> f64 {
    let (nx, ny) = (n_x as f64, n_y as f64);
    n as f64 * (nx + ny) / (nx * ny)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Dual theta-function form, `sqrt(2π)/z Σ_{j odd} exp(-j²π²/(8z²))`.
    /// Converges fast for small z, so it is an independent check on the
    /// alternating series.
    fn theta_cdf(z: f64) -> f64 {
        let mut sum = 0.0;
        for j in (1..400).step_by(2) {
            let j = j as f64;
            sum += (-(j * j) * PI * PI / (8.0 * z * z)).exp();
        }
        (2.0 * PI).sqrt() / z * sum
    }

    #[test]
    fn matches_theta_form() {
        for i in 1..=300 {
            let z = 0.2 + i as f64 * 0.01;
            assert!((kolmogorov_cdf(z) - theta_cdf(z)).abs() < 1e-11, "z={z}");
        }
    }

    #[test]
    fn tabulated_points() {
        assert!(kolmogorov_cdf(0.05) < 1e-12);
        for (z, p) in [(1.2238, 0.90), (1.3581, 0.95), (1.6276, 0.99)] {
            assert!((kolmogorov_cdf(z) - p).abs() < 1e-3, "{z}");
            assert!((theta_cdf(z) - p).abs() < 1e-3, "{z}");
        }
        assert_eq!(kolmogorov_cdf(0.0), 0.0);
        assert_eq!(kolmogorov_cdf(-1.0), 0.0);
        assert_eq!(kolmogorov_cdf(f64::INFINITY), 1.0);
        assert_eq!(kolmogorov_cdf(40.0), 1.0);
    }

    #[test]
    fn quantiles() {
        assert!((kolmogorov_quantile(0.95).unwrap() - 1.3581).abs() < 1e-3);
        assert!((kolmogorov_quantile(0.90).unwrap() - 1.2238).abs() < 1e-3);
        for p in [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999] {
            let z = kolmogorov_quantile(p).unwrap();
            assert!((kolmogorov_cdf(z) - p).abs() < 1e-9, "p={p}");
        }
        for p in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(kolmogorov_quantile(p).is_err());
        }
    }

    #[test]
    fn monotone_on_grid() {
        let values: Vec<f64> = (1..=1000).map(|i| kolmogorov_cdf(3.0 * i as f64 / 1000.0)).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn truncation_robust() {
        let short = KolmogorovLaw {
            truncation: 50,
            ..Default::default()
        };
        for i in 0..=270 {
            let z = 0.3 + i as f64 * 0.01;
            assert!((short.cdf(z) - kolmogorov_cdf(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_test() {
        let d = asymptotic_single_point_test(1.3581, 0.05);
        assert!((d.p_value - 0.05).abs() < 1e-3);
        assert!(!asymptotic_single_point_test(0.0, 0.05).reject);
        assert_eq!(asymptotic_single_point_test(0.0, 0.05).p_value, 1.0);
        let d = asymptotic_single_point_test(3.0, 0.05);
        assert!(d.p_value < 1e-6 && d.reject);
    }

    #[test]
    fn sigma_examples() {
        let phi0 = 1.0 / (2.0 * PI).sqrt();
        let v = theoretical_sigma(0.5, phi0, 100, 100).unwrap();
        assert!((v.sigma_t_sq - PI / 2.0).abs() < 1e-12);
        assert!((v.sigma_1t_sq - v.sigma_t_sq * 2.0 / 100.0).abs() < 1e-15);
        assert_eq!(theoretical_sigma(0.5, 0.5, 3, 3).unwrap().sigma_t_sq, 1.0);
        let a = theoretical_sigma(0.3, 0.7, 10, 20).unwrap();
        let b = theoretical_sigma(0.7, 0.7, 10, 20).unwrap();
        assert!((a.sigma_t_sq - b.sigma_t_sq).abs() < 1e-15);
        assert!(theoretical_sigma(0.0, 1.0, 1, 1).is_err());
        assert!(theoretical_sigma(1.0, 1.0, 1, 1).is_err());
        assert!(theoretical_sigma(0.5, 0.0, 1, 1).is_err());
    }

    #[test]
    fn size_ratio_examples() {
        assert!((size_ratio(20, 50, 50) - 0.8).abs() < 1e-15);
        assert!((size_ratio(20, 1000, 1000) - 0.04).abs() < 1e-15);
        assert!(size_ratio(1, 1_000_000, 1_000_000) < 1e-5);
    }
}
