//! First-hitting statistics for a point transmitter and an absorbing sphere
//! receiver in unbounded 3D space, with and without uniform degradation.
//!
//! These closed forms only describe the point-Tx channel with no enzymes or
//! enzymes everywhere; they serve as oracles for the stochastic engine.

pub mod quadrature;

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Relative tolerance used by [`hit_cdf_enzyme`].
pub const CDF_REL_TOL: f64 = 1e-8;
const MAX_SEGMENTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Distance from the point source to the receiver surface, µm.
    pub d: f64,
    /// Receiver radius, µm.
    pub r_r: f64,
    /// Diffusion coefficient, µm²/s.
    pub diffusion: f64,
    /// Degradation rate, 1/s. Zero means no enzymes.
    pub lambda: f64,
}

impl ChannelParams {
    pub fn new(d: f64, r_r: f64, diffusion: f64, lambda: f64) -> Result<Self> {
        if !(d > 0.0) || !(r_r > 0.0) || !(diffusion > 0.0) || !(lambda >= 0.0) {
            return Err(Error::Domain(format!(
                "invalid channel parameters d={d}, r_r={r_r}, D={diffusion}, lambda={lambda}"
            )));
        }
        Ok(ChannelParams {
            d,
            r_r,
            diffusion,
            lambda,
        })
    }

    pub fn without_enzymes(self) -> Self {
        ChannelParams { lambda: 0.0, ..self }
    }

    /// Time at which the no-enzyme hitting density peaks.
    pub fn peak_time(&self) -> f64 {
        self.d * self.d / (6.0 * self.diffusion)
    }

    /// Total probability of ever hitting the receiver without degradation.
    pub fn capture_probability(&self) -> f64 {
        self.r_r / (self.d + self.r_r)
    }
}

/// First-hitting time density without degradation (`p.lambda` is ignored).
pub fn hit_rate(t: f64, p: &ChannelParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("hit rate needs t > 0, got {t}")));
    }
    Ok(density(t, p.d, p.r_r, p.diffusion, 0.0))
}

/// First-hitting time density of molecules that have not degraded.
pub fn hit_rate_enzyme(t: f64, p: &ChannelParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("hit rate needs t > 0, got {t}")));
    }
    Ok(density(t, p.d, p.r_r, p.diffusion, p.lambda))
}

#[inline]
fn density(t: f64, d: f64, r_r: f64, diffusion: f64, lambda: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    r_r / (d + r_r) * d / (4.0 * PI * diffusion * t.powi(3)).sqrt()
        * (-d * d / (4.0 * diffusion * t) - lambda * t).exp()
}

/// Probability of hitting by time `t` without degradation.
pub fn hit_cdf(t: f64, p: &ChannelParams) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("hit CDF needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(p.capture_probability());
    }
    Ok(p.capture_probability() * erfc(p.d / (2.0 * (p.diffusion * t).sqrt())))
}

/// Probability of hitting by time `t` before degrading, by adaptive quadrature
/// of [`hit_rate_enzyme`] split at the density peak.
pub fn hit_cdf_enzyme(t: f64, p: &ChannelParams) -> Result<f64> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::Domain(format!("hit CDF needs finite t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let peak = p.peak_time();
    let breaks: Vec<f64> = if peak < t { vec![0.0, peak, t] } else { vec![0.0, t] };
    let (d, r_r, diffusion, lambda) = (p.d, p.r_r, p.diffusion, p.lambda);
    let estimate = quadrature::integrate(
        |s| density(s, d, r_r, diffusion, lambda),
        &breaks,
        CDF_REL_TOL,
        1e-300,
        MAX_SEGMENTS,
    )?;
    Ok(estimate.value.clamp(0.0, 1.0))
}

/// One row of an analytic table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRow {
    pub t: f64,
    pub rate: f64,
    pub cdf: f64,
    pub rate_enzyme: f64,
    pub cdf_enzyme: f64,
}

/// Tabulate densities and CDFs on `points` evenly spaced times in `(0, t_end]`.
pub fn tabulate(p: &ChannelParams, t_end: f64, points: usize) -> Result<Vec<AnalyticRow>> {
    if !(t_end > 0.0) || points == 0 {
        return Err(Error::Domain(format!(
            "table needs t_end > 0 and at least one point, got t_end={t_end}, points={points}"
        )));
    }
    (1..=points)
        .map(|i| {
            let t = t_end * i as f64 / points as f64;
            Ok(AnalyticRow {
                t,
                rate: hit_rate(t, p)?,
                cdf: hit_cdf(t, p)?,
                rate_enzyme: hit_rate_enzyme(t, p)?,
                cdf_enzyme: hit_cdf_enzyme(t, p)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64) -> ChannelParams {
        ChannelParams::new(4.0, 5.0, 100.0, lambda).unwrap()
    }

    #[test]
    fn rate_vanishes_at_origin() {
        let p = params(0.0);
        assert!(hit_rate(1e-6, &p).unwrap() < 1e-300);
        assert!(hit_rate(0.0, &p).is_err());
        assert!(hit_rate(-1.0, &p).is_err());
    }

    #[test]
    fn rate_peaks_at_d2_over_6d() {
        let p = params(0.0);
        // Golden-section search as an independent maximizer.
        let (mut a, mut b) = (1e-4, 0.5);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if hit_rate(c, &p).unwrap() > hit_rate(d, &p).unwrap() {
                b = d;
            } else {
                a = c;
            }
        }
        assert_relative_eq!(0.5 * (a + b), 0.026_666_67, epsilon = 1e-7);
        assert_relative_eq!(p.peak_time(), 16.0 / 600.0);
    }

    #[test]
    fn rate_scales_with_receiver_prefactor() {
        let small = ChannelParams::new(4.0, 5.0, 100.0, 0.0).unwrap();
        let big = ChannelParams::new(4.0, 10.0, 100.0, 0.0).unwrap();
        let t = 0.03;
        let ratio = hit_rate(t, &big).unwrap() / hit_rate(t, &small).unwrap();
        assert_relative_eq!(ratio, (10.0 / 14.0) * (9.0 / 5.0), max_relative = 1e-14);
    }

    #[test]
    fn enzyme_rate_reduces_rate() {
        let t = 0.01;
        assert_eq!(hit_rate_enzyme(t, &params(0.0)).unwrap(), hit_rate(t, &params(0.0)).unwrap());
        let p = params(346.57);
        assert!(hit_rate_enzyme(t, &p).unwrap() < hit_rate(t, &p).unwrap());
        // Direct evaluation: (5/9)(4/sqrt(4π·100·1e-6)) exp(-4 - 3.4657).
        let expected = (5.0 / 9.0) * 4.0 / (4.0 * PI * 100.0 * 1e-6f64).sqrt() * (-4.0f64 - 3.4657).exp();
        assert_relative_eq!(hit_rate_enzyme(t, &p).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 0.035_881_471, epsilon = 1e-9);
    }

    #[test]
    fn cdf_values() {
        let p = params(0.0);
        assert_eq!(hit_cdf(0.0, &p).unwrap(), 0.0);
        assert_relative_eq!(hit_cdf(f64::INFINITY, &p).unwrap(), 5.0 / 9.0);
        // scipy: (5/9) * erfc(0.2 * sqrt(10)) = 0.206162983.
        assert_relative_eq!(hit_cdf(0.1, &p).unwrap(), 0.206_162_983, epsilon = 1e-9);
        // The deficit decays like t^(-1/2): about 3e-3 at 1e4 d^2/D and
        // below 1e-6 by 1e12 d^2/D.
        let deficit = |k: f64| 5.0 / 9.0 - hit_cdf(k * 16.0 / 100.0, &p).unwrap();
        assert!(deficit(1e4) < 4e-3);
        assert!(deficit(1e12) < 1e-6);
    }

    #[test]
    fn enzyme_cdf_reduces_to_closed_form() {
        let p = params(0.0);
        for t in [0.001, 0.0267, 0.1, 0.5, 2.0, 50.0] {
            let q = hit_cdf_enzyme(t, &p).unwrap();
            assert!((q - hit_cdf(t, &p).unwrap()).abs() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn strong_degradation_kills_signal() {
        let p = params(1e6);
        assert!(hit_cdf_enzyme(2.0, &p).unwrap() <= 1e-3);
    }

    #[test]
    fn tabulate_rows() {
        let rows = tabulate(&params(346.57), 0.1, 4).unwrap();
        assert_eq!(rows.len(), 4);
        assert_relative_eq!(rows[3].t, 0.1);
        assert!(rows.iter().all(|r| r.cdf_enzyme <= r.cdf));
        assert!(tabulate(&params(0.0), 0.0, 4).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn cdf_monotone_in_t_and_lambda(t1 in 1e-3f64..3.0, t2 in 1e-3f64..3.0, l1 in 0.0f64..500.0, l2 in 0.0f64..500.0) {
                let (ta, tb) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
                let (la, lb) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
                let fa = hit_cdf_enzyme(ta, &params(la)).unwrap();
                let fb = hit_cdf_enzyme(tb, &params(la)).unwrap();
                prop_assert!(fb >= fa - 1e-9 * fb.max(1e-12));
                let slow = hit_cdf_enzyme(tb, &params(lb)).unwrap();
                prop_assert!(slow <= fb * (1.0 + 1e-7) + 1e-300);
                prop_assert!(fb <= hit_cdf(tb, &params(0.0)).unwrap() * (1.0 + 1e-7));
            }

            #[test]
            fn rate_factorizes_over_lambda(t in 1e-3f64..3.0, l1 in 0.0f64..400.0, l2 in 0.0f64..400.0) {
                let lhs = hit_rate_enzyme(t, &params(l1 + l2)).unwrap();
                let rhs = hit_rate_enzyme(t, &params(l1)).unwrap() * (-l2 * t).exp();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
            }
        }
    }
}
