#![allow(dead_code)]

use std::io::Write;

use mcvd_enzyme::cli_io::ExperimentPlan;
use mcvd_enzyme::engine::Scenario;
use mcvd_enzyme::geometry::{ChannelGeometry, Contains, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DESK_MOLECULES: usize = 5_000;
pub const DESK_REPLICATIONS: usize = 10;
pub const DESK_DT: f64 = 1e-4;

/// Desk-scale plan: 5e3 molecules, 10 replications, dt = 1e-4 s.
pub fn desk_plan(
    scenarios: &[Scenario],
    distances: &[f64],
    r_enz: &[f64],
    symbol_periods: &[f64],
    half_lives: &[f64],
) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(scenarios.to_vec());
    plan.distances = distances.to_vec();
    plan.r_enz = r_enz.to_vec();
    plan.symbol_periods = symbol_periods.to_vec();
    plan.half_lives = half_lives.to_vec();
    plan.base.molecules_per_symbol = DESK_MOLECULES;
    plan.base.replications = DESK_REPLICATIONS;
    plan.base.dt = DESK_DT;
    plan.base.t_end = 2.0;
    plan.normalized()
}

/// Write a line straight to stderr so it shows up even when libtest
/// captures output of passing tests.
pub fn report(id: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "acceptance criterion {id:>2}: {verdict} | {detail}");
}

/// Result of a hit-or-miss volume estimate.
#[derive(Debug, Clone, Copy)]
pub struct McVolume {
    pub value: f64,
    /// One standard error of `value`.
    pub std_error: f64,
    pub hits: u64,
}

fn estimate(box_volume: f64, hits: u64, samples: u64) -> McVolume {
    let p = hits as f64 / samples as f64;
    McVolume {
        value: box_volume * p,
        std_error: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        hits,
    }
}

/// Volume of `{x : inside(x)}` by uniform sampling of the box `[lo, hi]`.
pub fn mc_box_volume(
    lo: Point3,
    hi: Point3,
    samples: u64,
    seed: u64,
    inside: impl Fn(Point3) -> bool,
) -> McVolume {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = hi - lo;
    let mut hits = 0u64;
    for _ in 0..samples {
        let p = Point3::new(
            lo.x + span.x * rng.random::<f64>(),
            lo.y + span.y * rng.random::<f64>(),
            lo.z + span.z * rng.random::<f64>(),
        );
        if inside(p) {
            hits += 1;
        }
    }
    estimate(span.x * span.y * span.z, hits, samples)
}

/// Intersection volume of a sphere of radius `r1` at the origin and one of
/// radius `r2` at `(c, 0, 0)`. Sampling is restricted to a box that tightly
/// encloses the intersection so thin lenses keep a usable hit fraction.
pub fn mc_lens_volume(r1: f64, r2: f64, c: f64, samples: u64, seed: u64) -> McVolume {
    let x_lo = (-r1).max(c - r2);
    let x_hi = r1.min(c + r2);
    if x_lo >= x_hi {
        return McVolume { value: 0.0, std_error: 0.0, hits: 0 };
    }
    let half_width = |x: f64| {
        let a = (r1 * r1 - x * x).max(0.0).sqrt();
        let b = (r2 * r2 - (x - c) * (x - c)).max(0.0).sqrt();
        a.min(b)
    };
    let crossing = if c > 0.0 { (c * c + r1 * r1 - r2 * r2) / (2.0 * c) } else { 0.0 };
    let rho = [crossing, 0.0, c, x_lo, x_hi]
        .into_iter()
        .map(|x| half_width(x.clamp(x_lo, x_hi)))
        .fold(0.0, f64::max);
    let lo = Point3::new(x_lo, -rho, -rho);
    let hi = Point3::new(x_hi, rho, rho);
    let (r1_sq, r2_sq) = (r1 * r1, r2 * r2);
    mc_box_volume(lo, hi, samples, seed, |p| {
        p.norm_squared() <= r1_sq && (p.x - c).powi(2) + p.y * p.y + p.z * p.z <= r2_sq
    })
}

/// Free enzyme volume of a channel: inside the region, outside both bodies.
pub fn mc_enzyme_volume(geom: &ChannelGeometry, samples: u64, seed: u64) -> McVolume {
    let region = geom.enzyme.expect("geometry without enzymes");
    let r = region.outer_radius;
    let c = region.center;
    let lo = Point3::new(c.x - r, c.y - r, c.z - r);
    let hi = Point3::new(c.x + r, c.y + r, c.z + r);
    let tx_has_volume = geom.tx.radius > 0.0;
    mc_box_volume(lo, hi, samples, seed, |p| {
        region.contains(p) && !geom.rx.contains(p) && !(tx_has_volume && geom.tx.contains(p))
    })
}
