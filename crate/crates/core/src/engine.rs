//! Time-stepped Brownian simulation of messenger molecules.
//!
//! Every step each molecule takes an independent Gaussian displacement with
//! per-axis variance `2 D dt`. The checks then run in a fixed order: a move
//! ending inside a reflecting transmitter is undone, a molecule inside the
//! receiver is counted and removed, and a molecule inside the enzyme region
//! degrades with probability `1 - 2^(-dt / half_life)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cli_io::seed_derivation;
use crate::error::{Error, Result};
use crate::geometry::{Behavior, ChannelGeometry, Placement, Point3, TxShape};
use crate::kinetics::KineticsSpec;

/// Distance by which a sphere transmitter's emission point sits outside its
/// surface, so a freshly emitted molecule is not already inside the body.
pub const EMISSION_OFFSET: f64 = 1e-9;

/// Multiple of the longest Tx-Rx center distance used as the default radius
/// of the everywhere region.
pub const EVERYWHERE_RADIUS_FACTOR: f64 = 4.0;

/// Default everywhere radius for a study whose longest surface distance is
/// `d_max`. The distance is measured between the centers of a sphere Tx and
/// the Rx, so point-Tx and sphere-Tx runs share one region.
pub fn default_everywhere_radius(d_max: f64, r_r: f64) -> f64 {
    EVERYWHERE_RADIUS_FACTOR * (d_max + 2.0 * r_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    PtArx,
    PtAtx,
    StArx,
    StAtx,
    EverywherePt,
    EverywhereSt,
    NonePt,
    NoneSt,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::PtArx,
        Scenario::PtAtx,
        Scenario::StArx,
        Scenario::StAtx,
        Scenario::EverywherePt,
        Scenario::EverywhereSt,
        Scenario::NonePt,
        Scenario::NoneSt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::PtArx => "PT-ARx",
            Scenario::PtAtx => "PT-ATx",
            Scenario::StArx => "ST-ARx",
            Scenario::StAtx => "ST-ATx",
            Scenario::EverywherePt => "everywhere-PT",
            Scenario::EverywhereSt => "everywhere-ST",
            Scenario::NonePt => "none-PT",
            Scenario::NoneSt => "none-ST",
        }
    }

    pub fn tx_shape(self) -> TxShape {
        match self {
            Scenario::PtArx | Scenario::PtAtx | Scenario::EverywherePt | Scenario::NonePt => {
                TxShape::Point
            }
            _ => TxShape::Sphere,
        }
    }

    pub fn has_enzymes(self) -> bool {
        !matches!(self, Scenario::NonePt | Scenario::NoneSt)
    }

    /// The same deployment with the enzymes taken away.
    pub fn without_enzymes(self) -> Scenario {
        match self.tx_shape() {
            TxShape::Point => Scenario::NonePt,
            TxShape::Sphere => Scenario::NoneSt,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.trim();
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(key))
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!("unknown scenario `{key}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Diffusion coefficient, µm²/s.
    pub diffusion: f64,
    pub r_r: f64,
    pub r_enz: f64,
    pub d: f64,
    pub molecules_per_symbol: usize,
    pub t_s: f64,
    pub t_end: f64,
    pub unit_half_life: f64,
    pub dt: f64,
    pub scenario: Scenario,
    /// `None` sends a 1 in every symbol slot that starts before `t_end`.
    pub bits: Option<Vec<bool>>,
    pub replications: usize,
    pub master_seed: u64,
    pub bin_width: f64,
    /// Radius of the everywhere region; `None` means [`default_everywhere_radius`].
    pub everywhere_radius: Option<f64>,
}

impl SimulationConfig {
    /// Simulation-scale defaults with the given scenario.
    pub fn new(scenario: Scenario) -> Self {
        SimulationConfig {
            diffusion: 100.0,
            r_r: 5.0,
            r_enz: 2.0,
            d: 4.0,
            molecules_per_symbol: 50_000,
            t_s: 0.1,
            t_end: 2.0,
            unit_half_life: 0.002,
            dt: 1e-5,
            scenario,
            bits: None,
            replications: 50,
            master_seed: 0,
            bin_width: 0.005,
            everywhere_radius: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("D", self.diffusion),
            ("r_r", self.r_r),
            ("r_enz", self.r_enz),
            ("d", self.d),
            ("t_s", self.t_s),
            ("t_end", self.t_end),
            ("half_life", self.unit_half_life),
            ("delta_t", self.dt),
            ("bin_width", self.bin_width),
        ];
        for (key, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::config(key, None, format!("must be positive and finite, got {value}")));
            }
        }
        if let Some(radius) = self.everywhere_radius {
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(Error::config("everywhere_radius", None, format!("must be positive, got {radius}")));
            }
        }
        if self.t_s > self.t_end {
            return Err(Error::config("t_s", None, format!("symbol period {} exceeds t_end {}", self.t_s, self.t_end)));
        }
        if self.dt >= self.t_s {
            return Err(Error::config("delta_t", None, format!("time step {} must be smaller than t_s {}", self.dt, self.t_s)));
        }
        if self.molecules_per_symbol == 0 {
            return Err(Error::config("molecules", None, "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", None, "must be at least 1"));
        }
        Ok(())
    }

    pub fn bit_sequence(&self) -> Vec<bool> {
        match &self.bits {
            Some(bits) => bits.clone(),
            None => vec![true; slot_count(self.t_end, self.t_s)],
        }
    }

    pub fn steps(&self) -> u64 {
        step_count(self.t_end, self.dt)
    }

    pub fn everywhere_radius(&self) -> f64 {
        self.everywhere_radius
            .unwrap_or_else(|| default_everywhere_radius(self.d, self.r_r))
    }
}

fn slot_count(t_end: f64, t_s: f64) -> usize {
    ((t_end / t_s) * (1.0 + 1e-12)).floor() as usize
}

/// `ceil(t_end / dt)` with a guard against representation error.
pub fn step_count(t_end: f64, dt: f64) -> u64 {
    let ratio = t_end / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        ratio.ceil() as u64
    }
}

/// A channel ready to simulate: geometry, degradation, and emission schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltScenario {
    pub geometry: ChannelGeometry,
    pub kinetics: Option<KineticsSpec>,
    pub emission_point: Point3,
    /// Step index at which each impulse is released.
    pub emission_steps: Vec<u64>,
    pub molecules_per_emission: usize,
    pub diffusion: f64,
    pub dt: f64,
    pub steps: u64,
}

pub fn build_scenario(cfg: &SimulationConfig) -> Result<BuiltScenario> {
    cfg.validate()?;
    let placement = match cfg.scenario {
        Scenario::PtArx | Scenario::StArx => Some(Placement::AroundRx { r_enz: cfg.r_enz }),
        Scenario::PtAtx | Scenario::StAtx => Some(Placement::AroundTx { r_enz: cfg.r_enz }),
        Scenario::EverywherePt | Scenario::EverywhereSt => Some(Placement::Everywhere {
            radius: cfg.everywhere_radius(),
        }),
        Scenario::NonePt | Scenario::NoneSt => None,
    };
    let geometry = ChannelGeometry::build(cfg.scenario.tx_shape(), cfg.r_r, cfg.d, placement)?;
    let kinetics = KineticsSpec::for_geometry(&geometry, cfg.unit_half_life)?;
    let steps = cfg.steps();
    let emission_steps = cfg
        .bit_sequence()
        .iter()
        .enumerate()
        .filter(|(_, &bit)| bit)
        .map(|(k, _)| (k as f64 * cfg.t_s / cfg.dt).round() as u64)
        .filter(|&step| step < steps)
        .collect();
    Ok(BuiltScenario {
        emission_point: emission_point(&geometry),
        geometry,
        kinetics,
        emission_steps,
        molecules_per_emission: cfg.molecules_per_symbol,
        diffusion: cfg.diffusion,
        dt: cfg.dt,
        steps,
    })
}

/// The transmitter point nearest the receiver.
pub fn emission_point(geom: &ChannelGeometry) -> Point3 {
    let toward_rx = geom.rx.center - geom.tx.center;
    let dist = toward_rx.norm();
    let reach = match geom.tx.behavior {
        Behavior::PassivePoint => 0.0,
        _ => geom.tx.radius + EMISSION_OFFSET,
    };
    let scale = reach / dist;
    geom.tx.center + Point3::new(toward_rx.x * scale, toward_rx.y * scale, toward_rx.z * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoleculeState {
    pub position: Point3,
    pub previous_position: Point3,
    pub alive: bool,
    /// Index of the emission that released this molecule.
    pub emission: u32,
}

impl MoleculeState {
    pub fn new(position: Point3, emission: u32) -> Self {
        MoleculeState {
            position,
            previous_position: position,
            alive: true,
            emission,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    /// Absolute simulation time of absorption, seconds.
    pub time: f64,
    pub position: Point3,
    pub emission: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitRecordSet {
    pub replication_id: u32,
    pub hits: Vec<Hit>,
    /// Release time of each emission, indexed by `Hit::emission`.
    pub emission_times: Vec<f64>,
    pub emitted_total: u64,
    pub degraded_total: u64,
    pub survivors: u64,
}

/// Per-step constants for [`step_particles`].
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    sigma: f64,
    rx_center: Point3,
    rx_radius_sq: f64,
    reflector: Option<(Point3, f64)>,
    region: Option<(Point3, f64)>,
    survival: f64,
}

impl Stepper {
    pub fn new(
        geometry: &ChannelGeometry,
        kinetics: Option<&KineticsSpec>,
        diffusion: f64,
        dt: f64,
    ) -> Self {
        let reflector = (geometry.tx.behavior == Behavior::Reflecting)
            .then(|| (geometry.tx.center, geometry.tx.radius * geometry.tx.radius));
        let (region, survival) = match (geometry.enzyme, kinetics) {
            (Some(region), Some(k)) => (
                Some((region.center, region.outer_radius * region.outer_radius)),
                k.survival_per_step(dt),
            ),
            _ => (None, 1.0),
        };
        Stepper {
            sigma: (2.0 * diffusion * dt).sqrt(),
            rx_center: geometry.rx.center,
            rx_radius_sq: geometry.rx.radius * geometry.rx.radius,
            reflector,
            region,
            survival,
        }
    }

    pub fn survival(&self) -> f64 {
        self.survival
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub hits: usize,
    pub degraded: usize,
}

/// Advance every alive molecule by one step ending at `time_after`. Absorbed
/// and degraded molecules are marked dead and removed from `molecules`.
pub fn step_particles<R: Rng + ?Sized>(
    molecules: &mut Vec<MoleculeState>,
    stepper: &Stepper,
    time_after: f64,
    rng: &mut R,
    hits: &mut Vec<Hit>,
) -> StepCounts {
    let mut counts = StepCounts::default();
    for m in molecules.iter_mut().filter(|m| m.alive) {
        m.previous_position = m.position;
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let dz: f64 = rng.sample(StandardNormal);
        m.position = Point3::new(
            m.position.x + stepper.sigma * dx,
            m.position.y + stepper.sigma * dy,
            m.position.z + stepper.sigma * dz,
        );
        if let Some((center, radius_sq)) = stepper.reflector {
            if (m.position - center).norm_squared() <= radius_sq {
                m.position = m.previous_position;
            }
        }
        if (m.position - stepper.rx_center).norm_squared() <= stepper.rx_radius_sq {
            m.alive = false;
            counts.hits += 1;
            hits.push(Hit {
                time: time_after,
                position: m.position,
                emission: m.emission,
            });
            continue;
        }
        if let Some((center, radius_sq)) = stepper.region {
            if (m.position - center).norm_squared() <= radius_sq
                && rng.random::<f64>() >= stepper.survival
            {
                m.alive = false;
                counts.degraded += 1;
            }
        }
    }
    if counts.hits + counts.degraded > 0 {
        molecules.retain(|m| m.alive);
    }
    counts
}

impl BuiltScenario {
    pub fn stepper(&self) -> Stepper {
        Stepper::new(&self.geometry, self.kinetics.as_ref(), self.diffusion, self.dt)
    }

    pub fn emission_times(&self) -> Vec<f64> {
        self.emission_steps
            .iter()
            .map(|&s| s as f64 * self.dt)
            .collect()
    }

    /// Run one replication with its own RNG stream. Deterministic in `seed`.
    pub fn run_replication(&self, replication_id: u32, seed: u64) -> HitRecordSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stepper = self.stepper();
        let mut molecules: Vec<MoleculeState> = Vec::new();
        let mut hits = Vec::new();
        let mut degraded_total = 0u64;
        let mut emitted_total = 0u64;
        let mut next_emission = 0usize;
        for step in 0..self.steps {
            while next_emission < self.emission_steps.len()
                && self.emission_steps[next_emission] == step
            {
                molecules.extend(
                    std::iter::repeat(MoleculeState::new(self.emission_point, next_emission as u32))
                        .take(self.molecules_per_emission),
                );
                emitted_total += self.molecules_per_emission as u64;
                next_emission += 1;
            }
            if molecules.is_empty() {
                continue;
            }
            let time_after = (step + 1) as f64 * self.dt;
            let counts = step_particles(&mut molecules, &stepper, time_after, &mut rng, &mut hits);
            degraded_total += counts.degraded as u64;
        }
        HitRecordSet {
            replication_id,
            hits,
            emission_times: self.emission_times(),
            emitted_total,
            degraded_total,
            survivors: molecules.len() as u64,
        }
    }

    /// Run replications `0..replications` with seeds derived from `master_seed`
    /// on a pool of `threads` workers. The result is ordered by replication id
    /// and does not depend on the thread count.
    pub fn run_replications(
        &self,
        replications: usize,
        master_seed: u64,
        threads: usize,
    ) -> Vec<HitRecordSet> {
        let run = || {
            (0..replications as u32)
                .into_par_iter()
                .map(|id| self.run_replication(id, seed_derivation(master_seed, id as u64)))
                .collect()
        };
        with_pool(threads, run)
    }
}

pub fn run_replication(cfg: &SimulationConfig, seed: u64) -> Result<HitRecordSet> {
    Ok(build_scenario(cfg)?.run_replication(0, seed))
}

pub fn run_experiment(cfg: &SimulationConfig, threads: usize) -> Result<Vec<HitRecordSet>> {
    Ok(build_scenario(cfg)?.run_replications(cfg.replications, cfg.master_seed, threads))
}

/// Run `f` inside a dedicated pool with `threads` workers (0 = rayon default).
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Contains;

    fn desk(scenario: Scenario) -> SimulationConfig {
        SimulationConfig {
            molecules_per_symbol: 200,
            t_end: 0.05,
            t_s: 0.01,
            dt: 1e-4,
            replications: 2,
            ..SimulationConfig::new(scenario)
        }
    }

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
        }
        assert_eq!("st-arx".parse::<Scenario>().unwrap(), Scenario::StArx);
        assert!("ST-XRx".parse::<Scenario>().is_err());
    }

    #[test]
    fn build_st_arx() {
        let cfg = SimulationConfig { d: 4.0, r_enz: 3.0, ..SimulationConfig::new(Scenario::StArx) };
        let built = build_scenario(&cfg).unwrap();
        assert_eq!(built.geometry.tx.center, Point3::new(14.0, 0.0, 0.0));
        let region = built.geometry.enzyme.unwrap();
        assert_eq!(region.center, Point3::ORIGIN);
        assert_eq!(region.outer_radius, 8.0);
        assert!(built.kinetics.is_some());
        // Front pole of the transmitter, just outside its surface.
        assert!((built.emission_point.x - 9.0).abs() < 1e-8);
        assert!(!built.geometry.tx.contains(built.emission_point));
        assert_eq!(built.emission_steps.len(), 20);
        assert_eq!(built.emission_steps[1], 10_000);
    }

    #[test]
    fn build_without_enzymes() {
        let built = build_scenario(&SimulationConfig::new(Scenario::NonePt)).unwrap();
        assert!(built.geometry.enzyme.is_none());
        assert!(built.kinetics.is_none());
        assert_eq!(built.stepper().survival(), 1.0);
        assert_eq!(built.emission_point, Point3::new(9.0, 0.0, 0.0));
    }

    #[test]
    fn everywhere_radius_is_four_center_distances() {
        let cfg = SimulationConfig { d: 10.0, ..SimulationConfig::new(Scenario::EverywhereSt) };
        let built = build_scenario(&cfg).unwrap();
        assert_eq!(built.geometry.enzyme.unwrap().outer_radius, 80.0);
        let pt = SimulationConfig { scenario: Scenario::EverywherePt, ..cfg.clone() };
        assert_eq!(build_scenario(&pt).unwrap().geometry.enzyme.unwrap().outer_radius, 80.0);
        let cfg = SimulationConfig { d: 4.0, everywhere_radius: Some(40.0), ..cfg };
        assert_eq!(build_scenario(&cfg).unwrap().geometry.enzyme.unwrap().outer_radius, 40.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SimulationConfig { d: -1.0, ..SimulationConfig::new(Scenario::StArx) };
        assert!(matches!(build_scenario(&cfg), Err(Error::Config { .. })));
        let cfg = SimulationConfig { t_s: 3.0, ..SimulationConfig::new(Scenario::StArx) };
        assert!(build_scenario(&cfg).is_err());
    }

    #[test]
    fn step_count_is_exact_for_round_ratios() {
        assert_eq!(step_count(2.0, 1e-5), 200_000);
        assert_eq!(step_count(0.4, 1e-4), 4_000);
        assert_eq!(step_count(0.30005, 1e-4), 3_001);
    }

    #[test]
    fn zero_bits_give_zero_hits() {
        let cfg = SimulationConfig { bits: Some(vec![false; 5]), ..desk(Scenario::StArx) };
        let rec = run_replication(&cfg, 7).unwrap();
        assert!(rec.hits.is_empty());
        assert_eq!(rec.emitted_total, 0);
    }

    #[test]
    fn same_seed_same_record() {
        let cfg = desk(Scenario::StAtx);
        assert_eq!(run_replication(&cfg, 11).unwrap(), run_replication(&cfg, 11).unwrap());
        assert_ne!(run_replication(&cfg, 11).unwrap(), run_replication(&cfg, 12).unwrap());
    }

    #[test]
    fn conservation_and_hit_times() {
        for sc in Scenario::ALL {
            let cfg = desk(sc);
            for rec in run_experiment(&cfg, 2).unwrap() {
                assert_eq!(
                    rec.hits.len() as u64 + rec.degraded_total + rec.survivors,
                    rec.emitted_total,
                    "{sc}"
                );
                assert!(rec.hits.iter().all(|h| h.time > 0.0 && h.time <= cfg.t_end + 1e-12));
                assert!(rec.hits.iter().all(|h| h.time > rec.emission_times[h.emission as usize]));
            }
        }
    }

    #[test]
    fn no_enzymes_never_degrade() {
        let rec = run_replication(&desk(Scenario::NoneSt), 3).unwrap();
        assert_eq!(rec.degraded_total, 0);
    }

    #[test]
    fn reflected_move_restores_previous_position() {
        let geom = ChannelGeometry::build(TxShape::Sphere, 5.0, 4.0, None).unwrap();
        // Huge steps from just outside the Tx pole: any move that lands inside
        // the Tx must be undone exactly.
        let stepper = Stepper::new(&geom, None, 1e4, 1e-3);
        let start = Point3::new(14.0, 0.0, 5.0 + 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut reflected = 0;
        for _ in 0..2000 {
            let mut ms = vec![MoleculeState::new(start, 0)];
            let mut hits = Vec::new();
            step_particles(&mut ms, &stepper, 1e-3, &mut rng, &mut hits);
            if let Some(m) = ms.first() {
                assert!(!geom.tx.contains(m.position));
                if m.position == start {
                    reflected += 1;
                }
            }
        }
        assert!(reflected > 0);
    }

    #[test]
    fn alive_molecules_stay_outside_bodies() {
        let built = build_scenario(&desk(Scenario::StArx)).unwrap();
        let stepper = built.stepper();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ms = vec![MoleculeState::new(built.emission_point, 0); 500];
        let mut hits = Vec::new();
        for step in 0..300 {
            step_particles(&mut ms, &stepper, (step + 1) as f64 * 1e-4, &mut rng, &mut hits);
            for m in &ms {
                assert!(m.alive);
                assert!(!built.geometry.rx.contains(m.position));
                assert!(!built.geometry.tx.contains(m.position));
            }
        }
        assert!(hits.iter().all(|h| built.geometry.rx.contains(h.position)));
    }

    #[test]
    fn infinite_half_life_never_degrades() {
        let geom = ChannelGeometry::build(TxShape::Point, 5.0, 4.0, Some(Placement::Everywhere { radius: 100.0 }))
            .unwrap();
        let k = KineticsSpec::with_effective_half_life(f64::INFINITY).unwrap();
        let stepper = Stepper::new(&geom, Some(&k), 100.0, 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ms = vec![MoleculeState::new(Point3::new(9.0, 0.0, 0.0), 0); 1000];
        let mut hits = Vec::new();
        let mut degraded = 0;
        for step in 0..500 {
            degraded += step_particles(&mut ms, &stepper, step as f64, &mut rng, &mut hits).degraded;
        }
        assert_eq!(degraded, 0);
    }

    #[test]
    fn replications_independent_of_thread_count() {
        let built = build_scenario(&desk(Scenario::StArx)).unwrap();
        let one = built.run_replications(4, 99, 1);
        let many = built.run_replications(4, 99, 3);
        assert_eq!(one, many);
        assert_eq!(one.iter().map(|r| r.replication_id).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(built.run_replications(1, 99, 2).len(), 1);
    }
}
