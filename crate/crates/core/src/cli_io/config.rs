//! Line-oriented `key = value` experiment files.
//!
//! ```text
//! # optimal radius around the receiver
//! scenario = ST-ARx
//! d = 6, 8
//! r_enz = 2:26:2
//! t_s = 0.1, 0.5, 1.0
//! ```
//!
//! Blank lines and `#` comments are ignored. The sweep keys (`scenario`, `d`,
//! `r_enz`, `t_s`, `half_life`) accept comma-separated lists, and numeric
//! sweep keys also accept `start:stop:step` ranges. Every key except
//! `scenario` has a default.

use std::collections::HashSet;
use std::path::PathBuf;

use crate::engine::{Scenario, SimulationConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    /// Configuration of the first sweep point; sweep axes override its fields.
    pub base: SimulationConfig,
    pub scenarios: Vec<Scenario>,
    pub distances: Vec<f64>,
    pub r_enz: Vec<f64>,
    pub symbol_periods: Vec<f64>,
    pub half_lives: Vec<f64>,
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

pub const KEYS: [&str; 17] = [
    "scenario",
    "D",
    "r_r",
    "r_enz",
    "d",
    "molecules",
    "t_s",
    "t_end",
    "half_life",
    "delta_t",
    "bits",
    "replications",
    "seed",
    "bin_width",
    "everywhere_radius",
    "out",
    "threads",
];

pub fn default_r_enz_grid() -> Vec<f64> {
    (1..=13).map(|i| 2.0 * i as f64).collect()
}

impl ExperimentPlan {
    pub fn new(scenarios: Vec<Scenario>) -> Self {
        let base = SimulationConfig::new(scenarios[0]);
        ExperimentPlan {
            scenarios,
            distances: vec![base.d],
            r_enz: default_r_enz_grid(),
            symbol_periods: vec![base.t_s],
            half_lives: vec![base.unit_half_life],
            base,
            output_dir: PathBuf::from("out"),
            threads: 0,
        }
        .normalized()
    }

    /// Sort and deduplicate the axes and copy their first values into `base`.
    pub fn normalized(mut self) -> Self {
        self.scenarios.sort();
        self.scenarios.dedup();
        for axis in [
            &mut self.distances,
            &mut self.r_enz,
            &mut self.symbol_periods,
            &mut self.half_lives,
        ] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        self.base.scenario = self.scenarios[0];
        self.base.d = self.distances[0];
        self.base.r_enz = self.r_enz[0];
        self.base.t_s = self.symbol_periods[0];
        self.base.unit_half_life = self.half_lives[0];
        self
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(f64::NAN, f64::max)
    }

    /// Everywhere-region radius shared by all sweep points.
    pub fn everywhere_radius(&self) -> f64 {
        self.base
            .everywhere_radius
            .unwrap_or_else(|| crate::engine::default_everywhere_radius(self.max_distance(), self.base.r_r))
    }

    /// Check that every sweep point gives a valid configuration.
    pub fn validate(&self) -> Result<()> {
        let mut cfg = self.base.clone();
        for &t_s in &self.symbol_periods {
            for &d in &self.distances {
                for &r_enz in &self.r_enz {
                    for &half_life in &self.half_lives {
                        cfg.t_s = t_s;
                        cfg.d = d;
                        cfg.r_enz = r_enz;
                        cfg.unit_half_life = half_life;
                        cfg.validate()?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_f64(key: &str, line: usize, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::config(key, Some(line), format!("`{}` is not a number", text.trim())))?;
    if !v.is_finite() {
        return Err(Error::config(key, Some(line), "value must be finite"));
    }
    Ok(v)
}

fn parse_positive(key: &str, line: usize, text: &str) -> Result<f64> {
    let v = parse_f64(key, line, text)?;
    if !(v > 0.0) {
        return Err(Error::config(key, Some(line), format!("must be positive, got {v}")));
    }
    Ok(v)
}

fn parse_count(key: &str, line: usize, text: &str) -> Result<u64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    // Allow `5e4` style counts as long as they are whole.
    let v = parse_f64(key, line, t)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(Error::config(key, Some(line), format!("`{t}` is not a non-negative integer")));
    }
    Ok(v as u64)
}

fn parse_axis(key: &str, line: usize, text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::config(key, Some(line), "empty list entry"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => values.push(parse_positive(key, line, single)?),
            [start, stop, step] => {
                let (start, stop, step) = (
                    parse_positive(key, line, start)?,
                    parse_positive(key, line, stop)?,
                    parse_positive(key, line, step)?,
                );
                if stop < start {
                    return Err(Error::config(key, Some(line), "range stop is below start"));
                }
                let count = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize;
                values.extend((0..=count).map(|i| start + i as f64 * step));
            }
            _ => {
                return Err(Error::config(key, Some(line), format!("`{item}` is neither a number nor start:stop:step")))
            }
        }
    }
    Ok(values)
}

fn parse_bits(line: usize, text: &str) -> Result<Vec<bool>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
    if compact.is_empty() {
        return Err(Error::config("bits", Some(line), "bit sequence is empty"));
    }
    compact
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::config("bits", Some(line), format!("invalid bit `{other}`"))),
        })
        .collect()
}

/// Parse an experiment file. Omitted keys take the simulation defaults
/// (D = 100, r_r = 5, delta_t = 1e-5, molecules = 5e4, replications = 50).
pub fn parse_config(text: &str) -> Result<ExperimentPlan> {
    let mut plan = ExperimentPlan::new(vec![Scenario::StArx]);
    let mut seen: HashSet<&'static str> = HashSet::new();
    let mut scenarios = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::config(content, Some(line), "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(Error::config(key, Some(line), "unknown key"));
        };
        if !seen.insert(known) {
            return Err(Error::config(key, Some(line), "key given twice"));
        }
        if value.is_empty() {
            return Err(Error::config(key, Some(line), "missing value"));
        }
        let cfg = &mut plan.base;
        match known {
            "scenario" => {
                let list = value
                    .split(',')
                    .map(|s| s.parse::<Scenario>().map_err(|e| Error::config(key, Some(line), e)))
                    .collect::<Result<Vec<_>>>()?;
                scenarios = Some(list);
            }
            "D" => cfg.diffusion = parse_positive(key, line, value)?,
            "r_r" => cfg.r_r = parse_positive(key, line, value)?,
            "r_enz" => plan.r_enz = parse_axis(key, line, value)?,
            "d" => plan.distances = parse_axis(key, line, value)?,
            "t_s" => plan.symbol_periods = parse_axis(key, line, value)?,
            "half_life" => plan.half_lives = parse_axis(key, line, value)?,
            "molecules" => cfg.molecules_per_symbol = parse_count(key, line, value)? as usize,
            "t_end" => cfg.t_end = parse_positive(key, line, value)?,
            "delta_t" => cfg.dt = parse_positive(key, line, value)?,
            "bits" => cfg.bits = Some(parse_bits(line, value)?),
            "replications" => cfg.replications = parse_count(key, line, value)? as usize,
            "seed" => cfg.master_seed = parse_count(key, line, value)?,
            "bin_width" => cfg.bin_width = parse_positive(key, line, value)?,
            "everywhere_radius" => cfg.everywhere_radius = Some(parse_positive(key, line, value)?),
            "out" => plan.output_dir = PathBuf::from(value),
            "threads" => plan.threads = parse_count(key, line, value)? as usize,
            _ => unreachable!("key list and match arms disagree"),
        }
    }
    let scenarios = scenarios.ok_or_else(|| Error::config("scenario", None, "scenario missing"))?;
    plan.scenarios = scenarios;
    let plan = plan.normalized();
    plan.validate()?;
    Ok(plan)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Render a plan in the format read by [`parse_config`].
pub fn render(plan: &ExperimentPlan) -> String {
    let cfg = &plan.base;
    let mut out = String::new();
    let scenarios: Vec<&str> = plan.scenarios.iter().map(|s| s.name()).collect();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };
    push("scenario", scenarios.join(", "));
    push("D", cfg.diffusion.to_string());
    push("r_r", cfg.r_r.to_string());
    push("r_enz", join(&plan.r_enz));
    push("d", join(&plan.distances));
    push("molecules", cfg.molecules_per_symbol.to_string());
    push("t_s", join(&plan.symbol_periods));
    push("t_end", cfg.t_end.to_string());
    push("half_life", join(&plan.half_lives));
    push("delta_t", cfg.dt.to_string());
    if let Some(bits) = &cfg.bits {
        push("bits", bits.iter().map(|&b| if b { '1' } else { '0' }).collect());
    }
    push("replications", cfg.replications.to_string());
    push("seed", cfg.master_seed.to_string());
    push("bin_width", cfg.bin_width.to_string());
    if let Some(radius) = cfg.everywhere_radius {
        push("everywhere_radius", radius.to_string());
    }
    push("out", plan.output_dir.display().to_string());
    push("threads", plan.threads.to_string());
    out
}
