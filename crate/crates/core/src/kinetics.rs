//! Degradation kinetics in the fast-reaction limit, where substrate inside the
//! enzyme region decays exponentially.
//!
//! A fixed enzyme amount spread over a larger volume has a proportionally
//! lower concentration, so the half-life seen by a molecule scales with the
//! free region volume relative to a reference region with `r_enz = 1 µm`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::geometry::{total_enzyme_volume, ChannelGeometry, Placement};

/// Extended radius of the reference region that defines the unit half-life.
pub const REFERENCE_EXTENDED_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticsSpec {
    /// Half-life for the reference region (`r_enz = 1 µm`), seconds.
    pub unit_half_life: f64,
    /// Free volume of the reference region, µm³.
    pub reference_volume: f64,
    /// Free volume of the actual region, µm³.
    pub region_volume: f64,
    /// Half-life inside the actual region, seconds.
    pub effective_half_life: f64,
    /// Decay rate inside the actual region, 1/s.
    pub degradation_factor: f64,
}

impl KineticsSpec {
    /// Kinetics for `geom` holding the enzyme amount that gives `unit_half_life`
    /// in the reference region. Returns `None` when the channel has no enzymes.
    pub fn for_geometry(geom: &ChannelGeometry, unit_half_life: f64) -> Result<Option<Self>> {
        if geom.enzyme.is_none() {
            return Ok(None);
        }
        let region_volume = total_enzyme_volume(geom)?;
        let reference_volume = reference_volume(geom)?;
        let effective = effective_half_life(unit_half_life, region_volume, reference_volume)?;
        Ok(Some(KineticsSpec {
            unit_half_life,
            reference_volume,
            region_volume,
            effective_half_life: effective,
            degradation_factor: degradation_factor(effective)?,
        }))
    }

    /// Kinetics with the effective half-life given directly, bypassing the
    /// volume normalization.
    pub fn with_effective_half_life(effective_half_life: f64) -> Result<Self> {
        Ok(KineticsSpec {
            unit_half_life: effective_half_life,
            reference_volume: 1.0,
            region_volume: 1.0,
            effective_half_life,
            degradation_factor: degradation_factor(effective_half_life)?,
        })
    }

    pub fn survival_per_step(&self, dt: f64) -> f64 {
        survival_probability(dt, self.effective_half_life)
    }
}

/// Free volume of the same channel with the region shrunk to the reference
/// extended radius. The everywhere region is referenced to the around-Rx
/// region so every scenario carries the same enzyme amount.
pub fn reference_volume(geom: &ChannelGeometry) -> Result<f64> {
    let region = geom
        .enzyme
        .ok_or_else(|| Error::Geometry("channel has no enzyme region".into()))?;
    let placement = match region.anchor {
        crate::geometry::Anchor::AroundTx => Placement::AroundTx {
            r_enz: REFERENCE_EXTENDED_RADIUS,
        },
        _ => Placement::AroundRx {
            r_enz: REFERENCE_EXTENDED_RADIUS,
        },
    };
    let reference = ChannelGeometry::build(
        geom.tx_shape(),
        geom.rx.radius,
        geom.surface_distance,
        Some(placement),
    )?;
    total_enzyme_volume(&reference)
}

pub fn degradation_factor(half_life: f64) -> Result<f64> {
    if !(half_life > 0.0) {
        return Err(Error::Domain(format!(
            "half-life must be positive, got {half_life}"
        )));
    }
    Ok(LN_2 / half_life)
}

pub fn concentration_decay(initial: f64, rate: f64, t: f64) -> f64 {
    initial * (-rate * t).exp()
}

pub fn effective_half_life(unit_half_life: f64, volume: f64, reference_volume: f64) -> Result<f64> {
    if !(unit_half_life > 0.0) || !(volume > 0.0) || !(reference_volume > 0.0) {
        return Err(Error::Domain(format!(
            "effective half-life needs positive inputs, got half-life={unit_half_life}, \
             volume={volume}, reference={reference_volume}"
        )));
    }
    Ok(unit_half_life * volume / reference_volume)
}

/// Probability that a molecule inside the region survives one step of length `dt`.
pub fn survival_probability(dt: f64, effective_half_life: f64) -> f64 {
    (-dt / effective_half_life).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TxShape;
    use approx::assert_relative_eq;

    #[test]
    fn degradation_factor_values() {
        assert_relative_eq!(degradation_factor(LN_2).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(degradation_factor(0.002).unwrap(), 346.5736, epsilon = 1e-4);
        assert_eq!(
            degradation_factor(0.004).unwrap() * 2.0,
            degradation_factor(0.002).unwrap()
        );
        assert!(degradation_factor(0.0).is_err());
        assert!(degradation_factor(-1.0).is_err());
    }

    #[test]
    fn decay_values() {
        assert_eq!(concentration_decay(3.5, 12.0, 0.0), 3.5);
        let h = 0.37;
        assert_relative_eq!(concentration_decay(8.0, LN_2 / h, h), 4.0, max_relative = 1e-14);
        assert_eq!(concentration_decay(0.0, 5.0, 7.0), 0.0);
    }

    #[test]
    fn effective_half_life_values() {
        assert_eq!(effective_half_life(0.002, 381.0, 381.0).unwrap(), 0.002);
        assert_relative_eq!(effective_half_life(0.002, 762.0, 381.0).unwrap(), 0.004);
        assert!(effective_half_life(0.002, 0.0, 1.0).is_err());

        let g = ChannelGeometry::build(TxShape::Sphere, 5.0, 4.0, Some(Placement::AroundRx { r_enz: 2.0 }))
            .unwrap();
        let k = KineticsSpec::for_geometry(&g, 0.002).unwrap().unwrap();
        assert_relative_eq!(k.effective_half_life, 0.002 * 218.0 / 91.0, max_relative = 1e-12);
        assert_relative_eq!(k.effective_half_life, 0.004791, epsilon = 1e-6);
    }

    #[test]
    fn survival_values() {
        assert_eq!(survival_probability(0.25, 0.25), 0.5);
        assert_eq!(survival_probability(1e-5, f64::INFINITY), 1.0);
        assert_relative_eq!(survival_probability(1e-5, 0.002), 0.996541, epsilon = 1e-6);
    }

    #[test]
    fn survival_composes() {
        let (dt, h) = (1e-5, 0.0047);
        let p = survival_probability(dt, h);
        for n in [1, 10, 1000] {
            assert_relative_eq!(p.powi(n), survival_probability(n as f64 * dt, h), max_relative = 1e-12);
        }
    }

    #[test]
    fn no_region_no_kinetics() {
        let g = ChannelGeometry::build(TxShape::Point, 5.0, 4.0, None).unwrap();
        assert!(KineticsSpec::for_geometry(&g, 0.002).unwrap().is_none());
    }

    #[test]
    fn everywhere_shares_around_rx_reference() {
        let g = ChannelGeometry::build(TxShape::Sphere, 5.0, 6.0, Some(Placement::Everywhere { radius: 40.0 }))
            .unwrap();
        assert_relative_eq!(reference_volume(&g).unwrap(), 381.1799, epsilon = 1e-3);
    }

    #[test]
    fn enzyme_amount_constant_across_scenarios() {
        // Half-life per unit free volume is the same for every deployment.
        let unit = 0.003;
        let ratios: Vec<f64> = [
            Placement::AroundRx { r_enz: 2.0 },
            Placement::AroundRx { r_enz: 12.0 },
            Placement::AroundTx { r_enz: 7.0 },
            Placement::Everywhere { radius: 40.0 },
        ]
        .into_iter()
        .map(|p| {
            let g = ChannelGeometry::build(TxShape::Sphere, 5.0, 6.0, Some(p)).unwrap();
            let k = KineticsSpec::for_geometry(&g, unit).unwrap().unwrap();
            assert_relative_eq!(k.degradation_factor * k.effective_half_life, LN_2, max_relative = 1e-15);
            k.effective_half_life / k.region_volume
        })
        .collect();
        for r in &ratios {
            assert_relative_eq!(*r, ratios[0], max_relative = 1e-12);
        }
    }
}
