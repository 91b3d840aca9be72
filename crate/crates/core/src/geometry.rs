//! Channel geometry: the receiver and transmitter bodies, the enzyme region,
//! and the volume bookkeeping that ties the enzyme amount to the region size.
//!
//! Conventions: lengths are in micrometers, volumes in µm³. The receiver sits
//! at the origin and the transmitter lies on the +x axis. A point lying exactly
//! on a sphere surface counts as inside.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// How a body interacts with diffusing molecules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Behavior {
    /// Molecules entering the body are counted and removed.
    Absorbing,
    /// Molecules entering the body are put back where they were.
    Reflecting,
    /// Zero-radius emitter with no interaction.
    PassivePoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereBody {
    pub center: Point3,
    pub radius: f64,
    pub behavior: Behavior,
}

impl SphereBody {
    pub fn new(center: Point3, radius: f64, behavior: Behavior) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::Geometry("body center must be finite".into()));
        }
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Geometry(format!(
                "body radius must be finite and non-negative, got {radius}"
            )));
        }
        if behavior == Behavior::PassivePoint && radius != 0.0 {
            return Err(Error::Geometry(
                "a passive point body must have zero radius".into(),
            ));
        }
        Ok(SphereBody {
            center,
            radius,
            behavior,
        })
    }

    pub fn volume(&self) -> f64 {
        (4.0 / 3.0) * PI * self.radius.powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TxShape {
    Point,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    AroundRx,
    AroundTx,
    Everywhere,
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Anchor::AroundRx => "around-rx",
            Anchor::AroundTx => "around-tx",
            Anchor::Everywhere => "everywhere",
        })
    }
}

/// Spherical region containing the enzymes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnzymeRegion {
    pub center: Point3,
    /// Full radius of the region measured from its center.
    pub outer_radius: f64,
    pub anchor: Anchor,
}

/// Where to put the enzyme region when building a [`ChannelGeometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// Homocentric with the receiver, extending `r_enz` beyond its surface.
    AroundRx { r_enz: f64 },
    /// Homocentric with the transmitter, extending `r_enz` beyond its
    /// surface. A point transmitter has no surface, so its region has
    /// outer radius `r_enz`.
    AroundTx { r_enz: f64 },
    /// Large sphere of the given outer radius centered on the receiver.
    Everywhere { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    pub tx: SphereBody,
    pub rx: SphereBody,
    pub enzyme: Option<EnzymeRegion>,
    /// Shortest distance between the transmitter and the receiver surface.
    pub surface_distance: f64,
}

impl ChannelGeometry {
    /// Receiver of radius `r_r` at the origin, transmitter on the +x axis with
    /// surface gap `d`. A sphere transmitter has the same radius as the receiver.
    pub fn build(
        tx_shape: TxShape,
        r_r: f64,
        d: f64,
        placement: Option<Placement>,
    ) -> Result<Self> {
        if !(r_r > 0.0) || !r_r.is_finite() {
            return Err(Error::Geometry(format!(
                "receiver radius must be positive, got {r_r}"
            )));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Geometry(format!(
                "Tx-Rx surface distance must be positive, got {d}"
            )));
        }
        let rx = SphereBody::new(Point3::ORIGIN, r_r, Behavior::Absorbing)?;
        let tx = match tx_shape {
            TxShape::Sphere => {
                SphereBody::new(Point3::new(d + 2.0 * r_r, 0.0, 0.0), r_r, Behavior::Reflecting)?
            }
            TxShape::Point => {
                SphereBody::new(Point3::new(d + r_r, 0.0, 0.0), 0.0, Behavior::PassivePoint)?
            }
        };
        let enzyme = match placement {
            None => None,
            Some(p) => {
                let (center, outer_radius, anchor) = match p {
                    Placement::AroundRx { r_enz } => {
                        (rx.center, r_r + positive_extension(r_enz)?, Anchor::AroundRx)
                    }
                    Placement::AroundTx { r_enz } => {
                        (tx.center, tx.radius + positive_extension(r_enz)?, Anchor::AroundTx)
                    }
                    Placement::Everywhere { radius } => {
                        if !(radius > 0.0) || !radius.is_finite() {
                            return Err(Error::Geometry(format!(
                                "enzyme region radius must be positive, got {radius}"
                            )));
                        }
                        (rx.center, radius, Anchor::Everywhere)
                    }
                };
                Some(EnzymeRegion {
                    center,
                    outer_radius,
                    anchor,
                })
            }
        };
        Ok(ChannelGeometry {
            tx,
            rx,
            enzyme,
            surface_distance: d,
        })
    }

    pub fn tx_shape(&self) -> TxShape {
        match self.tx.behavior {
            Behavior::PassivePoint => TxShape::Point,
            _ => TxShape::Sphere,
        }
    }

    pub fn center_distance(&self) -> f64 {
        self.tx.center.distance(self.rx.center)
    }

    /// Extended enzyme radius, i.e. how far the region reaches beyond the
    /// anchor body's surface. `None` for the everywhere region or no region.
    pub fn extended_radius(&self) -> Option<f64> {
        match self.enzyme {
            Some(region) => match region.anchor {
                Anchor::AroundRx => Some(region.outer_radius - self.rx.radius),
                Anchor::AroundTx => Some(region.outer_radius - self.tx.radius),
                Anchor::Everywhere => None,
            },
            _ => None,
        }
    }
}

fn positive_extension(r_enz: f64) -> Result<f64> {
    if !(r_enz > 0.0) || !r_enz.is_finite() {
        return Err(Error::Geometry(format!(
            "extended enzyme radius must be positive, got {r_enz}"
        )));
    }
    Ok(r_enz)
}

pub fn sphere_volume(radius: f64) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!(
            "sphere radius must be non-negative, got {radius}"
        )));
    }
    Ok((4.0 / 3.0) * PI * radius.powi(3))
}

/// Volume of the intersection of two spheres with radii `r1`, `r2` whose
/// centers are `center_dist` apart.
pub fn lens_volume(r1: f64, r2: f64, center_dist: f64) -> Result<f64> {
    if !(r1 >= 0.0) || !(r2 >= 0.0) || !(center_dist >= 0.0) {
        return Err(Error::Domain(format!(
            "lens volume needs non-negative inputs, got r1={r1}, r2={r2}, distance={center_dist}"
        )));
    }
    Ok(lens_unchecked(r1, r2, center_dist))
}

fn lens_unchecked(r1: f64, r2: f64, dist: f64) -> f64 {
    if dist >= r1 + r2 {
        return 0.0;
    }
    if dist <= (r1 - r2).abs() {
        return (4.0 / 3.0) * PI * r1.min(r2).powi(3);
    }
    // Sum of the two spherical caps cut by the radical plane.
    let gap = r1 + r2 - dist;
    PI * gap * gap
        * (dist * dist + 2.0 * dist * (r1 + r2) - 3.0 * (r1 - r2) * (r1 - r2))
        / (12.0 * dist)
}

/// Volume of the transmitter and receiver bodies lying inside the enzyme
/// region. Zero when there is no region.
///
/// For an anchored region this reduces to the anchor body's volume plus the
/// lens shared with the far body, which is empty while `r_enz <= d` and the
/// whole far body once `r_enz >= d + 2 r_r`. A point transmitter has no volume.
pub fn overlap_volume(geom: &ChannelGeometry) -> f64 {
    let Some(region) = geom.enzyme else {
        return 0.0;
    };
    [geom.rx, geom.tx]
        .iter()
        .filter(|body| body.radius > 0.0)
        .map(|body| {
            lens_unchecked(
                region.outer_radius,
                body.radius,
                region.center.distance(body.center),
            )
        })
        .sum()
}

/// Volume available to the enzymes: the region minus the bodies it overlaps.
pub fn total_enzyme_volume(geom: &ChannelGeometry) -> Result<f64> {
    let region = geom
        .enzyme
        .ok_or_else(|| Error::Geometry("channel has no enzyme region".into()))?;
    let volume = sphere_volume(region.outer_radius)? - overlap_volume(geom);
    if !(volume > 0.0) {
        return Err(Error::Geometry(format!(
            "enzyme region has non-positive free volume {volume}"
        )));
    }
    Ok(volume)
}

pub trait Contains {
    fn contains(&self, p: Point3) -> bool;
}

impl Contains for SphereBody {
    fn contains(&self, p: Point3) -> bool {
        (p - self.center).norm_squared() <= self.radius * self.radius
    }
}

impl Contains for EnzymeRegion {
    fn contains(&self, p: Point3) -> bool {
        (p - self.center).norm_squared() <= self.outer_radius * self.outer_radius
    }
}
