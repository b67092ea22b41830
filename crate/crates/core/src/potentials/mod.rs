//! Newtonian potentials of the superposed spheres and the integration
//! machinery used by the quadrature-backed amplitudes.

mod multipole;
mod overlap;
pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use multipole::{coulomb_integral_series, double_sphere_coulomb_closed, multipole_phi_n};
pub use overlap::overlap_integral;
pub use quadrature::{
    mc_integrate_ball, mc_integrate_two_balls, product_integrate_ball, product_integrate_two_balls,
    Quadrature, QuadratureMethod, QuadratureResult,
};

use crate::config::{Branch, BranchPair, ExperimentConfig, Object};
use crate::error::{Error, Result};
use crate::Vec3;

/// Uniform sphere of mass `M` and radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSource {
    pub center: Vec3,
    pub radius: f64,
    pub mass: f64,
}

impl SphereSource {
    pub fn new(center: Vec3, radius: f64, mass: f64) -> Result<Self> {
        if !(radius > 0.0) || !(mass > 0.0) {
            return Err(Error::Domain(format!(
                "sphere needs R > 0 and M > 0, got R = {radius}, M = {mass}"
            )));
        }
        Ok(Self {
            center,
            radius,
            mass,
        })
    }

    /// Branch `i` of object `κ` in `cfg`.
    pub fn branch(cfg: &ExperimentConfig, object: Object, branch: Branch) -> Self {
        Self {
            center: cfg.center(object, branch),
            radius: cfg.radius,
            mass: cfg.mass,
        }
    }

    pub fn volume(&self) -> f64 {
        4.0 * PI * self.radius.powi(3) / 3.0
    }
}

/// `θ(R − |x − X|)`; the surface counts as inside.
pub fn sphere_indicator(x: &Vec3, s: &SphereSource) -> f64 {
    if (x - s.center).norm() <= s.radius {
        1.0
    } else {
        0.0
    }
}

/// Potential of a uniform sphere, J·kg⁻¹.
pub fn sphere_potential(x: &Vec3, s: &SphereSource, g: f64) -> f64 {
    let r = (x - s.center).norm();
    if r <= s.radius {
        -g * s.mass * (1.5 / s.radius - r * r / (2.0 * s.radius.powi(3)))
    } else {
        -g * s.mass / r
    }
}

/// Which potential the objects feel.
#[derive(Clone)]
pub enum PotentialModel {
    /// `Φ_C1 + Φ_C2`, each object's potential averaged over its two branches.
    SemiClassicalMean,
    /// `Φ_1i + Φ_2j`, the potential of a definite branch pair.
    QGBranch(BranchPair),
    /// `Φ_κi` alone.
    SingleSphere(Object, Branch),
    /// Caller-supplied potential, J·kg⁻¹.
    Custom(Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>),
}

impl PotentialModel {
    pub fn custom(f: impl Fn(&Vec3) -> f64 + Send + Sync + 'static) -> Self {
        PotentialModel::Custom(Arc::new(f))
    }

    pub fn constant(value: f64) -> Self {
        Self::custom(move |_| value)
    }
}

impl fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SemiClassicalMean => f.write_str("SemiClassicalMean"),
            Self::QGBranch(p) => write!(f, "QGBranch({p})"),
            Self::SingleSphere(k, i) => write!(f, "SingleSphere({k:?}, {i})"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Evaluates `model` at `x`.
pub fn potential_value(x: &Vec3, model: &PotentialModel, cfg: &ExperimentConfig) -> f64 {
    let g = cfg.constants.g;
    let phi = |k, i| sphere_potential(x, &SphereSource::branch(cfg, k, i), g);
    match model {
        PotentialModel::SemiClassicalMean => {
            let c1 = 0.5 * (phi(Object::One, Branch::L) + phi(Object::One, Branch::R));
            let c2 = 0.5 * (phi(Object::Two, Branch::L) + phi(Object::Two, Branch::R));
            c1 + c2
        }
        PotentialModel::QGBranch(p) => phi(Object::One, p.i) + phi(Object::Two, p.j),
        PotentialModel::SingleSphere(k, i) => phi(*k, *i),
        PotentialModel::Custom(f) => f(x),
    }
}
