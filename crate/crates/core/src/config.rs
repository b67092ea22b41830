//! Physical constants, materials, and the experiment geometry.
//!
//! Object 1 sits in branches `1L`/`1R` and object 2 in `2L`/`2R`. For the
//! default collinear layout the four centres lie on one axis:
//!
//! ```text
//!   X_1L ---Δx--- X_1R ---d_RL--- X_2L ---Δx--- X_2R
//! ```
//!
//! so that `d_RL` is the closest approach and `d_LR = d_RL + 2Δx`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Planck mass, kg.
pub const PLANCK_MASS: f64 = 2.176_435e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Gravitational constant, m³·kg⁻¹·s⁻².
    #[serde(rename = "G")]
    pub g: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m·s⁻¹.
    pub c: f64,
}

impl PhysicalConstants {
    /// CODATA 2018.
    pub const CODATA_2018: Self = Self {
        g: 6.674_30e-11,
        hbar: 1.054_571_817e-34,
        c: 299_792_458.0,
    };

    /// `G = ħ = c = 1`, for dimensionless unit tests.
    pub const UNIT: Self = Self {
        g: 1.0,
        hbar: 1.0,
        c: 1.0,
    };

    pub fn new(g: f64, hbar: f64, c: f64) -> Result<Self> {
        let out = Self { g, hbar, c };
        out.check()?;
        Ok(out)
    }

    fn check(&self) -> Result<()> {
        if !(self.g > 0.0 && self.hbar > 0.0 && self.c > 0.0) {
            return Err(Error::Config(format!(
                "physical constants must be strictly positive, got G={}, hbar={}, c={}",
                self.g, self.hbar, self.c
            )));
        }
        Ok(())
    }

    /// Reduced Compton wavelength `ħ/(mc)` of a particle of mass `m`.
    pub fn compton_wavelength(&self, atom_mass: f64) -> f64 {
        self.hbar / (atom_mass * self.c)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Mass of one constituent atom `m`, kg.
    #[serde(rename = "atom_mass_kg")]
    pub atom_mass: f64,
    /// Bulk density, kg·m⁻³.
    #[serde(rename = "density_kg_m3")]
    pub density: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, atom_mass: f64, density: f64) -> Result<Self> {
        let out = Self {
            name: name.into(),
            atom_mass,
            density,
        };
        out.check()?;
        Ok(out)
    }

    /// Ytterbium-173 at 6900 kg·m⁻³.
    pub fn ytterbium() -> Self {
        Self {
            name: "ytterbium".into(),
            atom_mass: 173.0 * ATOMIC_MASS_UNIT,
            density: 6900.0,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.atom_mass > 0.0 && self.atom_mass.is_finite()) {
            return Err(Error::Config(format!(
                "material {}: atom mass must be positive, got {}",
                self.name, self.atom_mass
            )));
        }
        if !(self.density > 0.0) {
            return Err(Error::Config(format!(
                "material {}: density must be positive, got {}",
                self.name, self.density
            )));
        }
        Ok(())
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::ytterbium()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    L,
    R,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::L, Branch::R];

    pub fn index(self) -> usize {
        match self {
            Branch::L => 0,
            Branch::R => 1,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::L => Branch::R,
            Branch::R => Branch::L,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::L => "L",
            Branch::R => "R",
        })
    }
}

/// Joint branch `(i, j)`: object 1 in branch `i`, object 2 in branch `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchPair {
    pub i: Branch,
    pub j: Branch,
}

impl BranchPair {
    pub const LL: BranchPair = BranchPair::new(Branch::L, Branch::L);
    pub const LR: BranchPair = BranchPair::new(Branch::L, Branch::R);
    pub const RL: BranchPair = BranchPair::new(Branch::R, Branch::L);
    pub const RR: BranchPair = BranchPair::new(Branch::R, Branch::R);

    /// Basis order used everywhere: `LL, LR, RL, RR`.
    pub const ALL: [BranchPair; 4] = [Self::LL, Self::LR, Self::RL, Self::RR];

    pub const fn new(i: Branch, j: Branch) -> Self {
        Self { i, j }
    }

    /// Position in the `LL, LR, RL, RR` basis.
    pub fn index(self) -> usize {
        2 * self.i.index() + self.j.index()
    }

    pub fn from_index(idx: usize) -> Self {
        Self::ALL[idx]
    }

    /// Centre distance `d_ij = |X_1i − X_2j|`.
    pub fn distance(self, cfg: &ExperimentConfig) -> f64 {
        cfg.branch_distance(self)
    }
}

impl fmt::Display for BranchPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

impl std::str::FromStr for BranchPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LL" => Ok(Self::LL),
            "LR" => Ok(Self::LR),
            "RL" => Ok(Self::RL),
            "RR" => Ok(Self::RR),
            other => Err(Error::Config(format!("unknown branch pair {other:?}"))),
        }
    }
}

/// Which of the two objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Object {
    One,
    Two,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Adjacent interferometers along the x axis.
    #[default]
    Collinear,
    /// Arbitrary branch centres, m.
    Explicit {
        x1l: [f64; 3],
        x1r: [f64; 3],
        x2l: [f64; 3],
        x2r: [f64; 3],
    },
}


/// Everything needed to evaluate a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Mass of each sphere `M`, kg.
    pub mass: f64,
    /// Interaction time `t`, s.
    pub time: f64,
    /// Superposition size `Δx`, m.
    pub dx: f64,
    /// Closest branch separation `d_RL`, m. Only used by collinear geometry.
    pub d_rl: f64,
    /// Sphere radius `R`, m.
    pub radius: f64,
    pub material: Material,
    pub geometry: Geometry,
    pub constants: PhysicalConstants,
}

impl ExperimentConfig {
    /// Collinear layout with `R` derived from the mass and the material density.
    pub fn collinear(mass: f64, time: f64, dx: f64, d_rl: f64, material: Material) -> Result<Self> {
        let radius = derive_radius(mass, material.density)?;
        let cfg = Self {
            mass,
            time,
            dx,
            d_rl,
            radius,
            material,
            geometry: Geometry::Collinear,
            constants: PhysicalConstants::default(),
        };
        cfg.check()?;
        Ok(cfg)
    }

    /// Collinear layout with `Δx` and `d_RL` given as multiples of the derived radius.
    pub fn collinear_scaled(
        mass: f64,
        time: f64,
        dx_over_r: f64,
        dsep_over_r: f64,
        material: Material,
    ) -> Result<Self> {
        let radius = derive_radius(mass, material.density)?;
        Self::collinear(mass, time, dx_over_r * radius, dsep_over_r * radius, material)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.check()?;
        Ok(self)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_geometry(mut self, geometry: Geometry) -> Result<Self> {
        self.geometry = geometry;
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        self.constants.check()?;
        self.material.check()?;
        let positive = [
            ("mass", self.mass),
            ("radius", self.radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.time >= 0.0 && self.time.is_finite()) {
            return Err(Error::Config(format!(
                "time must be non-negative, got {}",
                self.time
            )));
        }
        if matches!(self.geometry, Geometry::Collinear) {
            if !(self.dx >= 0.0 && self.dx.is_finite()) {
                return Err(Error::Config(format!("dx must be non-negative, got {}", self.dx)));
            }
            if !(self.d_rl > 0.0 && self.d_rl.is_finite()) {
                return Err(Error::Config(format!("d_rl must be positive, got {}", self.d_rl)));
            }
        }
        Ok(())
    }

    /// Branch centre `X_κi`.
    pub fn center(&self, object: Object, branch: Branch) -> Vec3 {
        match &self.geometry {
            Geometry::Collinear => {
                let x = match (object, branch) {
                    (Object::One, Branch::L) => 0.0,
                    (Object::One, Branch::R) => self.dx,
                    (Object::Two, Branch::L) => self.dx + self.d_rl,
                    (Object::Two, Branch::R) => 2.0 * self.dx + self.d_rl,
                };
                Vec3::new(x, 0.0, 0.0)
            }
            Geometry::Explicit { x1l, x1r, x2l, x2r } => {
                let p = match (object, branch) {
                    (Object::One, Branch::L) => x1l,
                    (Object::One, Branch::R) => x1r,
                    (Object::Two, Branch::L) => x2l,
                    (Object::Two, Branch::R) => x2r,
                };
                Vec3::from(*p)
            }
        }
    }

    pub fn branch_distance(&self, pair: BranchPair) -> f64 {
        (self.center(Object::One, pair.i) - self.center(Object::Two, pair.j)).norm()
    }

    /// Superposition size of object `κ`, `|X_κR − X_κL|`.
    pub fn superposition_size(&self, object: Object) -> f64 {
        (self.center(object, Branch::R) - self.center(object, Branch::L)).norm()
    }

    /// `d_RL` as realised by the geometry.
    pub fn closest_separation(&self) -> f64 {
        self.branch_distance(BranchPair::RL)
    }

    /// Sphere volume `V = 4πR³/3`.
    pub fn volume(&self) -> f64 {
        4.0 * PI * self.radius.powi(3) / 3.0
    }

    pub fn atom_mass(&self) -> f64 {
        self.material.atom_mass
    }
}

/// Radius of a uniform sphere of mass `M` and the given density.
pub fn derive_radius(mass: f64, density: f64) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !(density > 0.0) {
        return Err(Error::Domain(format!("density must be positive, got {density}")));
    }
    Ok((3.0 * mass / (4.0 * PI * density)).cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityCheck {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    pub fn get(&self, name: &str) -> Option<&ValidityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.get(name).map(|c| c.status)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    fn push(&mut self, name: &str, ok: bool, fail_status: CheckStatus, detail: String) {
        self.checks.push(ValidityCheck {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { fail_status },
            detail,
        });
    }
}

pub const CHECK_NON_OVERLAP: &str = "non_overlap";
pub const CHECK_WAVEPACKET: &str = "nonrelativistic_wavepacket";
pub const CHECK_PHI: &str = "perturbative_phi";
pub const CHECK_VARTHETA: &str = "perturbative_vartheta";

/// Minimum `R / (ħ/(mc))` for the non-relativistic wavepacket description.
pub const WAVEPACKET_MARGIN: f64 = 100.0;

/// Reports the geometric and perturbative validity of a configuration. Never fails.
pub fn validate_config(cfg: &ExperimentConfig) -> ValidityReport {
    let mut report = ValidityReport::default();

    let min_d = BranchPair::ALL
        .iter()
        .map(|p| cfg.branch_distance(*p))
        .fold(f64::INFINITY, f64::min);
    report.push(
        CHECK_NON_OVERLAP,
        min_d > 2.0 * cfg.radius,
        CheckStatus::Fail,
        format!("min d_ij = {min_d:.6e} m, 2R = {:.6e} m", 2.0 * cfg.radius),
    );

    let compton = cfg.constants.compton_wavelength(cfg.atom_mass());
    report.push(
        CHECK_WAVEPACKET,
        cfg.radius >= WAVEPACKET_MARGIN * compton,
        CheckStatus::Warn,
        format!("R = {:.6e} m, hbar/(m c) = {compton:.6e} m", cfg.radius),
    );

    let phi = crate::amplitudes::phase_nonrel(cfg, BranchPair::RL);
    report.push(
        CHECK_PHI,
        phi < 1.0,
        CheckStatus::Warn,
        format!("phi_RL = {phi:.6e}"),
    );

    let vartheta = crate::amplitudes::beta4_closed(cfg, BranchPair::RL).norm();
    report.push(
        CHECK_VARTHETA,
        vartheta < 1.0,
        CheckStatus::Warn,
        format!("vartheta = {vartheta:.6e}"),
    );

    report
}

/// On-disk JSON form of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub mass_kg: f64,
    pub time_s: f64,
    pub dx_m: f64,
    pub dsep_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
    #[serde(default)]
    pub material: Material,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<PhysicalConstants>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn into_config(self) -> Result<ExperimentConfig> {
        let radius = match self.radius_m {
            Some(r) => r,
            None => derive_radius(self.mass_kg, self.material.density)?,
        };
        let cfg = ExperimentConfig {
            mass: self.mass_kg,
            time: self.time_s,
            dx: self.dx_m,
            d_rl: self.dsep_m,
            radius,
            material: self.material,
            geometry: self.geometry,
            constants: self.constants.unwrap_or_default(),
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_config(cfg: &ExperimentConfig, model: Option<String>) -> Self {
        Self {
            model,
            mass_kg: cfg.mass,
            time_s: cfg.time,
            dx_m: cfg.dx,
            dsep_m: cfg.d_rl,
            radius_m: Some(cfg.radius),
            material: cfg.material.clone(),
            geometry: cfg.geometry.clone(),
            constants: Some(cfg.constants),
        }
    }
}
