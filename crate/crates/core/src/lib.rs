//! Perturbative amplitudes for the two-mass gravitational entanglement experiment.
//!
//! Two spheres of mass `M` and radius `R` are each put in a superposition of a
//! left and right location. Depending on the gravity model, the four branch
//! amplitudes `α_LL, α_LR, α_RL, α_RR` pick up phases and virtual-matter
//! contributions. This crate evaluates them in closed form and, where a
//! defining integral exists, by Monte Carlo and product-rule quadrature, then
//! quantifies the entanglement of the resulting two-object state.
//!
//! Modules:
//! - [`config`]: constants, materials, geometry and validity checks
//! - [`potentials`]: sphere potentials, multipole helpers, quadrature oracles
//! - [`amplitudes`]: branch amplitudes for every model
//! - [`entanglement`]: density matrices, negativity, separability
//! - [`dp`]: Diósi–Penrose density matrix with gravitational decoherence
//! - [`scan`]: mass/time sweeps, significance contours, CSV/JSON output
//! - [`validation`]: closed-form vs quadrature cross-checks

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitudes;
pub mod config;
pub mod dp;
pub mod entanglement;
pub mod error;
pub mod potentials;
pub mod scan;
pub mod validation;

pub use amplitudes::{AmplitudeSet, DysonOrder, GravityModel};
pub use config::{
    Branch, BranchPair, ExperimentConfig, Geometry, Material, PhysicalConstants, ValidityReport,
};
pub use dp::{DpCondition, DpParameters};
pub use entanglement::{DensityMatrix4, EntanglementReport};
pub use error::{Error, Result};
pub use potentials::{PotentialModel, Quadrature, QuadratureMethod, QuadratureResult, SphereSource};
pub use scan::{ContourPoint, ScanRow};

pub type Vec3 = nalgebra::Vector3<f64>;
pub use num_complex::Complex64;
