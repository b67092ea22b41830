//! Normalised overlap of two branch spheres.

use std::f64::consts::PI;

use crate::config::{Branch, ExperimentConfig, Object};

/// `(1/V²)|∫ θ(R − |x − X_κi|) θ(R − |x − X_κj|) d³x|²` for object `κ`:
/// the squared fraction of the sphere volume shared by branches `i` and `j`.
pub fn overlap_integral(cfg: &ExperimentConfig, object: Object, i: Branch, j: Branch) -> f64 {
    let d = (cfg.center(object, i) - cfg.center(object, j)).norm();
    lens_fraction(cfg.radius, d).powi(2)
}

/// Volume of the intersection of two radius-`r` balls at distance `d`, over `V`.
fn lens_fraction(r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    let lens = PI * (2.0 * r - d).powi(2) * (d + 4.0 * r) / 12.0;
    lens / (4.0 * PI * r.powi(3) / 3.0)
}
