//! Branch amplitudes `α_ij` for each gravity model.
//!
//! Phases use the convention `α_ij = 1 + iφ_ij` for quantum gravity and
//! `e^{−i(φ_1i + φ_2j)}` for the local phases accumulated in semi-classical
//! gravity. Global conventions do not affect any entanglement measure.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Branch, BranchPair, ExperimentConfig, Object};
use crate::error::{Error, Result};
use crate::potentials::{potential_value, PotentialModel, Quadrature, QuadratureResult, SphereSource};

/// Which theory of gravity produces the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GravityModel {
    /// Newtonian phase `GM²t/(ħd_ij)`.
    QGNonRel,
    /// Retarded phase between point masses.
    QGRelativisticPoint,
    /// Retarded phase between uniform spheres, by quadrature.
    QGRelativisticSphere,
    /// Semi-classical mean-field gravity: local phases plus `β⁽⁴⁾`.
    CGSemiClassical,
    /// Quantum gravity including the virtual-matter amplitude `κ⁽⁴⁾`.
    QGVirtualMatter,
    /// Diósi–Penrose; described by a mixed state, see [`crate::dp`].
    DPStochastic,
}

impl fmt::Display for GravityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Highest Dyson order kept in an [`AmplitudeSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DysonOrder {
    First,
    Second,
    Fourth,
    /// Phases resummed to `e^{iφ}`.
    Exponentiated,
}

/// The four branch amplitudes in the order `LL, LR, RL, RR`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSet {
    pub alpha: [Complex64; 4],
    pub model: GravityModel,
    pub order: DysonOrder,
    /// False if some perturbative contribution has magnitude above 1.
    pub perturbative: bool,
}

impl AmplitudeSet {
    pub fn new(alpha: [Complex64; 4], model: GravityModel, order: DysonOrder) -> Self {
        Self {
            alpha,
            model,
            order,
            perturbative: true,
        }
    }

    pub fn get(&self, pair: BranchPair) -> Complex64 {
        self.alpha[pair.index()]
    }

    fn flag_contributions(mut self, magnitudes: impl IntoIterator<Item = f64>) -> Self {
        self.perturbative = magnitudes.into_iter().all(|m| m <= 1.0);
        self
    }
}

/// Newtonian entanglement phase `φ_ij = GM²t/(ħd_ij)`.
pub fn phase_nonrel(cfg: &ExperimentConfig, pair: BranchPair) -> f64 {
    let k = &cfg.constants;
    k.g * cfg.mass * cfg.mass * cfg.time / (k.hbar * cfg.branch_distance(pair))
}

/// `i(GM²/(ħc))(ct/d − 1)θ(ct − d)` for point masses.
pub fn gamma2_relativistic_point(cfg: &ExperimentConfig, pair: BranchPair) -> Complex64 {
    let k = &cfg.constants;
    let d = cfg.branch_distance(pair);
    let ct = k.c * cfg.time;
    if ct <= d {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, k.g * cfg.mass * cfg.mass / (k.hbar * k.c) * (ct / d - 1.0))
}

/// Retarded phase between the uniform spheres `1i` and `2j`:
/// `(iGM²/(ħcV²)) ∫∫ (ct/|x−y| − 1) θ(ct − |x−y|)`.
pub fn gamma2_relativistic_sphere(
    cfg: &ExperimentConfig,
    pair: BranchPair,
    quadrature: &Quadrature,
) -> Result<QuadratureResult<Complex64>> {
    let b1 = SphereSource::branch(cfg, Object::One, pair.i);
    let b2 = SphereSource::branch(cfg, Object::Two, pair.j);
    let k = &cfg.constants;
    let ct = k.c * cfg.time;
    let v = cfg.volume();
    let scale = k.g * cfg.mass * cfg.mass / (k.hbar * k.c * v * v);
    let d = cfg.branch_distance(pair);
    if ct <= d - 2.0 * cfg.radius {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            std_error: 0.0,
            n_samples: 0,
            method: quadrature.method(),
        });
    }
    let res = quadrature.integrate_two_balls(
        |x, y| {
            let r = (x - y).norm();
            if ct > r {
                ct / r - 1.0
            } else {
                0.0
            }
        },
        &b1,
        &b2,
    )?;
    Ok(res.map(|j| Complex64::new(0.0, scale * j), scale))
}

/// Local phase `φ_κi = (Mt/(ħV)) ∫ θ_κi Φ d³x` of branch `i` of object `κ`.
pub fn local_phase(
    cfg: &ExperimentConfig,
    object: Object,
    branch: Branch,
    model: &PotentialModel,
    quadrature: &Quadrature,
) -> Result<QuadratureResult> {
    let ball = SphereSource::branch(cfg, object, branch);
    let scale = cfg.mass * cfg.time / (cfg.constants.hbar * cfg.volume());
    let res = quadrature.integrate_ball(|x| potential_value(x, model, cfg), &ball)?;
    Ok(res.map(|v| scale * v, scale))
}

/// The four local phases `φ_κi`, indexed `[κ][i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPhases {
    pub phi: [[f64; 2]; 2],
    /// Largest quadrature standard error among the four.
    pub std_error: f64,
}

impl LocalPhases {
    pub fn get(&self, object: Object, branch: Branch) -> f64 {
        let k = match object {
            Object::One => 0,
            Object::Two => 1,
        };
        self.phi[k][branch.index()]
    }

    /// `φ_1i + φ_2j`.
    pub fn sum(&self, pair: BranchPair) -> f64 {
        self.get(Object::One, pair.i) + self.get(Object::Two, pair.j)
    }
}

/// All four local phases under `model`.
pub fn local_phases(
    cfg: &ExperimentConfig,
    model: &PotentialModel,
    quadrature: &Quadrature,
) -> Result<LocalPhases> {
    let mut phi = [[0.0; 2]; 2];
    let mut err: f64 = 0.0;
    for (k, object) in [Object::One, Object::Two].into_iter().enumerate() {
        for branch in Branch::BOTH {
            let r = local_phase(cfg, object, branch, model, quadrature)?;
            phi[k][branch.index()] = r.value;
            err = err.max(r.std_error);
        }
    }
    Ok(LocalPhases { phi, std_error: err })
}

/// `β⁽²⁾_ij = −φ_1i φ_2j`.
pub fn beta2(phases: &LocalPhases, pair: BranchPair) -> Complex64 {
    Complex64::new(-phases.get(Object::One, pair.i) * phases.get(Object::Two, pair.j), 0.0)
}

/// `α_ij = 1 − i(φ_1i + φ_2j) − ½(φ_1i + φ_2j)²`.
pub fn alpha_cg_second_order(phases: &LocalPhases) -> AmplitudeSet {
    let alpha = BranchPair::ALL.map(|p| {
        let s = phases.sum(p);
        Complex64::new(1.0 - 0.5 * s * s, -s)
    });
    let max = BranchPair::ALL.iter().map(|p| phases.sum(*p).abs()).fold(0.0, f64::max);
    AmplitudeSet::new(alpha, GravityModel::CGSemiClassical, DysonOrder::Second)
        .flag_contributions([max])
}

/// `α_ij = e^{−i(φ_1i + φ_2j)}`, a product of per-object phases.
pub fn alpha_cg_exponentiated(phases: &LocalPhases) -> AmplitudeSet {
    let alpha = BranchPair::ALL.map(|p| Complex64::from_polar(1.0, -phases.sum(p)));
    AmplitudeSet::new(alpha, GravityModel::CGSemiClassical, DysonOrder::Exponentiated)
}

/// `(c·G²m²M³Rt/(ħ³d_ij))` for the virtual-matter amplitudes.
fn virtual_matter_root(cfg: &ExperimentConfig, pair: BranchPair, c: f64) -> f64 {
    let k = &cfg.constants;
    let m = cfg.atom_mass();
    c * k.g * k.g * m * m * cfg.mass.powi(3) * cfg.radius * cfg.time
        / (k.hbar.powi(3) * cfg.branch_distance(pair))
}

/// `β⁽⁴⁾_ij = ((6/25)·iG²m²M³Rt/(ħ³d_ij))²`. Its magnitude on `RL` is `ϑ`.
pub fn beta4_closed(cfg: &ExperimentConfig, pair: BranchPair) -> Complex64 {
    let a = virtual_matter_root(cfg, pair, 6.0 / 25.0);
    Complex64::new(-a * a, 0.0)
}

/// `κ⁽⁴⁾_ij = ((24/25)·iG²m²M³Rt/(ħ³d_ij))²`, sixteen times `β⁽⁴⁾_ij`.
pub fn kappa4_closed(cfg: &ExperimentConfig, pair: BranchPair) -> Complex64 {
    let a = virtual_matter_root(cfg, pair, 24.0 / 25.0);
    Complex64::new(-a * a, 0.0)
}

/// `β⁽⁴⁾_ij = (M²t²m⁴/(4π²ħ⁶V²)) (i ∫∫ Φ(x)Φ(y) θ_1i θ_2j / |x − y|)²`.
///
/// The square root `Mtm²J/(2πħ³V)` is formed before squaring so that small
/// amplitudes do not underflow.
pub fn beta4_numeric(
    cfg: &ExperimentConfig,
    pair: BranchPair,
    model: &PotentialModel,
    quadrature: &Quadrature,
) -> Result<QuadratureResult<Complex64>> {
    let b1 = SphereSource::branch(cfg, Object::One, pair.i);
    let b2 = SphereSource::branch(cfg, Object::Two, pair.j);
    let res = quadrature.integrate_two_balls(
        |x, y| potential_value(x, model, cfg) * potential_value(y, model, cfg) / (x - y).norm(),
        &b1,
        &b2,
    )?;
    let m = cfg.atom_mass();
    let root_scale = cfg.mass * cfg.time * m * m / (2.0 * PI * cfg.constants.hbar.powi(3) * cfg.volume());
    let s = root_scale * res.value;
    let ds = root_scale * res.std_error;
    Ok(QuadratureResult {
        value: Complex64::new(-s * s, 0.0),
        std_error: 2.0 * s.abs() * ds,
        n_samples: res.n_samples,
        method: res.method,
    })
}

/// Static propagator kernel `f(k⁰, r) = ∫ d³k/(2π)³ e^{ik·r}/(k² − k⁰² + γ²)`:
/// a Yukawa decay for `|k⁰| < γ`, an outgoing wave for `|k⁰| > γ`.
pub fn propagator_kernel_f(k0: f64, r: f64, gamma: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("propagator kernel needs r > 0, got {r}")));
    }
    let base = 1.0 / (4.0 * PI * r);
    let (a, g) = (k0.abs(), gamma.abs());
    let v = if a < g {
        Complex64::new(base * (-r * ((g - a) * (g + a)).sqrt()).exp(), 0.0)
    } else if a > g {
        Complex64::from_polar(base, r * ((a - g) * (a + g)).sqrt())
    } else {
        Complex64::new(base, 0.0)
    };
    Ok(v)
}

/// Natural log of the free-propagation suppression `e^{−2mcd_ij/ħ}`.
pub fn free_suppression_log(cfg: &ExperimentConfig, pair: BranchPair) -> f64 {
    let k = &cfg.constants;
    -2.0 * cfg.atom_mass() * k.c * cfg.branch_distance(pair) / k.hbar
}

/// Rescales `φ` or `ϑ` by `Δx²/d_RL²` for superpositions smaller than the
/// separation.
pub fn effective_parameter(raw: f64, cfg: &ExperimentConfig) -> f64 {
    let dx = cfg.superposition_size(Object::One);
    let d = cfg.closest_separation();
    raw * (dx / d).powi(2)
}

/// Options for [`amplitudes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeOptions {
    pub quadrature: Quadrature,
    /// Resum the quantum-gravity phase to `e^{iφ}`.
    pub exponentiate: bool,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        Self {
            quadrature: Quadrature::ProductRule { order: 16 },
            exponentiate: false,
        }
    }
}

/// Assembles the branch amplitudes of `model`.
///
/// `DPStochastic` has no pure-state amplitudes and yields a domain error; use
/// [`crate::dp::dp_density_matrix`].
pub fn amplitudes(
    cfg: &ExperimentConfig,
    model: GravityModel,
    opts: &AmplitudeOptions,
) -> Result<AmplitudeSet> {
    let phis = BranchPair::ALL.map(|p| phase_nonrel(cfg, p));
    let max_phi = phis.iter().copied().fold(0.0, f64::max);
    let qg_phase = |phi: f64| {
        if opts.exponentiate {
            Complex64::from_polar(1.0, phi)
        } else {
            Complex64::new(1.0, phi)
        }
    };
    let qg_order = if opts.exponentiate {
        DysonOrder::Exponentiated
    } else {
        DysonOrder::Second
    };
    let set = match model {
        GravityModel::QGNonRel => AmplitudeSet::new(phis.map(qg_phase), model, qg_order)
            .flag_contributions(if opts.exponentiate { vec![] } else { vec![max_phi] }),
        GravityModel::QGRelativisticPoint => {
            let g = BranchPair::ALL.map(|p| gamma2_relativistic_point(cfg, p));
            AmplitudeSet::new(g.map(|g| 1.0 + g), model, DysonOrder::Second)
                .flag_contributions(g.iter().map(|g| g.norm()))
        }
        GravityModel::QGRelativisticSphere => {
            let mut g = [Complex64::new(0.0, 0.0); 4];
            for p in BranchPair::ALL {
                g[p.index()] = gamma2_relativistic_sphere(cfg, p, &opts.quadrature)?.value;
            }
            AmplitudeSet::new(g.map(|g| 1.0 + g), model, DysonOrder::Second)
                .flag_contributions(g.iter().map(|g| g.norm()))
        }
        GravityModel::CGSemiClassical => {
            let phases = local_phases(cfg, &PotentialModel::SemiClassicalMean, &opts.quadrature)?;
            let b4 = BranchPair::ALL.map(|p| beta4_closed(cfg, p));
            let alpha = BranchPair::ALL
                .map(|p| Complex64::from_polar(1.0, -phases.sum(p)) * (1.0 + b4[p.index()]));
            AmplitudeSet::new(alpha, model, DysonOrder::Fourth)
                .flag_contributions(b4.iter().map(|b| b.norm()))
        }
        GravityModel::QGVirtualMatter => {
            let k4 = BranchPair::ALL.map(|p| kappa4_closed(cfg, p));
            let alpha = BranchPair::ALL
                .map(|p| Complex64::from_polar(1.0, phis[p.index()]) * (1.0 + k4[p.index()]));
            AmplitudeSet::new(alpha, model, DysonOrder::Fourth)
                .flag_contributions(k4.iter().map(|k| k.norm()))
        }
        GravityModel::DPStochastic => {
            return Err(Error::Domain(
                "the Diósi–Penrose model yields a mixed state, not branch amplitudes".into(),
            ))
        }
    };
    for a in &set.alpha {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite amplitude {a} for {model}")));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Material, PhysicalConstants, PLANCK_MASS};
    use approx::assert_relative_eq;

    fn exp_cfg() -> ExperimentConfig {
        ExperimentConfig::collinear(1e-14, 2.0, 250e-6, 200e-6, Material::ytterbium()).unwrap()
    }

    #[test]
    fn phase_reference_value() {
        let phi = phase_nonrel(&exp_cfg(), BranchPair::RL);
        let k = PhysicalConstants::CODATA_2018;
        assert_relative_eq!(phi, k.g * 1e-28 * 2.0 / (k.hbar * 200e-6), max_relative = 1e-15);
        assert_relative_eq!(phi, 0.632_89, max_relative = 1e-4);
    }

    #[test]
    fn phase_scalings() {
        let c = exp_cfg();
        let phi = phase_nonrel(&c, BranchPair::RL);
        assert_eq!(phase_nonrel(&c.clone().with_time(0.0), BranchPair::RL), 0.0);
        let mut heavy = c.clone();
        heavy.mass *= 2.0;
        assert_relative_eq!(phase_nonrel(&heavy, BranchPair::RL), 4.0 * phi, max_relative = 1e-15);
        let mut far = c;
        far.d_rl *= 2.0;
        assert_relative_eq!(phase_nonrel(&far, BranchPair::RL), 0.5 * phi, max_relative = 1e-15);
    }

    #[test]
    fn retarded_phase_light_cone() {
        let c = exp_cfg().with_constants(PhysicalConstants::new(1.0, 1.0, 1.0).unwrap());
        let d = c.branch_distance(BranchPair::RL);
        assert_eq!(gamma2_relativistic_point(&c.clone().with_time(0.5 * d), BranchPair::RL).norm(), 0.0);
        assert_eq!(gamma2_relativistic_point(&c.clone().with_time(d), BranchPair::RL).norm(), 0.0);
        let just_after = gamma2_relativistic_point(&c.clone().with_time(d * (1.0 + 1e-12)), BranchPair::RL);
        assert!(just_after.norm() < 1e-9);
        let g = gamma2_relativistic_point(&c.clone().with_time(2.0 * d), BranchPair::RL);
        assert_relative_eq!(g.im, c.mass * c.mass, max_relative = 1e-14);
        assert_eq!(g.re, 0.0);
    }

    #[test]
    fn retarded_phase_far_limit() {
        let c = exp_cfg();
        let d = c.branch_distance(BranchPair::RL);
        let t = 1e6 * d / c.constants.c;
        let c = c.with_time(t);
        let g = gamma2_relativistic_point(&c, BranchPair::RL);
        let phi = phase_nonrel(&c, BranchPair::RL);
        assert_relative_eq!((g.im / phi - 1.0).abs(), 1e-6, max_relative = 1e-9);
    }

    #[test]
    fn beta4_reference_values() {
        let planck = ExperimentConfig::collinear_scaled(PLANCK_MASS, 1.0, 10.0, 10.0, Material::ytterbium()).unwrap();
        let root_rate = beta4_closed(&planck, BranchPair::RL).norm().sqrt();
        assert_relative_eq!(root_rate, 7.7557e7, max_relative = 1e-4);
        let t = 0.1f64.sqrt() / root_rate;
        assert_relative_eq!(t, 4.0774e-9, max_relative = 1e-4);

        let small = ExperimentConfig::collinear_scaled(1e-14, 2.0, 10.0, 10.0, Material::ytterbium()).unwrap();
        let vartheta = beta4_closed(&small, BranchPair::RL).norm();
        assert_relative_eq!(vartheta, 2.26e-22, max_relative = 1e-2);
        assert_relative_eq!(phase_nonrel(&small, BranchPair::RL), 18.03, max_relative = 1e-3);
    }

    #[test]
    fn beta4_is_real_negative_and_vanishes_without_time_or_gravity() {
        let c = exp_cfg();
        let b = beta4_closed(&c, BranchPair::RL);
        assert!(b.re < 0.0 && b.im == 0.0);
        assert_eq!(beta4_closed(&c.clone().with_time(0.0), BranchPair::RL).norm(), 0.0);
        let no_g = c.with_constants(PhysicalConstants { g: 0.0, ..PhysicalConstants::CODATA_2018 });
        assert_eq!(beta4_closed(&no_g, BranchPair::RL).norm(), 0.0);
    }

    #[test]
    fn beta4_pair_scaling() {
        let c = exp_cfg();
        let rl = beta4_closed(&c, BranchPair::RL);
        for p in BranchPair::ALL {
            let ratio = beta4_closed(&c, p) / rl;
            let expected = (c.branch_distance(BranchPair::RL) / c.branch_distance(p)).powi(2);
            assert_relative_eq!(ratio.re, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn kappa4_is_sixteen_beta4() {
        let c = exp_cfg();
        for p in BranchPair::ALL {
            let r = kappa4_closed(&c, p) / beta4_closed(&c, p);
            assert_relative_eq!(r.re, 16.0, max_relative = 1e-12);
        }
        assert_eq!(kappa4_closed(&c.with_time(0.0), BranchPair::RL).norm(), 0.0);
    }

    #[test]
    fn closed_forms_are_bit_reproducible() {
        let c = exp_cfg();
        assert_eq!(beta4_closed(&c, BranchPair::LR), beta4_closed(&c.clone(), BranchPair::LR));
        assert_eq!(phase_nonrel(&c, BranchPair::LL).to_bits(), phase_nonrel(&c, BranchPair::LL).to_bits());
    }

    #[test]
    fn local_phase_of_constant_potential() {
        let c = exp_cfg();
        let phi0 = -3.5e-12;
        let model = PotentialModel::constant(phi0);
        for q in [Quadrature::ProductRule { order: 6 }, Quadrature::MonteCarlo { samples: 20_000, seed: 1 }] {
            let r = local_phase(&c, Object::Two, Branch::L, &model, &q).unwrap();
            assert_relative_eq!(r.value, c.mass * c.time * phi0 / c.constants.hbar, max_relative = 1e-12);
        }
    }

    #[test]
    fn local_phase_mirror_symmetry() {
        let c = ExperimentConfig::collinear_scaled(1e-14, 1.0, 10.0, 10.0, Material::ytterbium()).unwrap();
        let q = Quadrature::ProductRule { order: 12 };
        let p = local_phases(&c, &PotentialModel::SemiClassicalMean, &q).unwrap();
        let d1 = p.get(Object::One, Branch::R) - p.get(Object::One, Branch::L);
        let d2 = p.get(Object::Two, Branch::R) - p.get(Object::Two, Branch::L);
        assert_relative_eq!(d1, -d2, max_relative = 1e-10);
    }

    #[test]
    fn beta2_and_second_order_expansion() {
        let phases = LocalPhases { phi: [[0.1, 0.3], [0.1, -0.2]], std_error: 0.0 };
        assert_relative_eq!(beta2(&phases, BranchPair::LL).re, -0.01, max_relative = 1e-14);
        let zero = LocalPhases { phi: [[0.0; 2]; 2], std_error: 0.0 };
        assert_eq!(beta2(&zero, BranchPair::RR).norm(), 0.0);
        assert!(alpha_cg_second_order(&zero).alpha.iter().all(|a| *a == Complex64::new(1.0, 0.0)));

        let set = alpha_cg_second_order(&phases);
        for p in BranchPair::ALL {
            let (a, b) = (phases.get(Object::One, p.i), phases.get(Object::Two, p.j));
            let second = set.get(p).re - 1.0;
            assert_relative_eq!(second, beta2(&phases, p).re - 0.5 * (a * a + b * b), max_relative = 1e-13);
            // second-order part of e^{−i(a+b)}
            let taylor = -(a + b).powi(2) / 2.0;
            assert_relative_eq!(second, taylor, max_relative = 1e-13);
        }
    }

    #[test]
    fn propagator_kernel_branches() {
        let r = 2.0;
        let base = 1.0 / (4.0 * PI * r);
        assert_relative_eq!(propagator_kernel_f(3.0, r, 3.0).unwrap().re, base);
        let osc = propagator_kernel_f(-1.5, r, 0.0).unwrap();
        assert_relative_eq!(osc.re, base * (1.5 * r).cos(), max_relative = 1e-14);
        assert_relative_eq!(osc.im, base * (1.5 * r).sin(), max_relative = 1e-14);
        let yuk = propagator_kernel_f(0.0, r, 0.7).unwrap();
        assert_relative_eq!(yuk.re, base * (-0.7 * r).exp(), max_relative = 1e-14);
        assert!(matches!(propagator_kernel_f(1.0, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn propagator_kernel_continuous_at_mass_shell() {
        let (r, g) = (1.3, 2.0);
        let at = propagator_kernel_f(g, r, g).unwrap();
        for eps in [1e-12, -1e-12] {
            let near = propagator_kernel_f(g + eps, r, g).unwrap();
            assert!((near - at).norm() < 1e-4 * at.norm());
        }
    }

    #[test]
    fn free_suppression_reference() {
        let c = ExperimentConfig::collinear(1e-14, 1.0, 1e-3, 100e-6, Material::ytterbium()).unwrap();
        let v = free_suppression_log(&c, BranchPair::RL);
        assert_relative_eq!(v, -1.6333e14, max_relative = 1e-3);
        let mut far = c.clone();
        far.d_rl *= 2.0;
        assert_relative_eq!(free_suppression_log(&far, BranchPair::RL), 2.0 * v, max_relative = 1e-14);
        let mut massless = c;
        massless.material.atom_mass = 0.0;
        assert_eq!(free_suppression_log(&massless, BranchPair::RL), 0.0);
    }

    #[test]
    fn effective_parameter_scaling() {
        let c = exp_cfg();
        let mut same = c.clone();
        same.dx = same.d_rl;
        assert_relative_eq!(effective_parameter(0.3, &same), 0.3, max_relative = 1e-15);
        let mut small = c;
        small.dx = small.d_rl / 10.0;
        assert_relative_eq!(effective_parameter(0.3, &small), 0.003, max_relative = 1e-13);
    }

    #[test]
    fn model_assembly() {
        let c = exp_cfg();
        let opts = AmplitudeOptions::default();
        let qg = amplitudes(&c, GravityModel::QGNonRel, &opts).unwrap();
        assert_relative_eq!(qg.get(BranchPair::RL).im, phase_nonrel(&c, BranchPair::RL));
        assert!(qg.perturbative);
        let exp = amplitudes(&c, GravityModel::QGNonRel, &AmplitudeOptions { exponentiate: true, ..opts }).unwrap();
        assert!(exp.alpha.iter().all(|a| (a.norm() - 1.0).abs() < 1e-15));
        assert_eq!(exp.order, DysonOrder::Exponentiated);
        assert!(amplitudes(&c, GravityModel::DPStochastic, &opts).is_err());

        let big = ExperimentConfig::collinear_scaled(1e-14, 2.0, 10.0, 10.0, Material::ytterbium()).unwrap();
        assert!(!amplitudes(&big, GravityModel::QGNonRel, &opts).unwrap().perturbative);
        let cg = amplitudes(&big, GravityModel::CGSemiClassical, &opts).unwrap();
        assert!(cg.perturbative);
        assert!(cg.alpha.iter().all(|a| (a.norm() - 1.0).abs() < 1e-12));
    }
}
