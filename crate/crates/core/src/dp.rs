//! Diósi–Penrose model: Newtonian quantum phases plus gravitational
//! decoherence, solved exactly in the four-branch basis.
//!
//! With `a = (i, j)`, `b = (k, l)` and rates `U_ij = GM²/(ħd_ij)`,
//!
//! ```text
//! ρ_ab = ¼ e^{i(U_b − U_a)t} e^{−Γ_ab t}
//! Γ_ab = (E_G1/ħ)[i ≠ k] + (E_G2/ħ)[j ≠ l] + U_ij − U_il − U_kj + U_kl
//! ```
//!
//! All exponents carry `1/ħ` so that `σ_G = E_G t/ħ` is dimensionless.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::kappa4_closed;
use crate::config::{BranchPair, ExperimentConfig, Object};
use crate::entanglement::DensityMatrix4;
use crate::error::{Error, Result};

/// Gravitational self-energy of the difference of two uniform-sphere mass
/// distributions a distance `dx` apart, J.
pub fn e_g(mass: f64, radius: f64, dx: f64, g: f64) -> f64 {
    let lambda = dx / (2.0 * radius);
    let scale = 6.0 * g * mass * mass / (5.0 * radius);
    if lambda <= 1.0 {
        scale * (5.0 / 3.0 * lambda.powi(2) - 1.25 * lambda.powi(3) + lambda.powi(5) / 6.0)
    } else {
        scale * (1.0 - 5.0 / (12.0 * lambda))
    }
}

/// Inputs of the Diósi–Penrose density matrix at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpParameters {
    /// `E_G1`, `E_G2` in J.
    pub e_g1: f64,
    pub e_g2: f64,
    /// `U_ij` in s⁻¹, order `LL, LR, RL, RR`.
    pub u: [f64; 4],
    /// `E_G1 t/ħ`.
    pub sigma_g: f64,
    pub hbar: f64,
}

impl DpParameters {
    pub fn from_config(cfg: &ExperimentConfig, t: f64) -> Self {
        let k = &cfg.constants;
        let e_g1 = e_g(cfg.mass, cfg.radius, cfg.superposition_size(Object::One), k.g);
        let e_g2 = e_g(cfg.mass, cfg.radius, cfg.superposition_size(Object::Two), k.g);
        let u = BranchPair::ALL.map(|p| k.g * cfg.mass * cfg.mass / (k.hbar * cfg.branch_distance(p)));
        Self {
            e_g1,
            e_g2,
            u,
            sigma_g: e_g1 * t / k.hbar,
            hbar: k.hbar,
        }
    }

    /// Decay rate `Γ_ab`, s⁻¹.
    pub fn gamma(&self, a: BranchPair, b: BranchPair) -> f64 {
        let mut g = 0.0;
        if a.i != b.i {
            g += self.e_g1 / self.hbar;
        }
        if a.j != b.j {
            g += self.e_g2 / self.hbar;
        }
        let u = |i, j| self.u[BranchPair::new(i, j).index()];
        g + u(a.i, a.j) - u(a.i, b.j) - u(b.i, a.j) + u(b.i, b.j)
    }
}

/// Entries `¼ e^{i(U_b − U_a)t} e^{−Γ_ab t}` without validation. Only
/// parameters derived from one mass distribution give a positive matrix.
pub fn dp_matrix_entries(p: &DpParameters, t: f64) -> Matrix4<Complex64> {
    Matrix4::from_fn(|a, b| {
        let (pa, pb) = (BranchPair::from_index(a), BranchPair::from_index(b));
        if a == b {
            return Complex64::new(0.25, 0.0);
        }
        let phase = (p.u[b] - p.u[a]) * t;
        Complex64::from_polar(0.25 * (-p.gamma(pa, pb) * t).exp(), phase)
    })
}

/// Exact density matrix for the given parameters.
pub fn dp_density_matrix_from_params(p: &DpParameters, t: f64) -> Result<DensityMatrix4> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    DensityMatrix4::new(dp_matrix_entries(p, t))
}

/// Exact Diósi–Penrose density matrix at time `t` for `cfg`.
pub fn dp_density_matrix(cfg: &ExperimentConfig, t: f64) -> Result<DensityMatrix4> {
    dp_density_matrix_from_params(&DpParameters::from_config(cfg, t), t)
}

/// `ρ(0) + ¼(i(U_b − U_a) − Γ_ab)t`, the first-order expansion.
pub fn dp_first_order(p: &DpParameters, t: f64) -> Matrix4<Complex64> {
    Matrix4::from_fn(|a, b| {
        let (pa, pb) = (BranchPair::from_index(a), BranchPair::from_index(b));
        let gamma = if a == b { 0.0 } else { p.gamma(pa, pb) };
        Complex64::new(0.25, 0.0) + 0.25 * Complex64::new(-gamma, p.u[b] - p.u[a]) * t
    })
}

/// The approximation for `d_RL ≪ Δx`, `Δx ≫ R`: only `U_RL` survives and
/// both objects share `E_G`.
pub fn dp_simplified(e_g: f64, u_rl: f64, t: f64, hbar: f64) -> Matrix4<Complex64> {
    let w = e_g / hbar;
    let e = |rate: f64, phase: f64| Complex64::from_polar(0.25 * (-rate * t).exp(), phase * t);
    let one = Complex64::new(0.25, 0.0);
    Matrix4::new(
        one,
        e(w, 0.0),
        e(w, u_rl),
        e(2.0 * w - u_rl, 0.0),
        e(w, 0.0),
        one,
        e(2.0 * w + u_rl, u_rl),
        e(w, 0.0),
        e(w, -u_rl),
        e(2.0 * w + u_rl, -u_rl),
        one,
        e(w, -u_rl),
        e(2.0 * w - u_rl, 0.0),
        e(w, 0.0),
        e(w, u_rl),
        one,
    )
}

/// `|κ⁽⁴⁾_RL|` against `σ_G` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpCondition {
    pub kappa4_mag: f64,
    pub sigma_g: f64,
    /// `|κ⁽⁴⁾_RL| > σ_G`.
    pub entangling: bool,
}

pub fn dp_entanglement_condition(cfg: &ExperimentConfig, t: f64) -> DpCondition {
    let cfg_t = cfg.clone().with_time(t);
    let kappa4_mag = kappa4_closed(&cfg_t, BranchPair::RL).norm();
    let sigma_g = DpParameters::from_config(cfg, t).sigma_g;
    DpCondition {
        kappa4_mag,
        sigma_g,
        entangling: kappa4_mag > sigma_g,
    }
}

/// Time after which `|κ⁽⁴⁾_RL| > σ_G`, by bisection in `log t` over `[t_lo, t_hi]`.
pub fn dp_threshold_time(cfg: &ExperimentConfig, t_lo: f64, t_hi: f64, rel_tol: f64) -> Result<f64> {
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::InvalidRange(format!("bad bracket [{t_lo}, {t_hi}]")));
    }
    let excess = |t: f64| {
        let c = dp_entanglement_condition(cfg, t);
        c.kappa4_mag - c.sigma_g
    };
    let (mut lo, mut hi) = (t_lo.ln(), t_hi.ln());
    if excess(t_lo) > 0.0 || excess(t_hi) <= 0.0 {
        return Err(Error::InvalidRange(format!(
            "no threshold in [{t_lo:e}, {t_hi:e}] s"
        )));
    }
    while hi - lo > rel_tol {
        let mid = 0.5 * (lo + hi);
        if excess(mid.exp()) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
