//! Multipole solution for the potential of an axially symmetric density, and
//! the double-sphere Coulomb integral it is used for.
//!
//! For `ρ(y, θ) = Σ ρ_n(y) P_n(cos θ)` the Coulomb potential is
//! `Σ Φ_n(x) P_n(cos θ)` with
//!
//! ```text
//! Φ_n(x) = −2π/((n+½) x^{n+1}) ∫₀^x y^{n+2} ρ_n dy − 2π x^n/(n+½) ∫_x^∞ y^{1−n} ρ_n dy
//! ```
//!
//! (sign convention of a gravitational potential with `G = 1`).

use std::f64::consts::PI;

use super::quadrature::{integrate_adaptive, integrate_to_infinity, legendre, BallRule};
use super::SphereSource;
use crate::error::{Error, Result};
use crate::Vec3;

const RADIAL_REL_TOL: f64 = 1e-11;
const RADIAL_ABS_TOL: f64 = 1e-300;

/// Sums `∫ f` over `[lo, hi]` split at the given interior breakpoints.
fn integrate_split(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, breakpoints: &[f64]) -> Result<f64> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut a = lo;
    for b in cuts.into_iter().chain(std::iter::once(hi)) {
        total += integrate_adaptive(f, a, b, RADIAL_ABS_TOL, RADIAL_REL_TOL)?.0;
        a = b;
    }
    Ok(total)
}

/// Multipole coefficient `Φ_n(x)` of the radial profile `rho_n`.
///
/// `breakpoints` lists radii where `rho_n` is discontinuous (e.g. a sphere
/// surface); the radial integrals are split there.
pub fn multipole_phi_n(
    n: usize,
    rho_n: impl Fn(f64) -> f64,
    x: f64,
    breakpoints: &[f64],
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("multipole radius must be positive, got {x}")));
    }
    let nf = n as f64;
    let inner_f = |y: f64| y.powi(n as i32 + 2) * rho_n(y);
    let inner = integrate_split(&inner_f, 0.0, x, breakpoints)?;

    let outer_f = |y: f64| y.powf(1.0 - nf) * rho_n(y);
    let last = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > x)
        .fold(x, f64::max);
    let mut outer = integrate_split(&outer_f, x, last, breakpoints)?;
    let (tail, err) = integrate_to_infinity(outer_f, last, RADIAL_ABS_TOL, RADIAL_REL_TOL)
        .map_err(|e| Error::Quadrature(format!("outer integral of multipole n = {n} at x = {x}: {e}")))?;
    if !tail.is_finite() || !err.is_finite() {
        return Err(Error::Quadrature(format!(
            "outer integral of multipole n = {n} at x = {x} diverged"
        )));
    }
    outer += tail;
    // y·f(y) must fall off for the tail to converge
    let (y1, y2) = (last.max(1.0) * 1e6, last.max(1.0) * 1e12);
    let (w1, w2) = ((y1 * outer_f(y1)).abs(), (y2 * outer_f(y2)).abs());
    if w2 > 0.0 && w2 >= 0.5 * w1 {
        return Err(Error::Quadrature(format!(
            "outer integral of multipole n = {n} at x = {x} does not decay"
        )));
    }

    let norm = 2.0 * PI / (nf + 0.5);
    Ok(-norm * inner / x.powi(n as i32 + 1) - norm * x.powi(n as i32) * outer)
}

/// Closed form of the double-sphere Coulomb integral in the `n = 0` truncation:
///
/// ```text
/// I ≈ (8π²R³/(3d)) (R + (R² − Δx²)/(2Δx) ln((Δx + R)/(Δx − R)))
/// ```
///
/// Requires `Δx > R`; meant for `d ≫ R`.
pub fn double_sphere_coulomb_closed(radius: f64, dx: f64, d: f64) -> Result<f64> {
    if !(radius > 0.0 && d > 0.0) {
        return Err(Error::Domain(format!(
            "need R > 0 and d > 0, got R = {radius}, d = {d}"
        )));
    }
    if !(dx > radius) {
        return Err(Error::Domain(format!(
            "closed form needs dx > R, got dx = {dx}, R = {radius}"
        )));
    }
    let r = radius;
    let log = ((dx + r) / (dx - r)).ln();
    Ok(8.0 * PI * PI * r.powi(3) / (3.0 * d) * (r + (r * r - dx * dx) / (2.0 * dx) * log))
}

/// Multipole series for
///
/// ```text
/// I = ∫_{|x−Δ₁|≤R} d³x ∫_{|y|≤R} d³y 1 / (|x| |x − y| |y − d|)
/// ```
///
/// keeping `n_terms` Legendre terms of the expansion of `1/|y − d|`. The
/// radial coefficients come from [`multipole_phi_n`] and the outer integral
/// over the displaced ball from a product rule of the given order.
pub fn coulomb_integral_series(
    radius: f64,
    delta1: Vec3,
    d_vec: Vec3,
    n_terms: usize,
    order: usize,
) -> Result<f64> {
    let d = d_vec.norm();
    if !(radius > 0.0) || !(d > radius) {
        return Err(Error::Domain(format!(
            "series needs R > 0 and |d| > R, got R = {radius}, |d| = {d}"
        )));
    }
    if delta1.norm() <= radius {
        return Err(Error::Domain(
            "displaced ball must not contain the origin".into(),
        ));
    }
    let axis = d_vec / d;
    let ball = SphereSource::new(delta1, radius, 1.0)?;
    let rule = BallRule::new(&ball, order);

    let mut total = 0.0;
    for (x, w) in rule.points.iter().zip(&rule.weights) {
        let r = x.norm();
        let cos = x.dot(&axis) / r;
        let mut acc = 0.0;
        for n in 0..n_terms {
            let rho_n = |y: f64| {
                if y <= radius {
                    y.powi(n as i32) / d.powi(n as i32 + 1)
                } else {
                    0.0
                }
            };
            let coeff = -multipole_phi_n(n, rho_n, r, &[radius])?;
            acc += coeff * legendre(n, cos);
        }
        total += w * acc / r;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball_profile(rho: f64, r: f64) -> impl Fn(f64) -> f64 {
        move |y| if y <= r { rho } else { 0.0 }
    }

    #[test]
    fn monopole_outside_uniform_ball() {
        let (rho, r) = (2.5, 1.5);
        let v = multipole_phi_n(0, ball_profile(rho, r), 4.0, &[r]).unwrap();
        assert_relative_eq!(v, -(4.0 * PI * rho * r.powi(3) / 3.0) / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn monopole_inside_uniform_ball() {
        let (rho, r) = (2.5, 1.5);
        for x in [0.1, 0.7, 1.2] {
            let v = multipole_phi_n(0, ball_profile(rho, r), x, &[r]).unwrap();
            assert_relative_eq!(v, -2.0 * PI * rho * (r * r - x * x / 3.0), max_relative = 1e-10);
        }
    }

    #[test]
    fn dipole_of_uniform_cos_profile() {
        // ρ = cos θ inside radius a: far field −πa⁴/(3x²), interior −(4π/3)(x²/4 + x(a − x))
        let a = 1.2;
        let rho_1 = |y: f64| if y <= a { 1.0 } else { 0.0 };
        let out = multipole_phi_n(1, rho_1, 3.0, &[a]).unwrap();
        assert_relative_eq!(out, -PI * a.powi(4) / 27.0, max_relative = 1e-10);
        let x = 0.5;
        let inside = multipole_phi_n(1, rho_1, x, &[a]).unwrap();
        assert_relative_eq!(inside, -4.0 * PI / 3.0 * (x * x / 4.0 + x * (a - x)), max_relative = 1e-10);
    }

    #[test]
    fn multipole_rejects_bad_radius() {
        assert!(multipole_phi_n(0, |_| 1.0, 0.0, &[]).is_err());
    }

    #[test]
    fn multipole_reports_divergent_tail() {
        // y^{1-n} ρ with ρ = 1 and n = 0 grows without bound
        let err = multipole_phi_n(0, |_| 1.0, 1.0, &[]).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)), "{err}");
    }

    #[test]
    fn closed_form_reference_value() {
        let v = double_sphere_coulomb_closed(1.0, 3.0, 20.0).unwrap();
        // 8π²/60 · (1 − (4/3) ln 2)
        let expected = 8.0 * PI * PI / 60.0 * (1.0 - 4.0 / 3.0 * 2f64.ln());
        assert_relative_eq!(v, expected, max_relative = 1e-14);
        assert_relative_eq!(v, 0.09976, max_relative = 1e-3);
    }

    #[test]
    fn closed_form_domain() {
        assert!(matches!(double_sphere_coulomb_closed(1.0, 1.0, 20.0), Err(Error::Domain(_))));
        assert!(matches!(double_sphere_coulomb_closed(1.0, 0.5, 20.0), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_decays_like_inverse_square() {
        // R + (R² − Δx²)/(2Δx) ln((Δx+R)/(Δx−R)) = 2R³/(3Δx²) + O(Δx⁻⁴)
        let (r, d) = (1.0, 20.0);
        let dx = 1e3;
        let v = double_sphere_coulomb_closed(r, dx, d).unwrap();
        let lead = 8.0 * PI * PI * r.powi(3) / (3.0 * d) * (2.0 * r.powi(3) / (3.0 * dx * dx));
        assert_relative_eq!(v, lead, max_relative = 1e-5);
    }

    #[test]
    fn closed_form_scales_as_length_cubed() {
        let base = double_sphere_coulomb_closed(1.0, 3.0, 20.0).unwrap();
        let lambda: f64 = 3.7;
        let scaled = double_sphere_coulomb_closed(lambda, 3.0 * lambda, 20.0 * lambda).unwrap();
        assert_relative_eq!(scaled, base * lambda.powi(3), max_relative = 1e-12);
    }

    #[test]
    fn series_first_term_matches_closed_form() {
        // The n = 0 term, integrated exactly, is the closed form
        let v = coulomb_integral_series(1.0, Vec3::new(3.0, 0.0, 0.0), Vec3::new(-20.0, 0.0, 0.0), 1, 24)
            .unwrap();
        let closed = double_sphere_coulomb_closed(1.0, 3.0, 20.0).unwrap();
        assert_relative_eq!(v, closed, max_relative = 1e-8);
    }
}
