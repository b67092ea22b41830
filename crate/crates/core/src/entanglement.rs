//! Two-object branch states, density matrices and negativity.
//!
//! Basis order is `LL, LR, RL, RR`, i.e. index `2i + j` for object 1 in
//! branch `i` and object 2 in branch `j`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::AmplitudeSet;
use crate::config::BranchPair;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
/// Relative tolerance of the factorization test `α_LL α_RR = α_LR α_RL`.
pub const SEPARABLE_TOL: f64 = 1e-12;

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    entries: Matrix4<Complex64>,
}

fn hermiticity_defect(m: &Matrix4<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl DensityMatrix4 {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self> {
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = hermiticity_defect(&entries);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian: max |ρ − ρ†| = {herm:e}"
            )));
        }
        let tr = entries.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let rho = Self { entries };
        let min = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn get(&self, a: BranchPair, b: BranchPair) -> Complex64 {
        self.entries[(a.index(), b.index())]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.entries)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }

    /// Row-major `[re, im]` pairs, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..4)
            .map(|r| (0..4).map(|c| {
                let z = self.entries[(r, c)];
                [z.re, z.im]
            }).collect())
            .collect()
    }
}

impl Serialize for DensityMatrix4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// `ρ^{T₂}`: `⟨ij|ρ^{T₂}|kl⟩ = ⟨il|ρ|kj⟩`.
pub fn partial_transpose(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|a, b| {
        let (i, j) = (a / 2, a % 2);
        let (k, l) = (b / 2, b % 2);
        m[(2 * i + l, 2 * k + j)]
    })
}

/// `|ψ⟩⟨ψ|` with `ψ ∝ (α_LL, α_LR, α_RL, α_RR)/2`, normalized.
pub fn assemble_state(amps: &AmplitudeSet) -> Result<DensityMatrix4> {
    pure_state(&amps.alpha)
}

/// Density matrix of the normalized pure state with the given components.
pub fn pure_state(psi: &[Complex64; 4]) -> Result<DensityMatrix4> {
    if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidDensityMatrix("non-finite amplitude".into()));
    }
    // scale by the largest entry first so tiny or huge amplitudes normalize cleanly
    let max = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::InvalidDensityMatrix("all amplitudes are zero".into()));
    }
    let scaled = psi.map(|z| z / max);
    let norm = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v = scaled.map(|z| z / norm);
    let m = Matrix4::from_fn(|a, b| v[a] * v[b].conj());
    DensityMatrix4::new(m)
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T₂}`.
pub fn negativity(rho: &DensityMatrix4) -> f64 {
    negativity_from_pt(&partial_transpose(&rho.entries))
}

/// Negativity of an arbitrary Hermitian 4×4 matrix.
pub fn negativity_of_matrix(m: &Matrix4<Complex64>) -> Result<f64> {
    let herm = hermiticity_defect(m);
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "negativity needs a Hermitian matrix, max |ρ − ρ†| = {herm:e}"
        )));
    }
    Ok(negativity_from_pt(&partial_transpose(m)))
}

fn negativity_from_pt(pt: &Matrix4<Complex64>) -> f64 {
    hermitian_eigenvalues(pt)
        .iter()
        .filter(|e| **e < 0.0)
        .map(|e| -e)
        .sum()
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub negativity: f64,
    pub separable: bool,
    /// Pair whose amplitude deviates most from the mean of the other three;
    /// `None` for separable sets.
    pub dominant_pair: Option<BranchPair>,
}

/// True if `α_ij = a_i b_j`, i.e. `α_LL α_RR = α_LR α_RL` to relative 1e-12.
pub fn is_factorizable(alpha: &[Complex64; 4]) -> bool {
    let scale = alpha.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let det = alpha[0] * alpha[3] - alpha[1] * alpha[2];
    det.norm() <= SEPARABLE_TOL * scale
}

/// Negativity, separability and the amplitude that carries the entanglement.
pub fn classify(amps: &AmplitudeSet) -> Result<EntanglementReport> {
    let rho = assemble_state(amps)?;
    let separable = is_factorizable(&amps.alpha);
    let dominant_pair = if separable {
        None
    } else {
        let dev = |k: usize| {
            let others: Complex64 = (0..4).filter(|o| *o != k).map(|o| amps.alpha[o]).sum();
            (amps.alpha[k] - others / 3.0).norm()
        };
        (0..4)
            .max_by(|a, b| dev(*a).total_cmp(&dev(*b)))
            .map(BranchPair::from_index)
    };
    Ok(EntanglementReport {
        negativity: negativity(&rho),
        separable,
        dominant_pair,
    })
}
