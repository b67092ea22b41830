//! Mass/time sweeps of `φ` and `ϑ`, significance contours, and file output.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{beta4_closed, phase_nonrel};
use crate::config::{
    validate_config, BranchPair, CheckStatus, ExperimentConfig, Material, PhysicalConstants,
    CHECK_NON_OVERLAP, CHECK_PHI, CHECK_VARTHETA, CHECK_WAVEPACKET,
};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "M_kg,t_s,phi,vartheta,ratio,perturbative_ok,nonrel_ok";
pub const CONTOUR_CSV_HEADER: &str = "M_kg,t_threshold_s";

/// Default bisection bracket for contour times, s.
pub const DEFAULT_TIME_BRACKET: (f64, f64) = (1e-30, 1e10);

/// Per-cell geometry: `R` from the mass and density, separations in units of `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTemplate {
    pub material: Material,
    pub dx_over_r: f64,
    pub dsep_over_r: f64,
    pub constants: PhysicalConstants,
}

impl Default for ScanTemplate {
    fn default() -> Self {
        Self {
            material: Material::ytterbium(),
            dx_over_r: 10.0,
            dsep_over_r: 10.0,
            constants: PhysicalConstants::CODATA_2018,
        }
    }
}

impl ScanTemplate {
    pub fn with_dsep_over_r(mut self, dsep_over_r: f64) -> Self {
        self.dsep_over_r = dsep_over_r;
        self
    }

    pub fn config(&self, mass: f64, time: f64) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig::collinear_scaled(
            mass,
            time,
            self.dx_over_r,
            self.dsep_over_r,
            self.material.clone(),
        )?
        .with_constants(self.constants))
    }
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "M_kg")]
    pub mass: f64,
    #[serde(rename = "t_s")]
    pub time: f64,
    pub phi: f64,
    pub vartheta: f64,
    /// `ϑ/φ`, or 0 when `φ = 0`.
    pub ratio: f64,
    pub perturbative_ok: bool,
    pub nonrel_ok: bool,
}

/// A point on the `ϑ = level` line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    #[serde(rename = "M_kg")]
    pub mass: f64,
    #[serde(rename = "t_threshold_s")]
    pub t_threshold: f64,
}

/// Contour points plus a note for every mass without a root.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Contour {
    pub points: Vec<ContourPoint>,
    pub diagnostics: Vec<String>,
}

/// Evaluates a single cell.
pub fn scan_cell(mass: f64, time: f64, template: &ScanTemplate) -> Result<ScanRow> {
    let cfg = template.config(mass, time)?;
    let phi = phase_nonrel(&cfg, BranchPair::RL);
    let vartheta = beta4_closed(&cfg, BranchPair::RL).norm();
    let report = validate_config(&cfg);
    let pass = |name| report.status(name) == Some(CheckStatus::Pass);
    Ok(ScanRow {
        mass,
        time,
        phi,
        vartheta,
        ratio: if phi > 0.0 { vartheta / phi } else { 0.0 },
        perturbative_ok: pass(CHECK_PHI) && pass(CHECK_VARTHETA),
        nonrel_ok: pass(CHECK_NON_OVERLAP) && pass(CHECK_WAVEPACKET),
    })
}

/// `n` log-spaced points over `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "need 0 < min <= max, got [{lo:e}, {hi:e}]"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if n == 0 {
        return Err(Error::InvalidRange("need at least one point".into()));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// Log-spaced `n_mass × n_time` grid, mass-major. Cells run in parallel but
/// the output order is fixed by cell index.
pub fn scan_grid(
    mass_range: (f64, f64),
    time_range: (f64, f64),
    n_mass: usize,
    n_time: usize,
    template: &ScanTemplate,
) -> Result<Vec<ScanRow>> {
    if n_mass < 2 || n_time < 2 {
        return Err(Error::InvalidRange(format!(
            "need at least 2 points per axis, got {n_mass} x {n_time}"
        )));
    }
    let masses = log_space(mass_range.0, mass_range.1, n_mass)?;
    let times = log_space(time_range.0, time_range.1, n_time)?;
    if !(template.dsep_over_r > 0.0) {
        return Err(Error::InvalidRange(format!(
            "d_RL/R must be positive, got {}",
            template.dsep_over_r
        )));
    }
    (0..n_mass * n_time)
        .into_par_iter()
        .map(|k| scan_cell(masses[k / n_time], times[k % n_time], template))
        .collect()
}

/// For each mass, the time at which `f(mass, t) = level`, found by bisection in
/// `log t` over `bracket`. `f` must increase with `t`.
pub fn contour_with<F>(
    level: f64,
    masses: &[f64],
    bracket: (f64, f64),
    rel_tol: f64,
    f: F,
) -> Result<Contour>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if !(level > 0.0) {
        return Err(Error::InvalidRange(format!("level must be positive, got {level}")));
    }
    if !(bracket.0 > 0.0 && bracket.1 > bracket.0) {
        return Err(Error::InvalidRange(format!("bad time bracket {bracket:?}")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidRange(format!("tolerance must be positive, got {rel_tol}")));
    }
    let solve = |m: f64| -> Result<std::result::Result<ContourPoint, String>> {
        let g = |t: f64| f(m, t).map(|v| v - level);
        let (g_lo, g_hi) = (g(bracket.0)?, g(bracket.1)?);
        if g_lo > 0.0 || g_hi < 0.0 {
            return Ok(Err(format!(
                "M = {m:e} kg: no crossing of level {level:e} for t in [{:e}, {:e}] s",
                bracket.0, bracket.1
            )));
        }
        let (mut lo, mut hi) = (bracket.0.ln(), bracket.1.ln());
        // log-width below tol/4 keeps a t² observable within tol of the level
        let width = (1.0 + rel_tol / 4.0).ln();
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            if g(mid.exp())? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Ok(ContourPoint {
            mass: m,
            t_threshold: (0.5 * (lo + hi)).exp(),
        }))
    };
    let solved: Vec<_> = masses.par_iter().map(|m| solve(*m)).collect::<Result<_>>()?;
    let mut out = Contour::default();
    for s in solved {
        match s {
            Ok(p) => out.points.push(p),
            Err(d) => out.diagnostics.push(d),
        }
    }
    Ok(out)
}

/// `ϑ = level` contour over log-spaced masses.
pub fn contour(
    level: f64,
    mass_range: (f64, f64),
    n_mass: usize,
    template: &ScanTemplate,
    rel_tol: f64,
) -> Result<Contour> {
    let masses = log_space(mass_range.0, mass_range.1, n_mass)?;
    contour_with(level, &masses, DEFAULT_TIME_BRACKET, rel_tol, |m, t| {
        Ok(beta4_closed(&template.config(m, t)?, BranchPair::RL).norm())
    })
}

/// Gas-collision decoherence rate relative to a reference point:
/// linear in pressure, `M^{2/3}` in mass.
pub fn decoherence_scaling(pressure_ratio: f64, mass_ratio: f64) -> Result<f64> {
    if !(pressure_ratio > 0.0 && mass_ratio > 0.0) {
        return Err(Error::Domain(format!(
            "ratios must be positive, got {pressure_ratio}, {mass_ratio}"
        )));
    }
    Ok(pressure_ratio * mass_ratio.powf(2.0 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{},{}",
            r.mass, r.time, r.phi, r.vartheta, r.ratio, r.perturbative_ok, r.nonrel_ok
        );
    }
    s
}

pub fn contour_to_csv(points: &[ContourPoint]) -> String {
    let mut s = String::from(CONTOUR_CSV_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(s, "{:.8e},{:.8e}", p.mass, p.t_threshold);
    }
    s
}

fn render<T: Serialize>(items: &[T], format: OutputFormat, csv: impl Fn(&[T]) -> String) -> Result<String> {
    Ok(match format {
        OutputFormat::Csv => csv(items),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(items)?;
            s.push('\n');
            s
        }
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_rows(rows: &[ScanRow], format: OutputFormat, path: &Path) -> Result<()> {
    write_file(path, &render(rows, format, rows_to_csv)?)
}

pub fn emit_contour(points: &[ContourPoint], format: OutputFormat, path: &Path) -> Result<()> {
    write_file(path, &render(points, format, contour_to_csv)?)
}
