//! Python bindings: configurations, branch amplitudes, negativity, the
//! Diósi–Penrose density matrix and the mass/time sweeps.

use gravent_core::amplitudes::{self as amp, AmplitudeOptions};
use gravent_core::config::{ConfigFile, Material, PhysicalConstants};
use gravent_core::{dp, entanglement, scan, validation};
use gravent_core::{BranchPair, Complex64, Error, ExperimentConfig, GravityModel};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::InvalidRange(_) | Error::Json(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn pair(name: &str) -> PyResult<BranchPair> {
    name.parse().map_err(to_py)
}

fn model(name: &str) -> PyResult<GravityModel> {
    Ok(match name {
        "qg" => GravityModel::QGNonRel,
        "qg-rel" => GravityModel::QGRelativisticPoint,
        "cg" => GravityModel::CGSemiClassical,
        "qg-virtual" => GravityModel::QGVirtualMatter,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown model {other:?}; expected qg, qg-rel, cg or qg-virtual"
            )))
        }
    })
}

/// Two spheres of mass `mass` each in a superposition of size `dx`, closest
/// branches `dsep` apart. The radius follows from the density unless given.
#[pyclass(name = "Config", module = "gravent")]
#[derive(Clone)]
struct PyConfig {
    inner: ExperimentConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (mass, time, dx, dsep, radius=None, atom_mass=None, density=None))]
    fn new(
        mass: f64,
        time: f64,
        dx: f64,
        dsep: f64,
        radius: Option<f64>,
        atom_mass: Option<f64>,
        density: Option<f64>,
    ) -> PyResult<Self> {
        let yb = Material::ytterbium();
        let material = Material::new(
            "custom",
            atom_mass.unwrap_or(yb.atom_mass),
            density.unwrap_or(yb.density),
        )
        .map_err(to_py)?;
        let file = ConfigFile {
            model: None,
            mass_kg: mass,
            time_s: time,
            dx_m: dx,
            dsep_m: dsep,
            radius_m: radius,
            material,
            geometry: Default::default(),
            constants: None,
        };
        Ok(Self {
            inner: file.into_config().map_err(to_py)?,
        })
    }

    /// Ytterbium spheres with `Δx` and `d_RL` in units of the radius.
    #[staticmethod]
    #[pyo3(signature = (mass, time, dx_over_r=10.0, dsep_over_r=10.0))]
    fn scaled(mass: f64, time: f64, dx_over_r: f64, dsep_over_r: f64) -> PyResult<Self> {
        let inner = ExperimentConfig::collinear_scaled(mass, time, dx_over_r, dsep_over_r, Material::ytterbium())
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ConfigFile::from_json(text)
            .and_then(ConfigFile::into_config)
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        ConfigFile::from_config(&self.inner, None).to_json().map_err(to_py)
    }

    /// Copy with a different interaction time.
    fn with_time(&self, time: f64) -> Self {
        Self {
            inner: self.inner.clone().with_time(time),
        }
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx
    }

    #[getter]
    fn dsep(&self) -> f64 {
        self.inner.d_rl
    }

    fn branch_distance(&self, pair_name: &str) -> PyResult<f64> {
        Ok(self.inner.branch_distance(pair(pair_name)?))
    }

    /// `(name, status, detail)` for each validity check.
    fn validity(&self) -> Vec<(String, String, String)> {
        gravent_core::config::validate_config(&self.inner)
            .checks
            .into_iter()
            .map(|c| (c.name, format!("{:?}", c.status).to_lowercase(), c.detail))
            .collect()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "Config(mass={:e}, time={:e}, dx={:e}, dsep={:e}, radius={:e})",
            c.mass, c.time, c.dx, c.d_rl, c.radius
        )
    }
}

/// The four branch amplitudes in the order LL, LR, RL, RR.
#[pyclass(name = "AmplitudeSet", module = "gravent", frozen)]
struct PyAmplitudeSet {
    inner: gravent_core::AmplitudeSet,
}

#[pymethods]
impl PyAmplitudeSet {
    #[getter]
    fn alpha(&self) -> Vec<Complex64> {
        self.inner.alpha.to_vec()
    }

    #[getter]
    fn model(&self) -> String {
        self.inner.model.to_string()
    }

    #[getter]
    fn order(&self) -> String {
        format!("{:?}", self.inner.order)
    }

    #[getter]
    fn perturbative(&self) -> bool {
        self.inner.perturbative
    }

    fn get(&self, pair_name: &str) -> PyResult<Complex64> {
        Ok(self.inner.get(pair(pair_name)?))
    }

    fn negativity(&self) -> PyResult<f64> {
        Ok(entanglement::classify(&self.inner).map_err(to_py)?.negativity)
    }

    fn separable(&self) -> bool {
        entanglement::is_factorizable(&self.inner.alpha)
    }

    /// Branch pair carrying the entanglement, or None when separable.
    fn dominant_pair(&self) -> PyResult<Option<String>> {
        let report = entanglement::classify(&self.inner).map_err(to_py)?;
        Ok(report.dominant_pair.map(|p| p.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("AmplitudeSet(model={}, alpha={:?})", self.inner.model, self.inner.alpha)
    }
}

#[pyfunction]
#[pyo3(signature = (cfg, pair_name="RL"))]
fn phase_nonrel(cfg: &PyConfig, pair_name: &str) -> PyResult<f64> {
    Ok(amp::phase_nonrel(&cfg.inner, pair(pair_name)?))
}

#[pyfunction]
#[pyo3(signature = (cfg, pair_name="RL"))]
fn beta4_closed(cfg: &PyConfig, pair_name: &str) -> PyResult<Complex64> {
    Ok(amp::beta4_closed(&cfg.inner, pair(pair_name)?))
}

#[pyfunction]
#[pyo3(signature = (cfg, pair_name="RL"))]
fn kappa4_closed(cfg: &PyConfig, pair_name: &str) -> PyResult<Complex64> {
    Ok(amp::kappa4_closed(&cfg.inner, pair(pair_name)?))
}

#[pyfunction]
#[pyo3(signature = (cfg, pair_name="RL"))]
fn gamma2_relativistic_point(cfg: &PyConfig, pair_name: &str) -> PyResult<Complex64> {
    Ok(amp::gamma2_relativistic_point(&cfg.inner, pair(pair_name)?))
}

/// Amplitudes for `model_name` in {"qg", "qg-rel", "cg", "qg-virtual"}.
#[pyfunction]
#[pyo3(signature = (cfg, model_name, exponentiate=false))]
fn amplitudes(py: Python<'_>, cfg: &PyConfig, model_name: &str, exponentiate: bool) -> PyResult<PyAmplitudeSet> {
    let m = model(model_name)?;
    let opts = AmplitudeOptions {
        exponentiate,
        ..AmplitudeOptions::default()
    };
    let inner = py.allow_threads(|| amp::amplitudes(&cfg.inner, m, &opts)).map_err(to_py)?;
    Ok(PyAmplitudeSet { inner })
}

/// Negativity of the normalized pure state with the given four amplitudes.
#[pyfunction]
fn negativity(alpha: [Complex64; 4]) -> PyResult<f64> {
    Ok(entanglement::negativity(&entanglement::pure_state(&alpha).map_err(to_py)?))
}

/// Diósi–Penrose density matrix at time `t` as nested lists.
#[pyfunction]
fn dp_density_matrix(cfg: &PyConfig, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let rho = dp::dp_density_matrix(&cfg.inner, t).map_err(to_py)?;
    let m = rho.entries();
    Ok((0..4).map(|a| (0..4).map(|b| m[(a, b)]).collect()).collect())
}

#[pyfunction]
fn dp_negativity(cfg: &PyConfig, t: f64) -> PyResult<f64> {
    Ok(entanglement::negativity(&dp::dp_density_matrix(&cfg.inner, t).map_err(to_py)?))
}

/// Time after which `|κ⁽⁴⁾_RL|` exceeds `σ_G`.
#[pyfunction]
#[pyo3(signature = (cfg, t_lo=1e-40, t_hi=1e10, rel_tol=1e-9))]
fn dp_threshold_time(cfg: &PyConfig, t_lo: f64, t_hi: f64, rel_tol: f64) -> PyResult<f64> {
    dp::dp_threshold_time(&cfg.inner, t_lo, t_hi, rel_tol).map_err(to_py)
}

#[pyfunction]
fn e_g(mass: f64, radius: f64, dx: f64) -> f64 {
    dp::e_g(mass, radius, dx, PhysicalConstants::CODATA_2018.g)
}

type RowTuple = (f64, f64, f64, f64, f64, bool, bool);

/// Rows of `(M_kg, t_s, phi, vartheta, ratio, perturbative_ok, nonrel_ok)`, mass-major.
#[pyfunction]
#[pyo3(signature = (mass_range, time_range, n_mass, n_time, dsep_over_r=10.0))]
fn scan_grid(
    py: Python<'_>,
    mass_range: (f64, f64),
    time_range: (f64, f64),
    n_mass: usize,
    n_time: usize,
    dsep_over_r: f64,
) -> PyResult<Vec<RowTuple>> {
    let template = scan::ScanTemplate::default().with_dsep_over_r(dsep_over_r);
    let rows = py
        .allow_threads(|| scan::scan_grid(mass_range, time_range, n_mass, n_time, &template))
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.mass, r.time, r.phi, r.vartheta, r.ratio, r.perturbative_ok, r.nonrel_ok))
        .collect())
}

/// `(M_kg, t_threshold_s)` where `ϑ = level`; masses without a root are skipped.
#[pyfunction]
#[pyo3(signature = (level, mass_range, n_mass, dsep_over_r=10.0, rel_tol=1e-9))]
fn contour(level: f64, mass_range: (f64, f64), n_mass: usize, dsep_over_r: f64, rel_tol: f64) -> PyResult<Vec<(f64, f64)>> {
    let template = scan::ScanTemplate::default().with_dsep_over_r(dsep_over_r);
    let c = scan::contour(level, mass_range, n_mass, &template, rel_tol).map_err(to_py)?;
    Ok(c.points.into_iter().map(|p| (p.mass, p.t_threshold)).collect())
}

/// `(name, passed, detail)` for every closed-form vs quadrature check.
#[pyfunction]
fn run_validation(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.allow_threads(validation::run_validation)
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "gravent")]
fn gravent_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyAmplitudeSet>()?;
    m.add_function(wrap_pyfunction!(phase_nonrel, m)?)?;
    m.add_function(wrap_pyfunction!(beta4_closed, m)?)?;
    m.add_function(wrap_pyfunction!(kappa4_closed, m)?)?;
    m.add_function(wrap_pyfunction!(gamma2_relativistic_point, m)?)?;
    m.add_function(wrap_pyfunction!(amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(negativity, m)?)?;
    m.add_function(wrap_pyfunction!(dp_density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(dp_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(dp_threshold_time, m)?)?;
    m.add_function(wrap_pyfunction!(e_g, m)?)?;
    m.add_function(wrap_pyfunction!(scan_grid, m)?)?;
    m.add_function(wrap_pyfunction!(contour, m)?)?;
    m.add_function(wrap_pyfunction!(run_validation, m)?)?;
    m.add("PLANCK_MASS", gravent_core::config::PLANCK_MASS)?;
    Ok(())
}
