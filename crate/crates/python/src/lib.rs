//! Python bindings: model inputs, cross sections, spectra, Bloch dynamics and
//! the verification suite.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qsatom::bloch::{
    build_drift, equilibrium as bloch_equilibrium, evolve as bloch_evolve, mollow_threshold_eta2, BlochVector,
};
use qsatom::linalg::C64;
use qsatom::oracle::suite::{run_suite, SuiteOptions};
use qsatom::spectrum::TotalSpectrum;
use qsatom::{model, xsection, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::NegativeTime(_) | Error::ZeroInstrumentalWidth => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Reduced scattering scalars of the direct-scattering channel.
#[pyclass(frozen, module = "qsatom_py")]
pub struct ScatteringScalars(model::ScatteringScalars);

#[pymethods]
impl ScatteringScalars {
    #[new]
    fn new(
        delta0_plus: f64,
        delta0_minus: f64,
        norm2_pg_plus: f64,
        norm2_pg_minus: f64,
        norm2_pdg: f64,
        eps_r: f64,
    ) -> PyResult<Self> {
        model::ScatteringScalars::new(
            delta0_plus,
            delta0_minus,
            norm2_pg_plus,
            norm2_pg_minus,
            norm2_pdg,
            eps_r,
        )
        .map(Self)
        .map_err(py_err)
    }

    /// No direct scattering.
    #[staticmethod]
    fn mollow() -> Self {
        Self(model::ScatteringScalars::mollow())
    }

    /// Scalars derived from partial-wave phase shifts `δ_l^±`.
    #[staticmethod]
    fn from_phase_shifts(delta_plus: Vec<f64>, delta_minus: Vec<f64>) -> PyResult<Self> {
        let t = model::PhaseShiftTable::new(delta_plus, delta_minus).map_err(py_err)?;
        Ok(Self(model::scalars_from_phase_shifts(&t)))
    }

    #[getter]
    fn delta0_plus(&self) -> f64 {
        self.0.delta0_plus()
    }
    #[getter]
    fn delta0_minus(&self) -> f64 {
        self.0.delta0_minus()
    }
    #[getter]
    fn s(&self) -> f64 {
        self.0.s()
    }
    #[getter]
    fn norm2_pg_plus(&self) -> f64 {
        self.0.norm2_pg_plus()
    }
    #[getter]
    fn norm2_pg_minus(&self) -> f64 {
        self.0.norm2_pg_minus()
    }
    #[getter]
    fn norm2_pdg(&self) -> f64 {
        self.0.norm2_pdg()
    }
    #[getter]
    fn eps_r(&self) -> f64 {
        self.0.eps_r()
    }

    fn __repr__(&self) -> String {
        format!(
            "ScatteringScalars(delta0_plus={}, delta0_minus={}, norm2_pg_plus={}, norm2_pg_minus={}, norm2_pdg={}, eps_r={})",
            self.0.delta0_plus(),
            self.0.delta0_minus(),
            self.0.norm2_pg_plus(),
            self.0.norm2_pg_minus(),
            self.0.norm2_pdg(),
            self.0.eps_r()
        )
    }
}

/// Laser drive: intensity `eta2`, detuning `ztilde`, instrumental width `gammatilde`.
#[pyclass(frozen, module = "qsatom_py")]
pub struct DriveConfig(model::DriveConfig);

#[pymethods]
impl DriveConfig {
    #[new]
    #[pyo3(signature = (eta2, ztilde, gammatilde = 0.0))]
    fn new(eta2: f64, ztilde: f64, gammatilde: f64) -> PyResult<Self> {
        model::DriveConfig::from_eta2(eta2, ztilde, gammatilde)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta()
    }
    #[getter]
    fn eta2(&self) -> f64 {
        self.0.eta2()
    }
    #[getter]
    fn ztilde(&self) -> f64 {
        self.0.ztilde()
    }
    #[getter]
    fn gammatilde(&self) -> f64 {
        self.0.gammatilde()
    }

    fn __repr__(&self) -> String {
        format!(
            "DriveConfig(eta2={}, ztilde={}, gammatilde={})",
            self.0.eta2(),
            self.0.ztilde(),
            self.0.gammatilde()
        )
    }
}

/// `(sigma_tot, sigma_el, sigma_inel)`.
#[pyfunction]
fn cross_sections(sc: &ScatteringScalars, dc: &DriveConfig) -> (f64, f64, f64) {
    let c = xsection::cross_sections(&sc.0, &dc.0);
    (c.total, c.elastic, c.inelastic)
}

/// Stationary Bloch vector `(u, v)`.
#[pyfunction]
fn equilibrium(sc: &ScatteringScalars, dc: &DriveConfig) -> (f64, C64) {
    let eq = bloch_equilibrium(&model::reduced_scalars(&sc.0, &dc.0));
    (eq.u_inf, eq.v_inf)
}

/// Bloch vector `(u, v)` at reduced time `tau`, starting from the ground state.
#[pyfunction]
fn evolve(sc: &ScatteringScalars, dc: &DriveConfig, tau: f64) -> PyResult<(f64, C64)> {
    let rs = model::reduced_scalars(&sc.0, &dc.0);
    let x = bloch_evolve(&build_drift(&rs), &BlochVector::ground(), rs.eta, tau).map_err(py_err)?;
    Ok((x.u, x.v))
}

/// `(Sigma_tot, Sigma_inel, Sigma_el_lorentzian)` on the frequency grid `xs`;
/// requires `gammatilde > 0`.
#[pyfunction]
fn spectrum(sc: &ScatteringScalars, dc: &DriveConfig, xs: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let spec = TotalSpectrum::new(&sc.0, &dc.0).map_err(py_err)?;
    let mut out = (
        Vec::with_capacity(xs.len()),
        Vec::with_capacity(xs.len()),
        Vec::with_capacity(xs.len()),
    );
    for x in xs {
        let inel = spec.inelastic.at(x).map_err(py_err)?;
        let el = spec.elastic_at(x);
        out.0.push(inel + el);
        out.1.push(inel);
        out.2.push(el);
    }
    Ok(out)
}

/// Intensity at which the scattering-free resonant spectrum becomes three-peaked.
#[pyfunction]
#[pyo3(signature = (tol = 1e-13))]
fn threshold_eta2(tol: f64) -> PyResult<f64> {
    mollow_threshold_eta2(tol).map_err(py_err)
}

/// Runs the verification suite; returns `(passed, [(name, tolerance, measured, passed)])`.
#[pyfunction]
#[pyo3(signature = (seed = None, random_sets = None))]
fn verify(py: Python<'_>, seed: Option<u64>, random_sets: Option<usize>) -> (bool, Vec<(String, f64, f64, bool)>) {
    let mut opts = SuiteOptions::default();
    if let Some(s) = seed {
        opts.seed = s;
    }
    if let Some(n) = random_sets {
        opts.random_sets = n;
    }
    let report = py.detach(|| run_suite(&opts));
    let checks = report
        .checks
        .into_iter()
        .map(|c| (c.name, c.tolerance, c.measured, c.passed))
        .collect();
    (report.passed, checks)
}

#[pymodule]
pub fn qsatom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ScatteringScalars>()?;
    m.add_class::<DriveConfig>()?;
    m.add_function(wrap_pyfunction!(cross_sections, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_eta2, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
