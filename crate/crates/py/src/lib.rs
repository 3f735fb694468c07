//! Python bindings for `ferrogate`, built as the `ferrogate` extension
//! module. Quantities are SI floats; schedules round-trip through the
//! `.fgs` text format.

use ferrogate::exchange::{
    exchange_unitary, gate_fidelity, run_swap_scenario, scenario_theta, Gate4, Scenario,
    ScenarioReport,
};
use ferrogate::optics;
use ferrogate::physcore::{LaserParams, MaterialParams, M_E};
use ferrogate::pulseprog::{
    calibrate_pulse, canonical_fig3_schedule, parameter_value, parse_schedule, serialize_schedule,
    set_parameter, CalibrationBounds, Fig3Params,
};
use ferrogate::qdyn1d::{stationary_states_of, Grid1D};
use ferrogate::spinreg::{apply_exchange, spin_expectations, ExchangeEvent, SpinState};
use num_complex::Complex64 as C64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    ferrogate,
    FerrogateError,
    PyException,
    "Raised for invalid input or a failed computation."
);

fn err(e: ferrogate::Error) -> PyErr {
    FerrogateError::new_err(format!("{}: {e}", e.kind()))
}

/// A parsed pulse schedule.
#[pyclass(name = "Schedule", module = "ferrogate")]
pub struct PySchedule {
    inner: ferrogate::pulseprog::Schedule,
}

#[pymethods]
impl PySchedule {
    /// Parses `.fgs` source text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_schedule(text)
            .map(|inner| PySchedule { inner })
            .map_err(err)
    }

    /// The built-in two-pulse swap template.
    #[staticmethod]
    fn template() -> Self {
        PySchedule {
            inner: canonical_fig3_schedule(&Fig3Params::default()),
        }
    }

    fn to_text(&self) -> String {
        serialize_schedule(&self.inner)
    }

    /// Overrides one parameter, e.g. `set("well.barrier", "2eV")` or
    /// `set("pulse0.t0", 1e-13)`. Strings may carry units; floats are SI.
    fn set(&mut self, name: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let v = match value.extract::<f64>() {
            Ok(v) => v,
            Err(_) => parameter_value(name, &value.extract::<String>()?).map_err(err)?,
        };
        set_parameter(&mut self.inner, name, v).map_err(err)
    }

    fn scaled(&self, factor: f64) -> Self {
        PySchedule {
            inner: self.inner.scaled(factor),
        }
    }

    fn time_reversed(&self) -> Self {
        PySchedule {
            inner: self.inner.time_reversed(),
        }
    }

    #[getter]
    fn pulse_count(&self) -> usize {
        self.inner.pulses.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule({} pulses, {} gates)",
            self.inner.pulses.len(),
            self.inner.gates.len()
        )
    }
}

impl PySchedule {
    fn scenario(&self) -> PyResult<Scenario> {
        Scenario::from_schedule(&self.inner).map_err(err)
    }
}

/// An n-qubit spin register driven by exchange gates.
#[pyclass(name = "SpinRegister", module = "ferrogate")]
pub struct PySpinRegister {
    state: SpinState,
}

#[pymethods]
impl PySpinRegister {
    /// Builds a product state from a string of `u`/`d` (or `0`/`1`)
    /// characters, qubit 0 first.
    #[new]
    fn new(spins: &str) -> PyResult<Self> {
        let bits: Vec<bool> = spins
            .chars()
            .map(|c| match c {
                'u' | 'U' | '0' => Ok(true),
                'd' | 'D' | '1' => Ok(false),
                _ => Err(FerrogateError::new_err(format!(
                    "invalid spin character {c:?}"
                ))),
            })
            .collect::<PyResult<_>>()?;
        SpinState::from_spins(&bits)
            .map(|state| PySpinRegister { state })
            .map_err(err)
    }

    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<C64>) -> PyResult<Self> {
        SpinState::from_amplitudes(amplitudes)
            .map(|state| PySpinRegister { state })
            .map_err(err)
    }

    /// Applies `exp(-i theta S_i.S_j)` in place.
    fn exchange(&mut self, i: usize, j: usize, theta: f64) -> PyResult<()> {
        self.state = apply_exchange(&self.state, &ExchangeEvent::new(i, j, theta)).map_err(err)?;
        Ok(())
    }

    #[getter]
    fn n(&self) -> usize {
        self.state.n()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.state.amplitudes().to_vec()
    }

    fn fidelity(&self, other: &PySpinRegister) -> f64 {
        self.state.fidelity(&other.state)
    }

    /// Per-qubit `<Sz>` plus total `Sz` and `S^2`.
    fn expectations<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let e = spin_expectations(&self.state);
        let d = PyDict::new(py);
        d.set_item("sz", e.sz)?;
        d.set_item("sz_total", e.sz_total)?;
        d.set_item("s2_total", e.s2_total)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("SpinRegister(n={})", self.state.n())
    }
}

/// Peak rectified polarization in C/m^2.
#[pyfunction]
#[pyo3(signature = (r=1.95e-11, n=2.45, i_avg=10e-3, d=1e-6, rep_rate=76e6, tau=100e-15))]
fn polarization_peak(r: f64, n: f64, i_avg: f64, d: f64, rep_rate: f64, tau: f64) -> PyResult<f64> {
    let mut mat = MaterialParams::batio3();
    mat.r = r;
    mat.n = n;
    mat.validate().map_err(err)?;
    let laser = LaserParams::new(i_avg, d, rep_rate, tau).map_err(err)?;
    Ok(optics::rectified_polarization_peak(&mat, &laser))
}

/// Peak displacement-current field in tesla at `radius`.
#[pyfunction]
fn displacement_bmax(radius: f64, p_max: f64, tau: f64) -> f64 {
    optics::displacement_bmax(radius, p_max, tau)
}

/// Electron sheet density in m^-2 that screens polarization `p`.
#[pyfunction]
fn sheet_density(p: f64) -> f64 {
    optics::sheet_density(p)
}

/// The two-qubit exchange gate as a 4x4 nested list.
#[pyfunction(name = "exchange_unitary")]
fn py_exchange_unitary(theta: f64) -> Vec<Vec<C64>> {
    exchange_unitary(theta)
        .0
        .iter()
        .map(|r| r.to_vec())
        .collect()
}

/// Gate fidelity of `exp(-i theta S1.S2)` against SWAP.
#[pyfunction]
fn swap_fidelity(theta: f64) -> f64 {
    gate_fidelity(&Gate4::swap(), &exchange_unitary(theta))
}

/// Lowest `count` energies (J) of a sampled potential on a uniform grid.
#[pyfunction]
#[pyo3(signature = (potential, x_min, x_max, count, mass_ratio=0.19))]
fn stationary_energies(
    py: Python<'_>,
    potential: Vec<f64>,
    x_min: f64,
    x_max: f64,
    count: usize,
    mass_ratio: f64,
) -> PyResult<Vec<f64>> {
    let grid = Grid1D::new(x_min, x_max, potential.len()).map_err(err)?;
    py.detach(|| stationary_states_of(&potential, &grid, mass_ratio * M_E, count))
        .map(|s| s.iter().map(|e| e.energy).collect())
        .map_err(err)
}

/// Accumulated exchange angle of a schedule, in radians.
#[pyfunction]
fn exchange_theta(py: Python<'_>, schedule: &PySchedule) -> PyResult<f64> {
    let sc = schedule.scenario()?;
    py.detach(|| scenario_theta(&sc)).map_err(err)
}

fn report_dict<'py>(py: Python<'py>, r: &ScenarioReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("theta_rad", r.theta)?;
    d.set_item("target_theta_rad", r.target_theta)?;
    d.set_item("leakage", r.leakage)?;
    d.set_item("swap_fidelity", r.swap_fidelity)?;
    d.set_item("target_fidelity", r.target_fidelity)?;
    d.set_item("j_static_ev", r.j_static / ferrogate::physcore::units::EV)?;
    d.set_item("j_peak_ev", r.j_peak / ferrogate::physcore::units::EV)?;
    d.set_item("max_norm_drift", r.norm_drift)?;
    d.set_item("flags", r.flags.clone())?;
    d.set_item("warnings", r.warnings.clone())?;
    Ok(d)
}

/// Full swap run: exchange angle, orbital leakage and gate fidelities.
#[pyfunction]
fn swap_scenario<'py>(py: Python<'py>, schedule: &PySchedule) -> PyResult<Bound<'py, PyDict>> {
    let sc = schedule.scenario()?;
    let r = py.detach(|| run_swap_scenario(&sc)).map_err(err)?;
    report_dict(py, &r)
}

/// Scales every pulse so the exchange angle hits `target`. Returns the
/// scale and a new schedule.
#[pyfunction]
#[pyo3(signature = (schedule, target=std::f64::consts::PI, tolerance=1e-3))]
fn calibrate(
    py: Python<'_>,
    schedule: &PySchedule,
    target: f64,
    tolerance: f64,
) -> PyResult<(f64, PySchedule)> {
    let bounds = CalibrationBounds {
        tolerance,
        ..Default::default()
    };
    let template = schedule.inner.clone();
    let cal = py
        .detach(|| calibrate_pulse(target, &template, &bounds))
        .map_err(err)?;
    Ok((
        cal.scale,
        PySchedule {
            inner: template.scaled(cal.scale),
        },
    ))
}

#[pymodule]
#[pyo3(name = "ferrogate")]
fn ferrogate_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FerrogateError", m.py().get_type::<FerrogateError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PySpinRegister>()?;
    m.add_function(wrap_pyfunction!(polarization_peak, m)?)?;
    m.add_function(wrap_pyfunction!(displacement_bmax, m)?)?;
    m.add_function(wrap_pyfunction!(sheet_density, m)?)?;
    m.add_function(wrap_pyfunction!(py_exchange_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(swap_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_energies, m)?)?;
    m.add_function(wrap_pyfunction!(exchange_theta, m)?)?;
    m.add_function(wrap_pyfunction!(swap_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    Ok(())
}
