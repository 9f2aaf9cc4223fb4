//! Python bindings for the core crate. Domain and configuration problems
//! raise ValueError; capacity limits and internal invariant violations
//! raise RuntimeError.

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tempnet_tradeoff::analysis::{fitting, meanfield};
use tempnet_tradeoff::{model, sim, Error};

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::Domain(_) | Error::Config(_) => PyValueError::new_err(msg),
        Error::Capacity(_) | Error::Invariant(_) => PyRuntimeError::new_err(msg),
    }
}

#[pyclass(name = "ModelParams", frozen)]
#[derive(Clone)]
struct PyModelParams {
    inner: model::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (k0, m, alpha, n_nodes=100, m0=0, t0=1.0))]
    fn new(k0: f64, m: u32, alpha: f64, n_nodes: usize, m0: u64, t0: f64) -> PyResult<Self> {
        let inner = model::ModelParams {
            n_nodes,
            m,
            m0,
            k0,
            t0,
            alpha,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyModelParams { inner })
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m
    }

    #[getter]
    fn m0(&self) -> u64 {
        self.inner.m0
    }

    #[getter]
    fn k0(&self) -> f64 {
        self.inner.k0
    }

    #[getter]
    fn t0(&self) -> f64 {
        self.inner.t0
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    /// Integration constant of the value curve.
    fn c(&self) -> PyResult<f64> {
        self.inner.constant_c().map_err(to_py)
    }

    fn value(&self, t: f64) -> PyResult<f64> {
        self.inner.value(t).map_err(to_py)
    }

    fn cost(&self, t: f64) -> PyResult<f64> {
        self.inner.cost(t).map_err(to_py)
    }

    fn net_value(&self, t: f64) -> PyResult<f64> {
        model::net_value(t, &self.inner).map_err(to_py)
    }

    #[pyo3(signature = (tol=model::BOUNDARY_REL_TOL))]
    fn classify(&self, tol: f64) -> PyResult<PyClassification> {
        model::classify_scenario(&self.inner, tol)
            .map(|inner| PyClassification { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(k0={}, m={}, alpha={}, n_nodes={}, m0={}, t0={})",
            p.k0, p.m, p.alpha, p.n_nodes, p.m0, p.t0
        )
    }
}

#[pyclass(name = "Classification", frozen)]
struct PyClassification {
    inner: model::Classification,
}

#[pymethods]
impl PyClassification {
    /// Scenario name, e.g. "TradeoffLateStop".
    #[getter]
    fn scenario(&self) -> String {
        self.inner.scenario.to_string()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn t_star(&self) -> Option<f64> {
        self.inner.t_star
    }

    #[getter]
    fn t_char(&self) -> Option<f64> {
        self.inner.t_char
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Classification({})", self.inner)
    }
}

#[pyclass(name = "ActivitySeries", frozen)]
struct PyActivitySeries {
    inner: sim::ActivitySeries,
}

#[pymethods]
impl PyActivitySeries {
    /// Recorded step numbers.
    #[getter]
    fn times(&self) -> Vec<u64> {
        self.inner.times.clone()
    }

    #[getter]
    fn mean_activity(&self) -> Vec<f64> {
        self.inner.mean_activity.clone()
    }

    #[getter]
    fn master_seed(&self) -> u64 {
        self.inner.master_seed
    }

    #[getter]
    fn run_index(&self) -> u32 {
        self.inner.run_index
    }

    fn n_nodes(&self) -> usize {
        self.inner.n_nodes()
    }

    /// Per-node activities of one recorded row.
    fn row(&self, index: usize) -> PyResult<Vec<f64>> {
        self.inner
            .per_node
            .get(index)
            .cloned()
            .ok_or_else(|| PyIndexError::new_err(format!("row {index} out of range")))
    }

    fn final_activities(&self) -> Vec<f64> {
        self.inner.final_activities().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.times.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ActivitySeries(run_index={}, rows={}, n_nodes={})",
            self.inner.run_index,
            self.inner.times.len(),
            self.inner.n_nodes()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (k0, m, t0=1.0))]
fn constant_c(k0: f64, m: u32, t0: f64) -> PyResult<f64> {
    model::constant_c(k0, m, t0).map_err(to_py)
}

#[pyfunction]
fn value_curve(t: f64, m: u32, c: f64) -> PyResult<f64> {
    model::value_curve(t, m, c).map_err(to_py)
}

#[pyfunction]
fn cost_curve(t: f64, m: u32, alpha: f64) -> PyResult<f64> {
    model::cost_curve(t, m, alpha).map_err(to_py)
}

#[pyfunction]
fn crossover_time(c: f64, m: u32) -> Option<f64> {
    model::crossover_time(c, m)
}

#[pyfunction]
fn characteristic_time(c: f64, m: u32, alpha: f64) -> Option<f64> {
    model::characteristic_time(c, m, alpha)
}

/// Fixed-step RK4 solution of dk/dt = m + k/2t; returns (t, k) pairs.
#[pyfunction]
fn integrate_meanfield(
    k_start: f64,
    t_start: f64,
    t_end: f64,
    m: u32,
    dt: f64,
) -> PyResult<Vec<(f64, f64)>> {
    meanfield::integrate_meanfield(k_start, t_start, t_end, m, dt).map_err(to_py)
}

/// First time the local log-log slope of (times, values) rises through 3/4.
#[pyfunction]
fn detect_crossover(times: Vec<f64>, values: Vec<f64>) -> PyResult<Option<f64>> {
    if times.len() != values.len() {
        return Err(PyValueError::new_err(format!(
            "length mismatch: {} times, {} values",
            times.len(),
            values.len()
        )));
    }
    let series: Vec<(f64, f64)> = times.into_iter().zip(values).collect();
    fitting::detect_crossover(&series)
        .map(|d| d.estimate)
        .map_err(to_py)
}

/// Runs the ensemble and returns one ActivitySeries per run. `overrides`
/// seeds selected nodes with a different starting activity.
#[pyfunction]
#[pyo3(signature = (params, runs=1, master_seed=0, steps=1000, record_every=1, overrides=None))]
fn run_simulation(
    params: &PyModelParams,
    runs: u32,
    master_seed: u64,
    steps: u64,
    record_every: u64,
    overrides: Option<Vec<(usize, f64)>>,
) -> PyResult<Vec<PyActivitySeries>> {
    let spec = sim::EnsembleSpec {
        runs,
        master_seed,
        steps,
        record_every,
    };
    let series = match overrides {
        Some(list) => sim::run_simulation_with_overrides(&params.inner, &spec, &list),
        None => sim::run_simulation(&params.inner, &spec),
    }
    .map_err(to_py)?;
    Ok(series
        .into_iter()
        .map(|inner| PyActivitySeries { inner })
        .collect())
}

#[pymodule]
fn tempnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("BOUNDARY_REL_TOL", model::BOUNDARY_REL_TOL)?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyClassification>()?;
    m.add_class::<PyActivitySeries>()?;
    m.add_function(wrap_pyfunction!(constant_c, m)?)?;
    m.add_function(wrap_pyfunction!(value_curve, m)?)?;
    m.add_function(wrap_pyfunction!(cost_curve, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_time, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_time, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_meanfield, m)?)?;
    m.add_function(wrap_pyfunction!(detect_crossover, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    Ok(())
}
